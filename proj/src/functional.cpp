#include "tsx/functional.hpp"

#include <algorithm>
#include <sstream>

namespace tsx {

TreeFunctional TreeFunctional::make_leaf(int sign, Coord k) {
  TreeFunctional f;
  f.leaf = true;
  f.sign = sign < 0 ? -1 : 1;
  f.coord = k;
  return f;
}

TreeFunctional TreeFunctional::make_node(long n, std::vector<TreeFunctional> children) {
  TreeFunctional f;
  f.leaf = false;
  f.weight_index = n;
  f.children = std::move(children);
  return f;
}

namespace {

void collect_support(const TreeFunctional& f, FiniteSet& out) {
  if (f.leaf) {
    out.push_back(f.coord);
    return;
  }
  for (auto& c : f.children) collect_support(c, out);
}

}  // namespace

FiniteSet TreeFunctional::support() const {
  FiniteSet s;
  collect_support(*this, s);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

Coord TreeFunctional::min_coord() const {
  if (leaf) return coord;
  Coord m = children.front().min_coord();
  for (auto& c : children) m = std::min(m, c.min_coord());
  return m;
}

Coord TreeFunctional::max_coord() const {
  if (leaf) return coord;
  Coord m = children.front().max_coord();
  for (auto& c : children) m = std::max(m, c.max_coord());
  return m;
}

int TreeFunctional::height() const {
  int h = 0;
  if (!leaf)
    for (auto& c : children) h = std::max(h, 1 + c.height());
  return h;
}

std::size_t TreeFunctional::node_count() const {
  std::size_t n = 1;
  if (!leaf)
    for (auto& c : children) n += c.node_count();
  return n;
}

bool operator==(const TreeFunctional& a, const TreeFunctional& b) {
  if (a.leaf != b.leaf) return false;
  if (a.leaf) return a.sign == b.sign && a.coord == b.coord;
  return a.weight_index == b.weight_index && a.children == b.children;
}

Scalar eval_functional(const SpaceSpec& space, const TreeFunctional& f, const SparseVector& x) {
  if (f.leaf) {
    Scalar v = x.at(f.coord);
    return f.sign < 0 ? -v : v;
  }
  Scalar s;
  for (auto& c : f.children) s += eval_functional(space, c, x);
  if (s.is_zero()) return s;
  return space.weight(f.weight_index) * s;
}

namespace {

void validate_rec(const SpaceSpec& space, const TreeFunctional& f, const std::string& path,
                  std::vector<Violation>& out) {
  auto here = path.empty() ? std::string("root") : path;
  if (f.leaf) {
    if (f.sign != 1 && f.sign != -1) out.push_back({here, "leaf sign must be +1 or -1"});
    if (f.coord < 1) out.push_back({here, "leaf coordinate must be >= 1"});
    return;
  }
  if (f.children.empty()) {
    out.push_back({here, "node without children"});
    return;
  }
  bool index_ok = f.weight_index >= 1 && (space.kind != SpaceSpec::Kind::Single || f.weight_index == 1);
  if (!index_ok) out.push_back({here, "weight index " + std::to_string(f.weight_index) + " not available"});
  for (std::size_t i = 0; i < f.children.size(); ++i)
    validate_rec(space, f.children[i], path.empty() ? std::to_string(i) : path + "." + std::to_string(i), out);
  FiniteSet minima;
  bool successive = true;
  for (std::size_t i = 0; i < f.children.size(); ++i) {
    if (i && f.children[i - 1].max_coord() >= f.children[i].min_coord()) successive = false;
    minima.push_back(f.children[i].min_coord());
  }
  if (!successive) {
    out.push_back({here, "children supports are not successive"});
    return;
  }
  if (index_ok) {
    FamilyExpr fam = space.level_family(f.weight_index);
    if (!is_member(fam, minima))
      out.push_back({here, "children minima " + set_str(minima) + " not in " + fam.str()});
  }
}

void all_supports(const TreeFunctional& f, std::vector<FiniteSet>& out) {
  out.push_back(f.support());
  if (!f.leaf)
    for (auto& c : f.children) all_supports(c, out);
}

}  // namespace

std::vector<Violation> validate(const SpaceSpec& space, const TreeFunctional& f) {
  std::vector<Violation> out;
  validate_rec(space, f, "", out);
  return out;
}

bool is_comparable(const TreeFunctional& f, const std::vector<SparseVector>& blocks) {
  if (!is_block_sequence(blocks)) throw Error("NonSuccessive", "blocks must be successive");
  FiniteSet U = f.support();
  std::vector<FiniteSet> supports;
  all_supports(f, supports);
  for (auto& b : blocks) {
    if (b.empty()) continue;
    Coord lo = b.min_coord(), hi = b.max_coord();
    FiniteSet inter;
    std::set_intersection(U.begin(), U.end(), b.entries().begin(), b.entries().end(), std::back_inserter(inter),
                          [](const auto& x, const auto& y) {
                            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Coord>) {
                              return x < y.first;
                            } else {
                              return x.first < y;
                            }
                          });
    for (auto& E : supports) {
      bool inside = E.front() >= lo && E.back() <= hi;
      bool contains = std::includes(E.begin(), E.end(), inter.begin(), inter.end());
      bool apart = E.back() < lo || E.front() > hi;
      if (!inside && !contains && !apart) return false;
    }
  }
  return true;
}

std::optional<TreeFunctional> restrict_functional(const TreeFunctional& f, const std::function<bool(Coord)>& keep) {
  if (f.leaf) {
    if (keep(f.coord)) return f;
    return std::nullopt;
  }
  std::vector<TreeFunctional> kids;
  for (auto& c : f.children)
    if (auto r = restrict_functional(c, keep)) kids.push_back(std::move(*r));
  if (kids.empty()) return std::nullopt;
  return TreeFunctional::make_node(f.weight_index, std::move(kids));
}

std::optional<TreeFunctional> restrict_functional(const TreeFunctional& f, const FiniteSet& s) {
  return restrict_functional(f, [&s](Coord k) { return std::binary_search(s.begin(), s.end(), k); });
}

namespace {

void leaf_terms_rec(const TreeFunctional& f, std::vector<long>& path, std::vector<LeafTerm>& out) {
  if (f.leaf) {
    out.push_back({f.coord, f.sign, path});
    return;
  }
  path.push_back(f.weight_index);
  for (auto& c : f.children) leaf_terms_rec(c, path, out);
  path.pop_back();
}

void sexpr_rec(const TreeFunctional& f, std::ostringstream& os) {
  if (f.leaf) {
    os << "(l " << (f.sign < 0 ? '-' : '+') << ' ' << f.coord << ')';
    return;
  }
  os << "(n " << f.weight_index;
  for (auto& c : f.children) {
    os << ' ';
    sexpr_rec(c, os);
  }
  os << ')';
}

struct SexprParser {
  const std::string& s;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error("ParseError", "functional, position " + std::to_string(pos) + ": " + what);
  }
  void ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  void expect(char c) {
    ws();
    if (pos >= s.size() || s[pos] != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }
  long number() {
    ws();
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (start == pos || pos - start > 18) fail("expected a positive integer");
    return std::stol(s.substr(start, pos - start));
  }
  TreeFunctional parse() {
    expect('(');
    ws();
    if (pos >= s.size()) fail("unexpected end");
    char tag = s[pos++];
    if (tag == 'l') {
      ws();
      if (pos >= s.size() || (s[pos] != '+' && s[pos] != '-')) fail("expected sign '+' or '-'");
      int sign = s[pos++] == '-' ? -1 : 1;
      long k = number();
      if (k < 1) fail("coordinates are 1-based");
      expect(')');
      return TreeFunctional::make_leaf(sign, k);
    }
    if (tag == 'n') {
      long n = number();
      if (n < 1) fail("weight index must be >= 1");
      std::vector<TreeFunctional> kids;
      for (;;) {
        ws();
        if (pos < s.size() && s[pos] == ')') {
          ++pos;
          break;
        }
        kids.push_back(parse());
      }
      if (kids.empty()) fail("node needs at least one child");
      return TreeFunctional::make_node(n, std::move(kids));
    }
    --pos;
    fail("expected 'l' or 'n'");
  }
};

}  // namespace

std::vector<LeafTerm> leaf_terms(const TreeFunctional& f) {
  std::vector<LeafTerm> out;
  std::vector<long> path;
  leaf_terms_rec(f, path, out);
  std::stable_sort(out.begin(), out.end(), [](const LeafTerm& a, const LeafTerm& b) { return a.coord < b.coord; });
  return out;
}

std::string to_sexpr(const TreeFunctional& f) {
  std::ostringstream os;
  sexpr_rec(f, os);
  return os.str();
}

TreeFunctional parse_sexpr(const std::string& text) {
  SexprParser p{text};
  TreeFunctional f = p.parse();
  p.ws();
  if (p.pos != text.size()) p.fail("unexpected trailing input");
  return f;
}

}  // namespace tsx
