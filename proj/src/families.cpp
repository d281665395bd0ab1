#include "tsx/families.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace tsx {

FamilyExpr FamilyExpr::A(int n) {
  if (n < 1) throw Error("InvalidFamily", "A_n needs n >= 1");
  FamilyExpr f;
  f.kind_ = Kind::A;
  f.n_ = n;
  return f;
}

FamilyExpr FamilyExpr::S(int n) {
  if (n < 0) throw Error("InvalidFamily", "S_n needs n >= 0");
  FamilyExpr f;
  f.kind_ = Kind::S;
  f.n_ = n;
  return f;
}

FamilyExpr FamilyExpr::compose(const FamilyExpr& outer, const FamilyExpr& inner) {
  FamilyExpr f;
  f.kind_ = Kind::Compose;
  f.outer_ = std::make_shared<const FamilyExpr>(outer);
  f.inner_ = std::make_shared<const FamilyExpr>(inner);
  return f;
}

std::string FamilyExpr::str() const {
  switch (kind_) {
    case Kind::A:
      return "A" + std::to_string(n_);
    case Kind::S:
      return "S" + std::to_string(n_);
    case Kind::Compose: {
      std::string in = inner_->str();
      return outer_->str() + "[" + in + "]";
    }
  }
  return "";
}

namespace {

struct FamilyParser {
  const std::string& s;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error("ParseError", "family expression, position " + std::to_string(pos) + ": " + what);
  }

  FamilyExpr atom() {
    if (pos >= s.size()) fail("expected 'A' or 'S'");
    char c = s[pos];
    if (c != 'A' && c != 'S') fail(std::string("expected 'A' or 'S', found '") + c + "'");
    ++pos;
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (start == pos) fail("expected an index");
    if (pos - start > 6) fail("index too large");
    int n = std::stoi(s.substr(start, pos - start));
    if (c == 'A' && n < 1) {
      pos = start;
      fail("A_n needs n >= 1");
    }
    return c == 'A' ? FamilyExpr::A(n) : FamilyExpr::S(n);
  }

  FamilyExpr expr() {
    FamilyExpr f = atom();
    while (pos < s.size() && s[pos] == '[') {
      ++pos;
      FamilyExpr in = expr();
      if (pos >= s.size() || s[pos] != ']') fail("expected ']'");
      ++pos;
      f = FamilyExpr::compose(f, in);
    }
    return f;
  }
};

}  // namespace

FamilyExpr FamilyExpr::parse(const std::string& text) {
  FamilyParser p{text};
  FamilyExpr f = p.expr();
  if (p.pos != text.size()) p.fail("unexpected trailing input");
  return f;
}

bool is_successive(const std::vector<FiniteSet>& sets) {
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].empty()) return false;
    for (std::size_t j = 1; j < sets[i].size(); ++j)
      if (sets[i][j] <= sets[i][j - 1]) return false;
    if (i > 0 && sets[i - 1].back() >= sets[i].front()) return false;
  }
  return true;
}

namespace {

using Span = std::pair<std::size_t, std::size_t>;  // [first, last) into a set

bool member_span(const FamilyExpr& f, const FiniteSet& s, std::size_t b, std::size_t e);

// greedy longest-prefix split of s[b,e) into inner-family pieces
std::vector<Span> greedy_pieces(const FamilyExpr& inner, const FiniteSet& s, std::size_t b, std::size_t e) {
  std::vector<Span> out;
  while (b < e) {
    // membership of s[b, b+len) is monotone in len
    std::size_t lo = 1, hi = e - b;
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo + 1) / 2;
      if (member_span(inner, s, b, b + mid))
        lo = mid;
      else
        hi = mid - 1;
    }
    out.emplace_back(b, b + lo);
    b += lo;
  }
  return out;
}

bool member_span(const FamilyExpr& f, const FiniteSet& s, std::size_t b, std::size_t e) {
  std::size_t len = e - b;
  if (len == 0) return true;
  switch (f.kind()) {
    case FamilyExpr::Kind::A:
      return len <= static_cast<std::size_t>(f.n());
    case FamilyExpr::Kind::S: {
      if (f.n() == 0) return len <= 1;
      if (f.n() == 1) return static_cast<Coord>(len) <= s[b];
      if (static_cast<Coord>(len) <= s[b]) return true;  // already in S_1
      auto pieces = greedy_pieces(FamilyExpr::S(f.n() - 1), s, b, e);
      return static_cast<Coord>(pieces.size()) <= s[b];
    }
    case FamilyExpr::Kind::Compose: {
      auto pieces = greedy_pieces(f.inner(), s, b, e);
      FiniteSet minima;
      for (auto& p : pieces) minima.push_back(s[p.first]);
      return member_span(f.outer(), minima, 0, minima.size());
    }
  }
  return false;
}

bool strictly_increasing(const FiniteSet& s) {
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] <= s[i - 1]) return false;
  return true;
}

Decomposition decompose_span(const FamilyExpr& f, const FiniteSet& s, std::size_t b, std::size_t e) {
  Decomposition d;
  d.set.assign(s.begin() + b, s.begin() + e);
  FamilyExpr inner = f;
  switch (f.kind()) {
    case FamilyExpr::Kind::A:
      return d;
    case FamilyExpr::Kind::S:
      if (f.n() == 0) return d;
      inner = FamilyExpr::S(f.n() - 1);
      break;
    case FamilyExpr::Kind::Compose:
      inner = f.inner();
      break;
  }
  for (auto& p : greedy_pieces(inner, s, b, e)) d.pieces.push_back(decompose_span(inner, s, p.first, p.second));
  return d;
}

}  // namespace

bool is_member(const FamilyExpr& family, const FiniteSet& set) {
  if (!strictly_increasing(set)) throw Error("InvalidSet", "set must be strictly increasing");
  if (!set.empty() && set.front() < 1) throw Error("InvalidSet", "coordinates are 1-based");
  return member_span(family, set, 0, set.size());
}

std::size_t longest_member_prefix(const FamilyExpr& family, const FiniteSet& set, std::size_t from) {
  if (from >= set.size()) return 0;
  auto p = greedy_pieces(family, set, from, set.size());
  return p.front().second - p.front().first;
}

bool is_admissible(const FamilyExpr& family, const std::vector<FiniteSet>& sets) {
  if (!is_successive(sets)) throw Error("NonSuccessive", "sets are empty, overlapping or out of order");
  FiniteSet minima;
  for (auto& s : sets) minima.push_back(s.front());
  return is_member(family, minima);
}

std::optional<Decomposition> decompose(const FamilyExpr& family, const FiniteSet& set) {
  if (!is_member(family, set)) return std::nullopt;
  return decompose_span(family, set, 0, set.size());
}

namespace {

struct Cand {
  bool valid = false;
  Scalar value;
  FiniteSet set;
};

bool better(const Cand& a, const Cand& b) {
  if (!a.valid) return false;
  if (!b.valid) return true;
  if (a.value != b.value) return a.value > b.value;
  if (a.set.size() != b.set.size()) return a.set.size() < b.set.size();
  return a.set < b.set;
}

Cand join(const Cand& a, const Cand& b) {
  if (!a.valid || !b.valid) return {};
  Cand c{true, a.value + b.value, a.set};
  c.set.insert(c.set.end(), b.set.begin(), b.set.end());
  return c;
}

// best member inside positions [a, b] of a sorted coordinate list; first part starts at a
struct WTable {
  virtual ~WTable() = default;
  virtual Cand full(int a, int b) = 0;
};

struct UnitW : WTable {
  const std::vector<Coord>& c;
  const std::vector<Scalar>& w;
  std::map<std::pair<int, int>, Cand> memo;
  UnitW(const std::vector<Coord>& c_, const std::vector<Scalar>& w_) : c(c_), w(w_) {}
  Cand full(int a, int b) override {
    auto key = std::make_pair(a, b);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Cand best;
    for (int i = a; i <= b; ++i) {
      Cand x{true, w[i], {c[i]}};
      if (better(x, best)) best = x;
    }
    return memo[key] = best;
  }
};

// partitions into at most bound(a) consecutive parts over a base table
struct CountW : WTable {
  WTable& base;
  std::function<long(int)> bound;
  std::map<std::tuple<long, int, int>, Cand> memo;
  CountW(WTable& b, std::function<long(int)> f) : base(b), bound(std::move(f)) {}
  Cand counted(long k, int a, int b) {
    k = std::min<long>(k, b - a + 1);
    auto key = std::make_tuple(k, a, b);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Cand best = base.full(a, b);
    if (k >= 2)
      for (int m = a; m < b; ++m) {
        Cand x = join(base.full(a, m), counted(k - 1, m + 1, b));
        if (better(x, best)) best = x;
      }
    return memo[key] = best;
  }
  Cand full(int a, int b) override { return counted(bound(a), a, b); }
};

struct WBuilder {
  const std::vector<Coord>& c;
  std::vector<std::unique_ptr<WTable>> owned;
  WTable* make(const FamilyExpr& f, WTable* base) {
    switch (f.kind()) {
      case FamilyExpr::Kind::A: {
        long n = f.n();
        owned.push_back(std::make_unique<CountW>(*base, [n](int) { return n; }));
        return owned.back().get();
      }
      case FamilyExpr::Kind::S: {
        WTable* t = base;
        for (int i = 0; i < f.n(); ++i) {
          const auto& cc = c;
          owned.push_back(std::make_unique<CountW>(*t, [&cc](int a) { return static_cast<long>(cc[a]); }));
          t = owned.back().get();
        }
        return t;
      }
      case FamilyExpr::Kind::Compose:
        return make(f.outer(), make(f.inner(), base));
    }
    return base;
  }
};

}  // namespace

WeightedSubset max_weight_subset(const FamilyExpr& family, const std::map<Coord, Scalar>& weights) {
  std::vector<Coord> c;
  std::vector<Scalar> w;
  for (auto& [k, v] : weights) {
    if (k < 1) throw Error("InvalidSet", "coordinates are 1-based");
    if (v.sign() < 0) throw Error("InvalidWeights", "weights must be nonnegative");
    if (v.sign() > 0) {
      c.push_back(k);
      w.push_back(v);
    }
  }
  WeightedSubset out{{}, Scalar(0)};
  if (c.empty()) return out;
  int L = static_cast<int>(c.size());
  if (family.kind() == FamilyExpr::Kind::S && family.n() <= 1) {
    // S_0: best singleton; S_1: min at i plus the heaviest coord[i]-1 later points
    Cand best;
    std::vector<int> order(L);
    for (int i = 0; i < L; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return w[x] > w[y]; });
    for (int i = 0; i < L; ++i) {
      Cand x{true, w[i], {c[i]}};
      long room = family.n() == 0 ? 0 : c[i] - 1;
      for (int j : order) {
        if (room <= 0) break;
        if (j <= i) continue;
        x.value += w[j];
        x.set.push_back(c[j]);
        --room;
      }
      std::sort(x.set.begin(), x.set.end());
      if (better(x, best)) best = x;
    }
    return {best.set, best.value};
  }
  UnitW unit(c, w);
  WBuilder b{c, {}};
  WTable* t = b.make(family, &unit);
  Cand best;
  for (int s = 0; s < L; ++s) {
    Cand x = t->full(s, L - 1);
    if (better(x, best)) best = x;
  }
  return {best.set, best.value};
}

FiniteSet maximal_member(const FamilyExpr& family, Coord start) {
  if (start < 1) throw Error("InvalidSet", "start must be >= 1");
  constexpr long kCap = 1L << 22;
  auto run = [start](long len) {
    FiniteSet s(static_cast<std::size_t>(len));
    for (long i = 0; i < len; ++i) s[i] = start + i;
    return s;
  };
  long lo = 1, hi = 2;
  while (is_member(family, run(hi))) {
    lo = hi;
    if (hi >= kCap) throw Error("Unbounded", "no finite maximal consecutive member below the enumeration cap");
    hi *= 2;
  }
  // run(lo) is a member, run(hi) is not
  while (hi - lo > 1) {
    long mid = lo + (hi - lo) / 2;
    if (is_member(family, run(mid)))
      lo = mid;
    else
      hi = mid;
  }
  return run(lo);
}

std::string set_str(const FiniteSet& s) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << "}";
  return os.str();
}

FiniteSet parse_set(const std::string& text) {
  FiniteSet out;
  std::string cur;
  auto flush = [&](std::size_t pos) {
    if (cur.empty()) return;
    try {
      std::size_t used = 0;
      long v = std::stol(cur, &used);
      if (used != cur.size()) throw std::invalid_argument(cur);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error("ParseError", "set, position " + std::to_string(pos) + ": bad coordinate '" + cur + "'");
    }
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (ch == '{' || ch == '}' || ch == ' ') continue;
    if (ch == ',') {
      flush(i);
      continue;
    }
    cur += ch;
  }
  flush(text.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 1) throw Error("ParseError", "set: coordinates are 1-based");
    if (i && out[i] <= out[i - 1]) throw Error("ParseError", "set: coordinates must be strictly increasing");
  }
  return out;
}

}  // namespace tsx
