#include "tsx/surgery.hpp"

#include "tsx/norm.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace tsx {
namespace {

std::vector<TreeFunctional> split_rec(const SpaceSpec& x, const TreeFunctional& f) {
  if (f.leaf) return {f};
  std::vector<TreeFunctional> parts;
  for (auto& c : f.children) {
    auto sub = split_rec(x, c);
    for (auto& p : sub) parts.push_back(std::move(p));
  }
  FiniteSet minima;
  for (auto& p : parts) minima.push_back(p.min_coord());
  const FamilyExpr fam = x.level_family(f.weight_index);
  std::vector<TreeFunctional> out;
  std::size_t from = 0;
  while (from < parts.size()) {
    std::size_t len = longest_member_prefix(fam, minima, from);
    if (len == 0) throw Error("Internal", "singleton not admissible during split");
    std::vector<TreeFunctional> group(parts.begin() + from, parts.begin() + from + len);
    out.push_back(TreeFunctional::make_node(f.weight_index, std::move(group)));
    from += len;
  }
  return out;
}

using Key = std::tuple<Coord, int, std::vector<long>>;

std::vector<Key> keys(const std::vector<LeafTerm>& terms) {
  std::vector<Key> k;
  for (auto& t : terms) k.emplace_back(t.coord, t.sign, t.path);
  std::sort(k.begin(), k.end());
  return k;
}

TreeFunctional match_signs(const TreeFunctional& f, const SparseVector& v) {
  if (f.leaf) {
    int s = v.at(f.coord).sign();
    return TreeFunctional::make_leaf(s < 0 ? -1 : (s > 0 ? 1 : f.sign), f.coord);
  }
  std::vector<TreeFunctional> kids;
  for (auto& c : f.children) kids.push_back(match_signs(c, v));
  return TreeFunctional::make_node(f.weight_index, std::move(kids));
}

bool subset_of(const FiniteSet& a, const FiniteSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

bool meets(const FiniteSet& a, const FiniteSet& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    if (a[i] < b[j]) ++i;
    else ++j;
  }
  return false;
}

FiniteSet minus(const FiniteSet& a, const FiniteSet& b) {
  FiniteSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// ---- S-type: split children at covered blocks, giving an X_3 functional ----

struct BlockSets {
  std::vector<FiniteSet> traces;  // supp v_n within supp f
};

TreeFunctional to_x3(const TreeFunctional& t, const BlockSets& bs) {
  if (t.leaf) return t;
  const FiniteSet st = t.support();
  std::vector<int> covered;
  for (std::size_t n = 0; n < bs.traces.size(); ++n) {
    const FiniteSet& s = bs.traces[n];
    if (s.empty() || !subset_of(s, st)) continue;
    bool in_child = false;
    for (auto& c : t.children)
      if (subset_of(s, c.support())) in_child = true;
    if (!in_child) covered.push_back(static_cast<int>(n));
  }
  std::vector<TreeFunctional> kids;
  for (auto& r : t.children) {
    const FiniteSet sr = r.support();
    std::vector<FiniteSet> pieces;
    FiniteSet rest = sr;
    for (int n : covered) {
      if (!meets(sr, bs.traces[n])) continue;
      FiniteSet piece;
      std::set_intersection(sr.begin(), sr.end(), bs.traces[n].begin(), bs.traces[n].end(),
                            std::back_inserter(piece));
      rest = minus(rest, piece);
      pieces.push_back(std::move(piece));
    }
    if (!rest.empty()) pieces.push_back(rest);
    std::sort(pieces.begin(), pieces.end(), [](const FiniteSet& a, const FiniteSet& b) { return a.front() < b.front(); });
    if (!is_successive(pieces)) throw Error("Internal", "block pieces of a child interleave");
    for (auto& p : pieces) kids.push_back(to_x3(*restrict_functional(r, p), bs));
  }
  return TreeFunctional::make_node(t.weight_index, std::move(kids));
}

// X_k over the same weights: S-type spaces get inner A_k, single S_n spaces use S_n[A_k]
std::optional<SpaceSpec> with_inner_k(const SpaceSpec& space, int k) {
  if (space.kind == SpaceSpec::Kind::S && !space.inner_ak) return space.with_inner(k);
  if (space.kind == SpaceSpec::Kind::Single && space.single_family->kind() == FamilyExpr::Kind::S) {
    SpaceSpec x = space;
    x.single_family = FamilyExpr::compose(*space.single_family, FamilyExpr::A(k));
    return x;
  }
  return std::nullopt;
}

// inverse of with_inner_k
std::optional<std::pair<SpaceSpec, int>> inner_base(const SpaceSpec& space) {
  if (space.kind == SpaceSpec::Kind::S && space.inner_ak) return std::make_pair(space.without_inner(), *space.inner_ak);
  if (space.kind == SpaceSpec::Kind::Single && space.single_family->kind() == FamilyExpr::Kind::Compose &&
      space.single_family->outer().kind() == FamilyExpr::Kind::S &&
      space.single_family->inner().kind() == FamilyExpr::Kind::A) {
    SpaceSpec x = space;
    x.single_family = space.single_family->outer();
    return std::make_pair(x, space.single_family->inner().n());
  }
  return std::nullopt;
}

std::optional<TreeFunctional> s_type_surgery(const SpaceSpec& space, const TreeFunctional& f,
                                             const std::vector<SparseVector>& blocks, const SparseVector& v) {
  auto x3 = with_inner_k(space, 3);
  if (!x3) return std::nullopt;
  BlockSets bs;
  const FiniteSet sf = f.support();
  for (auto& b : blocks) {
    FiniteSet tr;
    FiniteSet sb = b.support();
    std::set_intersection(sf.begin(), sf.end(), sb.begin(), sb.end(), std::back_inserter(tr));
    bs.traces.push_back(std::move(tr));
  }
  TreeFunctional g = to_x3(f, bs);
  if (!validate(*x3, g).empty()) return std::nullopt;
  auto parts = split_xk(*x3, g);
  const TreeFunctional* best = nullptr;
  Scalar best_v;
  for (auto& p : parts) {
    Scalar pv = eval_functional(space, p, v);
    if (!best || definitely_greater(pv, best_v)) {
      best = &p;
      best_v = pv;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

// ---- A-type: case surgery at the covering node of each straddled block ----

TreeFunctional* cover_node(TreeFunctional& t, const FiniteSet& s) {
  TreeFunctional* cur = &t;
  for (;;) {
    if (cur->leaf) return cur;
    TreeFunctional* next = nullptr;
    for (auto& c : cur->children)
      if (subset_of(s, c.support())) next = &c;
    if (!next) return cur;
    cur = next;
  }
}

// one edit for block `b` at its covering node; false when nothing straddles it
bool a_type_step(const SpaceSpec& space, TreeFunctional& root, const SparseVector& vb) {
  const FiniteSet sb = vb.support();
  FiniteSet trace;
  const FiniteSet sf = root.support();
  std::set_intersection(sf.begin(), sf.end(), sb.begin(), sb.end(), std::back_inserter(trace));
  if (trace.empty()) return false;
  TreeFunctional* t = cover_node(root, trace);
  if (t->leaf) return false;
  auto& kids = t->children;
  std::vector<std::size_t> meet;
  for (std::size_t i = 0; i < kids.size(); ++i)
    if (meets(kids[i].support(), sb)) meet.push_back(i);
  if (meet.empty()) return false;
  const std::size_t first = meet.front(), last = meet.back();
  const bool left = kids[first].min_coord() < sb.front();
  const bool right = kids[last].max_coord() > sb.back();
  if (!left && !right) return false;

  auto part_in = [&](const TreeFunctional& c) { return restrict_functional(c, sb); };
  auto part_out = [&](const TreeFunctional& c) {
    return restrict_functional(c, [&](Coord k) { return !std::binary_search(sb.begin(), sb.end(), k); });
  };
  auto value = [&](const TreeFunctional& c) { return eval_functional(space, c, vb); };

  std::vector<std::size_t> inside;
  for (std::size_t i : meet)
    if (subset_of(kids[i].support(), sb)) inside.push_back(i);

  std::vector<TreeFunctional> next;
  if (!inside.empty()) {
    std::size_t cut = left ? first : last;
    std::size_t weakest = inside.front();
    for (std::size_t i : inside)
      if (definitely_greater(value(kids[weakest]), value(kids[i]))) weakest = i;
    auto in = part_in(kids[cut]);
    auto out = part_out(kids[cut]);
    const bool swap = in && !definitely_greater(value(kids[weakest]), value(*in));
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i == cut) {
        if (swap && !left && in) next.push_back(*in);
        if (out) next.push_back(*out);
        if (swap && left && in) next.push_back(*in);
      } else if (!(swap && i == weakest)) {
        next.push_back(kids[i]);
      }
    }
  } else {
    // two children, both sticking out: keep the larger trace
    auto a = part_in(kids[first]);
    auto b = part_in(kids[last]);
    const bool drop_first = a && b && definitely_greater(value(*b), value(*a));
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if ((i == first && drop_first) || (i == last && !drop_first && i != first)) {
        if (auto out = part_out(kids[i])) next.push_back(*out);
      } else {
        next.push_back(kids[i]);
      }
    }
  }
  kids = std::move(next);
  return true;
}

std::optional<TreeFunctional> a_type_surgery(const SpaceSpec& space, const TreeFunctional& f,
                                             const std::vector<SparseVector>& blocks) {
  TreeFunctional g = f;
  const std::size_t cap = 8 * (f.node_count() + blocks.size()) + 16;
  for (std::size_t it = 0; it < cap; ++it) {
    bool edited = false;
    for (auto& b : blocks)
      if (a_type_step(space, g, b)) {
        edited = true;
        break;
      }
    if (!edited) return g;
  }
  return std::nullopt;
}

bool a_like(const SpaceSpec& space) {
  if (space.kind == SpaceSpec::Kind::A) return true;
  return space.kind == SpaceSpec::Kind::Single && space.single_family->kind() == FamilyExpr::Kind::A;
}

}  // namespace

std::vector<TreeFunctional> split_xk(const SpaceSpec& space, const TreeFunctional& f) {
  auto v = validate(space, f);
  if (!v.empty()) throw Error("InvalidInput", "functional is not valid: " + v.front().path + ": " + v.front().reason);
  auto base = inner_base(space);
  if (!base) return {f};
  auto parts = split_rec(base->first, f);
  if (static_cast<int>(parts.size()) > base->second + 1)
    throw Error("Internal", "split produced more than k+1 parts");
  return parts;
}

bool same_leaf_multiset(const std::vector<TreeFunctional>& parts, const TreeFunctional& f) {
  std::vector<LeafTerm> all;
  for (auto& p : parts) {
    auto t = leaf_terms(p);
    all.insert(all.end(), t.begin(), t.end());
  }
  return keys(all) == keys(leaf_terms(f));
}

ComparableResult make_comparable_ex(const SpaceSpec& space, const TreeFunctional& f,
                                    const std::vector<SparseVector>& blocks) {
  auto viol = validate(space, f);
  if (!viol.empty())
    throw Error("InvalidInput", "functional is not valid: " + viol.front().path + ": " + viol.front().reason);
  if (blocks.empty()) throw Error("InvalidInput", "no blocks");
  if (!is_block_sequence(blocks)) throw Error("NonSuccessive", "blocks must be successive and nonzero");
  const SparseVector v = sum(blocks).in_mode(space.arithmetic);
  ComparableResult res;
  res.constant = a_like(space) ? 6 : 4;
  res.before = eval_functional(space, f, v);
  if (res.before.sign() >= 0 && is_comparable(f, blocks)) {
    res.f = f;
    res.method = "unchanged";
    res.after = res.before;
    return res;
  }
  const Scalar c = Scalar(res.constant).in_mode(space.arithmetic);
  auto accept = [&](const TreeFunctional& g) {
    return validate(space, g).empty() && is_comparable(g, blocks) &&
           approx_le(res.before, c * eval_functional(space, g, v));
  };

  auto restricted = restrict_functional(f, v.support());
  if (!restricted) {
    const auto& e = v.entries().front();
    res.f = TreeFunctional::make_leaf(e.second.sign() < 0 ? -1 : 1, e.first);
    res.method = "surgery";
    res.after = eval_functional(space, res.f, v);
    return res;
  }
  const TreeFunctional g = match_signs(*restricted, v);
  std::optional<TreeFunctional> cand =
      a_like(space) ? a_type_surgery(space, g, blocks) : s_type_surgery(space, g, blocks, v);
  if (cand && accept(*cand)) {
    res.f = *cand;
    res.method = "surgery";
  } else {
    res.f = comparable_best(space, blocks).witness;
    res.method = "dp";
  }
  res.after = eval_functional(space, res.f, v);
  return res;
}

TreeFunctional make_comparable(const SpaceSpec& space, const TreeFunctional& f,
                               const std::vector<SparseVector>& blocks) {
  return make_comparable_ex(space, f, blocks).f;
}

}  // namespace tsx
