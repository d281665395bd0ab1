#include "tsx/norm.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <unordered_map>

namespace tsx {
namespace {

struct Val {
  bool ok = false;
  Scalar v;
};

inline bool better(const Val& cand, const Val& cur) {
  return cand.ok && (!cur.ok || definitely_greater(cand.v, cur.v));
}

inline Val sum(const Val& a, const Val& b) {
  if (!a.ok || !b.ok) return {};
  return {true, a.v + b.v};
}

using Runs = std::vector<std::pair<int, int>>;

// Values of "sequences of runs of the support whose starting coordinates form a
// member of some family", each run scored by the table below it.
struct Table {
  virtual ~Table() = default;
  virtual Val full(int a, int b) = 0;
  // at least two runs, or a non-trivial split in some lower table
  virtual Val strict(int a, int b) = 0;
  virtual void runs(int a, int b, bool strict, Runs& out) = 0;
};

class Engine;

struct UnitTable : Table {
  explicit UnitTable(Engine& e) : e(e) {}
  Val full(int a, int b) override;
  Val strict(int, int) override { return {}; }
  void runs(int a, int b, bool, Runs& out) override { out.emplace_back(a, b); }
  Engine& e;
};

// at most c successive runs, each scored by base.full
class CountTable {
 public:
  CountTable(Table& base, int len) : base_(base), len_(len) {}

  Val full(long c, int a, int b) { return get(c, a, b, false).v; }
  Val strict(long c, int a, int b) { return get(c, a, b, true).v; }

  void runs(long c, int a, int b, bool strict, Runs& out) {
    const Entry& e = get(c, a, b, strict);
    long cc = clamp(c, a, b);
    if (e.choice < 0) {
      base_.runs(a, b, strict, out);
      return;
    }
    base_.runs(a, e.choice, false, out);
    runs(cc - 1, e.choice + 1, b, false, out);
  }

 private:
  struct Entry {
    Val v;
    int choice = -1;
  };

  long clamp(long c, int a, int b) const { return std::min<long>(c, b - a + 1); }

  const Entry& get(long c, int a, int b, bool strict) {
    long cc = clamp(c, a, b);
    auto& memo = strict ? strict_ : full_;
    const std::uint64_t n = static_cast<std::uint64_t>(len_) + 1;
    const std::uint64_t key = (static_cast<std::uint64_t>(cc) * n + a) * n + b;
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Entry e;
    e.v = strict ? base_.strict(a, b) : base_.full(a, b);
    if (cc >= 2) {
      for (int m = a; m < b; ++m) {
        Val cand = sum(base_.full(a, m), full(cc - 1, m + 1, b));
        if (better(cand, e.v)) {
          e.v = cand;
          e.choice = m;
        }
      }
    }
    return memo.emplace(key, std::move(e)).first->second;
  }

  Table& base_;
  int len_;
  std::unordered_map<std::uint64_t, Entry> full_, strict_;
};

struct FixedView : Table {
  FixedView(CountTable& ct, long c) : ct(ct), c(c) {}
  Val full(int a, int b) override { return ct.full(c, a, b); }
  Val strict(int a, int b) override { return ct.strict(c, a, b); }
  void runs(int a, int b, bool s, Runs& out) override { ct.runs(c, a, b, s, out); }
  CountTable& ct;
  long c;
};

// at most min-coordinate many runs: the Schreier condition
struct SchreierView : Table {
  SchreierView(CountTable& ct, const std::vector<Coord>& coords) : ct(ct), coords(coords) {}
  Val full(int a, int b) override { return ct.full(coords[a], a, b); }
  Val strict(int a, int b) override { return ct.strict(coords[a], a, b); }
  void runs(int a, int b, bool s, Runs& out) override { ct.runs(coords[a], a, b, s, out); }
  CountTable& ct;
  const std::vector<Coord>& coords;
};

class Engine {
 public:
  enum class Choice { Leaf, Skip, Level, Base };

  Engine(const SpaceSpec& space, const SparseVector& x, const std::vector<int>* block_of = nullptr,
         Engine* base = nullptr)
      : space_(space), block_of_(block_of), base_(base), unit_(*this) {
    const Arithmetic mode = space.arithmetic;
    for (const auto& [k, v] : x.entries()) {
      coords_.push_back(k);
      abs_.push_back(v.abs().in_mode(mode));
      sign_.push_back(v.sign() < 0 ? -1 : 1);
    }
    len_ = static_cast<int>(coords_.size());
    prefix_.assign(len_ + 1, Scalar(0).in_mode(mode));
    for (int i = 0; i < len_; ++i) prefix_[i + 1] = prefix_[i] + abs_[i];
    memo_.resize(static_cast<std::size_t>(len_) * len_);
    if (block_of_) {
      block_start_.assign(len_, false);
      block_end_.assign(len_, false);
      for (int i = 0; i < len_; ++i) {
        block_start_[i] = i == 0 || (*block_of_)[i - 1] != (*block_of_)[i];
        block_end_[i] = i + 1 == len_ || (*block_of_)[i + 1] != (*block_of_)[i];
      }
    }
  }

  int len() const { return len_; }
  long max_n() const { return max_n_; }

  void solve_all() {
    for (int l = 1; l <= len_; ++l)
      for (int a = 0; a + l <= len_; ++a) norm(a, a + l - 1);
  }

  const Scalar& norm(int a, int b) {
    Node& nd = memo_[idx(a, b)];
    if (!nd.done) compute(a, b, nd);
    return nd.value;
  }

  Val unit(int a, int b) {
    if (!block_of_) return {true, norm(a, b)};
    if ((*block_of_)[a] == (*block_of_)[b]) return {true, base_->norm(a, b)};
    if (block_start_[a] && block_end_[b]) return {true, norm(a, b)};
    return {};
  }

  TreeFunctional unit_witness(int a, int b) {
    if (block_of_ && (*block_of_)[a] == (*block_of_)[b]) return base_->witness(a, b);
    return witness(a, b);
  }

  TreeFunctional witness(int a, int b) {
    norm(a, b);
    const Node& nd = memo_[idx(a, b)];
    switch (nd.choice) {
      case Choice::Leaf:
        return TreeFunctional::make_leaf(sign_[nd.arg], coords_[nd.arg]);
      case Choice::Skip:
        return witness(a + 1, b);
      case Choice::Base:
        return base_->witness(a, b);
      case Choice::Level: {
        Runs rs;
        level_table(nd.arg)->runs(a, b, true, rs);
        std::vector<TreeFunctional> kids;
        for (auto [s, e] : rs) kids.push_back(unit_witness(s, e));
        return TreeFunctional::make_node(nd.arg, std::move(kids));
      }
    }
    return {};
  }

  // the first index not explored at the root, with its bound theta_n * ||x||_1
  Scalar root_cutoff() const { return root_cutoff_; }

  Table* table_for(const FamilyExpr& f) { return build(f, &unit_); }

  Table* level_table(long n) {
    auto it = levels_.find(n);
    if (it != levels_.end()) return it->second;
    Table* t = table_for(space_.level_family(n));
    levels_[n] = t;
    return t;
  }

  const Scalar& theta(long n) {
    while (static_cast<long>(thetas_.size()) < n) thetas_.push_back(space_.weight(thetas_.size() + 1));
    return thetas_[n - 1];
  }

  const std::vector<Coord>& coords() const { return coords_; }

 private:
  struct Node {
    bool done = false;
    Scalar value;
    Choice choice = Choice::Leaf;
    long arg = 0;
  };

  std::size_t idx(int a, int b) const { return static_cast<std::size_t>(a) * len_ + b; }

  void compute(int a, int b, Node& nd) {
    nd.done = true;
    if (block_of_ && (*block_of_)[a] == (*block_of_)[b]) {
      nd.value = base_->norm(a, b);
      nd.choice = Choice::Base;
      return;
    }
    int arg = a;
    for (int i = a + 1; i <= b; ++i)
      if (definitely_greater(abs_[i], abs_[arg])) arg = i;
    Scalar best = abs_[arg];
    Choice choice = Choice::Leaf;
    long carg = arg;

    const Scalar l1 = prefix_[b + 1] - prefix_[a];
    const long mono = space_.kind == SpaceSpec::Kind::Single ? 1 : space_.thetas.monotone_from();
    const int len = b - a + 1;
    Scalar cutoff = Scalar(0).in_mode(space_.arithmetic);
    for (long n = 1;; ++n) {
      if (space_.kind == SpaceSpec::Kind::Single && n > 1) break;
      if (space_.kind == SpaceSpec::Kind::A && n > std::max<long>(len, mono)) break;
      const Scalar& th = theta(n);
      if (n >= mono && approx_le(th * l1, best)) {
        cutoff = th * l1;
        break;
      }
      max_n_ = std::max(max_n_, n);
      Val s = level_table(n)->strict(a, b);
      if (s.ok) {
        Scalar cand = th * s.v;
        if (definitely_greater(cand, best)) {
          best = cand;
          choice = Choice::Level;
          carg = n;
        }
      }
    }
    if (a < b) {
      const Scalar& rest = norm(a + 1, b);
      if (definitely_greater(rest, best)) {
        best = rest;
        choice = Choice::Skip;
        carg = 0;
      }
    }
    Node& slot = memo_[idx(a, b)];
    slot.value = best;
    slot.choice = choice;
    slot.arg = carg;
    if (a == 0 && b == len_ - 1) root_cutoff_ = cutoff;
  }

  Table* build(const FamilyExpr& f, Table* base) {
    const auto key = std::make_pair(f.str(), base);
    auto it = built_.find(key);
    if (it != built_.end()) return it->second;
    Table* t = nullptr;
    switch (f.kind()) {
      case FamilyExpr::Kind::A:
        t = own(std::make_unique<FixedView>(counts(base), f.n()));
        break;
      case FamilyExpr::Kind::S:
        if (f.n() == 0) {
          t = base;
        } else {
          Table* below = build(FamilyExpr::S(f.n() - 1), base);
          t = own(std::make_unique<SchreierView>(counts(below), coords_));
        }
        break;
      case FamilyExpr::Kind::Compose:
        t = build(f.outer(), build(f.inner(), base));
        break;
    }
    built_[key] = t;
    return t;
  }

  CountTable& counts(Table* base) {
    auto it = counts_.find(base);
    if (it != counts_.end()) return *it->second;
    auto ct = std::make_unique<CountTable>(*base, len_);
    CountTable& ref = *ct;
    counts_[base] = std::move(ct);
    return ref;
  }

  Table* own(std::unique_ptr<Table> t) {
    views_.push_back(std::move(t));
    return views_.back().get();
  }

  const SpaceSpec& space_;
  const std::vector<int>* block_of_;
  Engine* base_;
  UnitTable unit_;
  std::vector<Coord> coords_;
  std::vector<Scalar> abs_, prefix_, thetas_;
  std::vector<int> sign_;
  std::vector<bool> block_start_, block_end_;
  int len_ = 0;
  long max_n_ = 0;
  Scalar root_cutoff_;
  std::vector<Node> memo_;
  std::map<long, Table*> levels_;
  std::map<std::pair<std::string, Table*>, Table*> built_;
  std::map<Table*, std::unique_ptr<CountTable>> counts_;
  std::vector<std::unique_ptr<Table>> views_;
};

Val UnitTable::full(int a, int b) { return e.unit(a, b); }

NormResult finish(Engine& eng, const SpaceSpec& space) {
  NormResult r;
  if (eng.len() == 0) {
    r.value = Scalar(0).in_mode(space.arithmetic);
    r.witness = TreeFunctional::make_leaf(1, 1);
    r.cutoff_bound = r.value;
    return r;
  }
  eng.solve_all();
  r.value = eng.norm(0, eng.len() - 1);
  r.witness = eng.witness(0, eng.len() - 1);
  r.max_n_explored = eng.max_n();
  r.cutoff_bound = eng.root_cutoff();
  return r;
}

}  // namespace

NormResult norm(const SpaceSpec& space, const SparseVector& x) {
  space.validate();
  if (x.empty()) throw Error("EmptyVector", "norm of the empty vector");
  Engine eng(space, x);
  return finish(eng, space);
}

Scalar norm_value(const SpaceSpec& space, const SparseVector& x) {
  if (x.empty()) return Scalar(0).in_mode(space.arithmetic);
  return norm(space, x).value;
}

AdmissibleSum admissible_sum(const SpaceSpec& space, const SparseVector& x, const FamilyExpr& family) {
  space.validate();
  AdmissibleSum out;
  out.value = Scalar(0).in_mode(space.arithmetic);
  if (x.empty()) throw Error("EmptyVector", "admissible sum of the empty vector");
  Engine eng(space, x);
  eng.solve_all();
  Table* t = eng.table_for(family);
  int best_s = -1;
  Val best;
  for (int s = 0; s < eng.len(); ++s) {
    Val v = t->full(s, eng.len() - 1);
    if (better(v, best)) {
      best = v;
      best_s = s;
    }
  }
  if (best_s < 0) return out;
  out.value = best.v;
  Runs rs;
  t->runs(best_s, eng.len() - 1, false, rs);
  for (auto [a, b] : rs) {
    FiniteSet part(eng.coords().begin() + a, eng.coords().begin() + b + 1);
    out.partition.push_back(std::move(part));
  }
  return out;
}

NormResult comparable_best(const SpaceSpec& space, const std::vector<SparseVector>& blocks) {
  space.validate();
  if (!is_block_sequence(blocks)) throw Error("NonSuccessive", "blocks must be successive and nonzero");
  SparseVector v = sum(blocks);
  std::vector<int> block_of;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = 0; j < blocks[i].size(); ++j) block_of.push_back(static_cast<int>(i));
  Engine free_eng(space, v);
  Engine eng(space, v, &block_of, &free_eng);
  if (eng.len() > 0) free_eng.solve_all();
  return finish(eng, space);
}

// ---- exhaustive oracle ----

namespace {

class Brute {
 public:
  Brute(const SpaceSpec& space, const SparseVector& x, int depth_cap) : space_(space), cap_(depth_cap) {
    for (const auto& [k, v] : x.entries()) {
      coords_.push_back(k);
      abs_.push_back(v.abs().in_mode(space.arithmetic));
    }
    s_ = static_cast<int>(coords_.size());
    Scalar sup = Scalar(0).in_mode(space.arithmetic), l1 = sup;
    for (const auto& a : abs_) {
      sup = max(sup, a);
      l1 += a;
    }
    if (space.kind == SpaceSpec::Kind::Single) {
      levels_ = 1;
    } else {
      const long mono = space.thetas.monotone_from();
      long n = 1;
      while (!(n >= mono && space.weight(n) * l1 <= sup)) {
        if (space.kind == SpaceSpec::Kind::A && n >= std::max<long>(s_, mono)) break;
        ++n;
      }
      levels_ = n;
    }
    for (long n = 1; n <= levels_; ++n) {
      fams_.push_back(space.level_family(n));
      weights_.push_back(space.weight(n));
    }
  }

  Scalar run() { return value((1u << s_) - 1, cap_); }

 private:
  Scalar value(unsigned mask, int depth) {
    const auto key = std::make_pair(mask, depth);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Scalar best = Scalar(0).in_mode(space_.arithmetic);
    for (int i = 0; i < s_; ++i)
      if (mask >> i & 1) best = max(best, abs_[i]);
    if (depth > 0) {
      std::vector<int> elems;
      for (int i = 0; i < s_; ++i)
        if (mask >> i & 1) elems.push_back(i);
      std::vector<unsigned> parts;
      enumerate(elems, 0, parts, 0, depth, best);
    }
    memo_[key] = best;
    return best;
  }

  // every element of `elems` is dropped, appended to the open piece, or opens a new piece
  void enumerate(const std::vector<int>& elems, std::size_t i, std::vector<unsigned>& parts, unsigned open,
                 int depth, Scalar& best) {
    if (i == elems.size()) {
      if (open) parts.push_back(open);
      if (!parts.empty()) score(parts, depth, best);
      if (open) parts.pop_back();
      return;
    }
    const unsigned bit = 1u << elems[i];
    enumerate(elems, i + 1, parts, open, depth, best);
    if (open) enumerate(elems, i + 1, parts, open | bit, depth, best);
    if (open) parts.push_back(open);
    enumerate(elems, i + 1, parts, bit, depth, best);
    if (open) parts.pop_back();
  }

  void score(const std::vector<unsigned>& parts, int depth, Scalar& best) {
    FiniteSet minima;
    Scalar total = Scalar(0).in_mode(space_.arithmetic);
    for (unsigned p : parts) {
      int lo = 0;
      while (!(p >> lo & 1)) ++lo;
      minima.push_back(coords_[lo]);
      total += value(p, depth - 1);
    }
    for (long n = 1; n <= levels_; ++n) {
      if (!is_member(fams_[n - 1], minima)) continue;
      Scalar cand = weights_[n - 1] * total;
      if (cand > best) best = cand;
    }
  }

  const SpaceSpec& space_;
  int cap_;
  int s_ = 0;
  long levels_ = 1;
  std::vector<Coord> coords_;
  std::vector<Scalar> abs_;
  std::vector<FamilyExpr> fams_;
  std::vector<Scalar> weights_;
  std::map<std::pair<unsigned, int>, Scalar> memo_;
};

}  // namespace

Scalar brute_norm(const SpaceSpec& space, const SparseVector& x, int depth_cap) {
  space.validate();
  if (x.size() > kBruteSupportLimit)
    throw Error("SupportTooLarge", "brute_norm supports at most " + std::to_string(kBruteSupportLimit) +
                                       " coordinates, got " + std::to_string(x.size()));
  if (depth_cap < 0) throw Error("InvalidArgument", "depth_cap must be non-negative");
  Brute b(space, x, depth_cap);
  return b.run();
}

}  // namespace tsx
