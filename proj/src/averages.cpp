#include "tsx/averages.hpp"

#include "tsx/norm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace tsx {
namespace {

double lr_norm(const std::vector<double>& a, double r) {
  double s = 0;
  if (std::isinf(r)) {
    for (double v : a) s = std::max(s, std::fabs(v));
    return s;
  }
  for (double v : a) s += std::pow(std::fabs(v), r);
  return std::pow(s, 1.0 / r);
}

Scalar floor_scalar(const Scalar& s) {
  if (s.is_exact()) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), s.q().get_num_mpz_t(), s.q().get_den_mpz_t());
    return Scalar::exact(mpq_class(f));
  }
  return Scalar::real(std::floor(s.to_double()));
}

Scalar two_pow(long e, Arithmetic mode) { return pow(Scalar(2).in_mode(mode), static_cast<unsigned>(e)); }

Arithmetic mode_of(const Scalar& a, const Scalar& b) {
  return a.is_exact() && b.is_exact() ? Arithmetic::rational : Arithmetic::float64;
}

std::string fmt(double d) { return format_double(d); }

}  // namespace

// ---- l_r averages ----

EquivEstimate estimate_equiv_const(const SpaceSpec& space, const std::vector<SparseVector>& blocks, double r,
                                   std::uint64_t seed, std::size_t samples) {
  if (r < 1) throw Error("InvalidArgument", "r must be >= 1");
  if (!is_block_sequence(blocks)) throw Error("NonSuccessive", "blocks must be successive and nonzero");
  EquivEstimate est;
  const std::size_t m = blocks.size();
  auto probe = [&](const std::vector<long>& coeffs, const std::string& label) {
    std::vector<Scalar> a;
    std::vector<double> ad;
    bool any = false;
    for (long c : coeffs) {
      a.push_back(Scalar(static_cast<int>(c)).in_mode(space.arithmetic));
      ad.push_back(static_cast<double>(c));
      any = any || c != 0;
    }
    ++est.samples;
    if (!any) return;
    const double lhs = norm_value(space, linear_combination(a, blocks)).to_double();
    const double rhs = lr_norm(ad, r);
    const double ratio = std::max(lhs / rhs, rhs / lhs);
    if (ratio > est.c_est) {
      est.c_est = ratio;
      est.worst = label;
    }
  };
  probe(std::vector<long>(m, 1), "ones");
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<long> e(m, 0);
    e[k] = 1;
    probe(e, "unit");
  }
  std::mt19937_64 rng(seed);
  while (est.samples < samples) {
    std::vector<long> a(m);
    if (est.samples % 4 == 0) {
      for (auto& v : a) v = (rng() & 1) ? 1 : -1;
      probe(a, "signs");
    } else {
      for (auto& v : a) v = (rng() % 3 == 0) ? static_cast<long>(rng() % 9) - 4 : 0;
      probe(a, "sparse");
    }
  }
  return est;
}

LrAverage build_lr_average(const SpaceSpec& space, const std::vector<SparseVector>& pool, double r, std::size_t m,
                           std::uint64_t seed) {
  if (m == 0) throw Error("InvalidArgument", "length must be positive");
  if (pool.size() < m)
    throw Error("InsufficientPool", "pool has " + std::to_string(pool.size()) + " blocks, need " + std::to_string(m));
  std::vector<SparseVector> blocks(pool.begin(), pool.begin() + static_cast<long>(m));
  LrAverage out;
  SparseVector s = sum(blocks).in_mode(space.arithmetic);
  out.sum_norm = norm_value(space, s);
  out.x = s.scaled(Scalar(1).in_mode(space.arithmetic) / out.sum_norm);
  out.c_est = m == 1 ? 1.0 : estimate_equiv_const(space, blocks, r, seed).c_est;
  out.length = m;
  return out;
}

AuditReport check_lr_average_bounds(const SpaceSpec& space, const SparseVector& x, double c, double r, long big_m,
                                    std::size_t length) {
  if (big_m < 1) throw Error("InvalidArgument", "M must be >= 1");
  const double need = std::isinf(r) ? kInfinity : std::pow(2.0 * static_cast<double>(big_m), r);
  if (static_cast<double>(length) < need)
    throw Error("HypothesisViolated", "average length " + std::to_string(length) + " is below (2M)^r = " + fmt(need));
  AuditReport rep;
  rep.suite = "lr-average";
  rep.params = {{"C", fmt(c)}, {"r", fmt(r)}, {"M", std::to_string(big_m)}, {"N", std::to_string(length)}};
  const double inv_s = std::isinf(r) ? 1.0 : 1.0 - 1.0 / r;
  for (long j = 1; j <= big_m; ++j) {
    const double js = std::pow(static_cast<double>(j), inv_s);
    const double lo = js / (2 * c * c), hi = 2 * c * c * js;
    const AdmissibleSum a = admissible_sum(space, x, FamilyExpr::A(static_cast<int>(j)));
    const double v = a.value.to_double();
    ReportRow row;
    row.id = "j=" + std::to_string(j);
    row.values = {{"value", a.value.str()}, {"lower", fmt(lo)}, {"upper", fmt(hi)}};
    row.pass = v >= lo * (1 - kRelTol) && v <= hi * (1 + kRelTol);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

// ---- averaging trees ----

BlockPool BlockPool::basis(Coord start) {
  if (start < 1) throw Error("InvalidArgument", "pool start must be >= 1");
  BlockPool p;
  p.start_ = start;
  return p;
}

BlockPool BlockPool::list(std::vector<SparseVector> blocks) {
  if (!is_block_sequence(blocks)) throw Error("NonSuccessive", "pool blocks must be successive and nonzero");
  BlockPool p;
  p.basis_ = false;
  p.blocks_ = std::move(blocks);
  return p;
}

SparseVector BlockPool::next(Coord at_least, std::size_t* index) {
  if (basis_) {
    Coord k = std::max<Coord>(start_ + static_cast<Coord>(cursor_), at_least);
    cursor_ = static_cast<std::size_t>(k - start_) + 1;
    if (index) *index = cursor_ - 1;
    return SparseVector::basis(k);
  }
  while (cursor_ < blocks_.size() && blocks_[cursor_].min_coord() < at_least) ++cursor_;
  if (cursor_ >= blocks_.size()) throw Error("PoolExhausted", "block pool exhausted");
  if (index) *index = cursor_;
  return blocks_[cursor_++];
}

std::string BlockPool::describe() const {
  if (basis_) return "basis from " + std::to_string(start_);
  return "list of " + std::to_string(blocks_.size()) + " blocks";
}

std::vector<long> AveragingTree::sizes() const {
  std::vector<long> n;
  for (auto& l : levels) n.push_back(static_cast<long>(l.size()));
  return n;
}

Scalar size_bound(const AveragingTree& t, long i, long j) {
  const Arithmetic mode = mode_of(t.theta, t.epsilon);
  const Scalar base = Scalar(6).in_mode(mode) / (t.theta * t.epsilon);
  if (i == 1) return base * two_pow(2 + j, mode);
  const Coord prev = t.levels[j][i - 2].x.max_coord();
  return base * two_pow(1 + i + j, mode) * Scalar(static_cast<int>(prev));
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(BlockPool pool, AveragingTree& t, std::size_t budget) : pool_(std::move(pool)), t_(t), budget_(budget) {}

  void build(long j) {
    if (j == 0) {
      AvgNode leaf;
      std::size_t idx = 0;
      leaf.x = pool_.next(need_, &idx);
      leaf.pool_index = static_cast<long>(idx);
      need_ = 1;
      t_.levels[0].push_back(std::move(leaf));
      if (t_.levels[0].size() > budget_)
        throw Error("SizeOverflow", "leaf count exceeds budget " + std::to_string(budget_));
      return;
    }
    const long i = static_cast<long>(t_.levels[j].size()) + 1;
    Scalar bound = size_bound(t_, i, j) / t_.scale;
    if (bound >= Scalar(static_cast<int>(std::min<std::size_t>(budget_, 1u << 30))))
      throw Error("SizeOverflow", "node (" + std::to_string(i) + "," + std::to_string(j) + ") needs more than " +
                                      bound.str() + " children; leaf budget is " + std::to_string(budget_));
    long k = std::max<long>(2, static_cast<long>(floor_scalar(bound).to_double()) + 1);
    // every child contributes at least one leaf
    if (t_.levels[0].size() + static_cast<std::size_t>(k) > budget_)
      throw Error("SizeOverflow", "node (" + std::to_string(i) + "," + std::to_string(j) + ") needs " +
                                      std::to_string(k) + " children; leaf budget is " + std::to_string(budget_));
    // sibling minima must form an S_1 set: k <= min supp of the first child
    need_ = std::max<Coord>(need_, k);
    AvgNode node;
    node.k = k;
    node.first_child = static_cast<long>(t_.levels[j - 1].size()) + 1;
    std::vector<SparseVector> kids;
    for (long c = 0; c < k; ++c) {
      build(j - 1);
      kids.push_back(t_.levels[j - 1].back().x);
    }
    node.last_child = static_cast<long>(t_.levels[j - 1].size());
    node.x = sum(kids).scaled(Scalar::exact(1, k));
    t_.levels[j].push_back(std::move(node));
  }

 private:
  BlockPool pool_;
  AveragingTree& t_;
  std::size_t budget_;
  Coord need_ = 1;
};

}  // namespace

AveragingTree build_averaging_tree(BlockPool pool, int M, const Scalar& epsilon, const Scalar& theta,
                                   std::optional<Scalar> relaxed_scale, std::size_t leaf_budget) {
  if (M < 0) throw Error("InvalidArgument", "M must be >= 0");
  if (epsilon.sign() <= 0 || theta.sign() <= 0) throw Error("InvalidArgument", "epsilon and theta must be positive");
  AveragingTree t;
  t.M = M;
  t.epsilon = epsilon;
  t.theta = theta;
  if (relaxed_scale) {
    if (relaxed_scale->sign() <= 0) throw Error("InvalidArgument", "relaxation scale must be positive");
    t.exact = false;
    t.scale = *relaxed_scale;
  }
  t.levels.resize(M + 1);
  TreeBuilder b(std::move(pool), t, leaf_budget);
  b.build(M);
  return t;
}

TreeCheck check_averaging_tree(const AveragingTree& t) {
  TreeCheck ck;
  auto note = [&](const std::string& s) { ck.notes.push_back(s); };
  const auto n = t.sizes();
  bool c1 = static_cast<int>(n.size()) == t.M + 1 && n.back() == 1;
  for (std::size_t j = 1; c1 && j < n.size(); ++j)
    if (!(n[j] < n[j - 1])) c1 = false;
  if (!c1) note("level_sizes: level sizes are not 1 = N_M < ... < N_0");

  std::vector<SparseVector> leaves;
  bool c2 = true;
  for (std::size_t i = 0; i < t.levels[0].size(); ++i) {
    leaves.push_back(t.levels[0][i].x);
    if (i > 0 && t.levels[0][i].pool_index <= t.levels[0][i - 1].pool_index) c2 = false;
  }
  if (!is_block_sequence(leaves)) c2 = false;
  if (!c2) note("leaves: leaves are not a subsequence of the pool");

  bool c3 = true, c4 = true, c5 = true;
  for (int j = 1; j <= t.M; ++j) {
    long expect_first = 1;
    for (std::size_t ii = 0; ii < t.levels[j].size(); ++ii) {
      const AvgNode& nd = t.levels[j][ii];
      const long i = static_cast<long>(ii) + 1;
      const std::string where = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
      if (nd.first_child != expect_first || nd.last_child < nd.first_child ||
          nd.last_child > static_cast<long>(t.levels[j - 1].size())) {
        c3 = false;
        note("children: node " + where + " has a bad child interval");
        continue;
      }
      expect_first = nd.last_child + 1;
      std::vector<SparseVector> kids;
      for (long s = nd.first_child; s <= nd.last_child; ++s) kids.push_back(t.levels[j - 1][s - 1].x);
      const long k = static_cast<long>(kids.size());
      if (!is_block_sequence(kids) || k > kids.front().min_coord()) {
        c3 = false;
        note("children: children of " + where + " are not S_1-admissible");
      }
      SparseVector avg = sum(kids).scaled(Scalar::exact(1, k));
      bool same = avg.size() == nd.x.size();
      for (std::size_t e = 0; same && e < avg.size(); ++e)
        same = avg.entries()[e].first == nd.x.entries()[e].first &&
               approx_eq(avg.entries()[e].second, nd.x.entries()[e].second);
      if (nd.k != k || !same) {
        c4 = false;
        note("averaging: node " + where + " is not the uniform average of its children");
      }
      if (!(Scalar(static_cast<int>(k)) > size_bound(t, i, j))) {
        c5 = false;
        if (t.exact) note("size_bound: node " + where + " has k = " + std::to_string(k) + " <= " + size_bound(t, i, j).str());
      }
    }
    if (expect_first != static_cast<long>(t.levels[j - 1].size()) + 1) {
      c3 = false;
      note("children: level " + std::to_string(j - 1) + " is not covered by its parents");
    }
  }
  ck.conditions = {{"level_sizes", c1}, {"leaves", c2}, {"children", c3}, {"averaging", c4}, {"size_bound", c5}};
  ck.well_formed = c1 && c2 && c3 && c4;
  ck.conforming = c5;
  if (!t.exact && !c5) note("relaxed construction: size bounds intentionally not met");
  return ck;
}

AuditReport audit_tav(const SpaceSpec& space, const AveragingTree& tree, double delta) {
  AuditReport rep;
  rep.suite = "tav";
  const Arithmetic mode = space.arithmetic;
  Scalar theta1, theta;
  if (space.kind == SpaceSpec::Kind::Single) {
    theta1 = theta = space.single_theta.in_mode(mode);
  } else {
    theta1 = space.weight(1);
    theta = theta_limit(space.thetas, 64, mode);
  }
  rep.params = {{"M", std::to_string(tree.M)},
                {"theta_1", theta1.str()},
                {"theta", theta.str()},
                {"delta", fmt(delta)},
                {"conforming", tree.exact ? "true" : "false"},
                {"leaves", std::to_string(tree.leaf_count())}};
  const SparseVector x = tree.root().in_mode(mode);
  const Scalar nx = norm_value(space, x);
  const SparseVector y = x.scaled(Scalar(1).in_mode(mode) / nx);
  for (int j = 0; j <= tree.M; ++j) {
    Scalar value = j == 0 ? norm_value(space, y) : admissible_sum(space, y, FamilyExpr::S(j)).value;
    Scalar lo = theta1 * theta / Scalar(4).in_mode(mode);
    Scalar hi = Scalar(4).in_mode(mode) / (theta1 * theta);
    for (int e = 0; e < j; ++e) {
      lo = lo / theta;
      hi = hi / theta;
    }
    ReportRow row;
    row.id = "j=" + std::to_string(j);
    row.values = {{"value", value.str()}, {"lower", lo.str()}, {"upper", hi.str()}};
    row.pass = approx_le(lo, value) && approx_le(value, hi);
    rep.rows.push_back(std::move(row));
  }
  constexpr std::size_t kNodeRows = 64;
  for (int j = 1; j <= tree.M; ++j) {
    const double bound = std::pow((1 - delta) * theta.to_double(), j);
    for (std::size_t i = 0; i < tree.levels[j].size() && i < kNodeRows; ++i) {
      const Scalar v = norm_value(space, tree.levels[j][i].x.in_mode(mode));
      ReportRow row;
      row.id = "node(" + std::to_string(i + 1) + "," + std::to_string(j) + ")";
      row.values = {{"norm", v.str()}, {"lower", fmt(bound)}};
      row.pass = v.to_double() >= bound * (1 - kRelTol);
      row.counted = false;
      row.note = "theta lower bound; existence statement, informational";
      rep.rows.push_back(std::move(row));
    }
    if (tree.levels[j].size() > kNodeRows)
      rep.notes.push_back("node rows truncated at " + std::to_string(kNodeRows) + " per level");
  }
  if (!tree.exact) rep.notes.push_back("relaxed tree: regression record only, not a check of the corollary");
  return rep;
}

// ---- special convex combinations ----

namespace {

std::vector<Scalar> repeated_average(int j, const FiniteSet& f) {
  if (j == 0) return {Scalar(1)};
  const FamilyExpr inner = FamilyExpr::S(j - 1);
  std::vector<FiniteSet> pieces;
  for (std::size_t from = 0; from < f.size();) {
    std::size_t len = longest_member_prefix(inner, f, from);
    pieces.emplace_back(f.begin() + static_cast<long>(from), f.begin() + static_cast<long>(from + len));
    from += len;
  }
  std::vector<Scalar> out;
  const Scalar share = Scalar::exact(1, static_cast<long>(pieces.size()));
  for (auto& p : pieces)
    for (auto& a : repeated_average(j - 1, p)) out.push_back(a * share);
  return out;
}

}  // namespace

WeightedSubset scc_max_mass(const SCC& c) {
  std::map<Coord, Scalar> w;
  for (std::size_t i = 0; i < c.support.size(); ++i) w[c.support[i]] = c.coeffs[i];
  return max_weight_subset(FamilyExpr::S(c.j - 1), w);
}

bool check_scc(const SCC& c) {
  if (c.j < 1 || c.support.empty() || c.support.size() != c.coeffs.size()) return false;
  if (!is_member(FamilyExpr::S(c.j), c.support)) return false;
  Scalar total = Scalar(0).in_mode(c.coeffs.front().is_exact() ? Arithmetic::rational : Arithmetic::float64);
  for (auto& a : c.coeffs) {
    if (a.sign() < 0) return false;
    total += a;
  }
  if (!approx_eq(total, Scalar(1))) return false;
  return scc_max_mass(c).value < c.epsilon;
}

SCC build_scc(int j, const Scalar& epsilon, Coord start) {
  if (j < 1) throw Error("InvalidArgument", "j must be >= 1");
  if (start < 1) throw Error("InvalidArgument", "start must be >= 1");
  if (epsilon.sign() <= 0) throw Error("InvalidArgument", "epsilon must be positive");
  constexpr Coord kMaxAdvance = 100000;
  for (Coord s = start; s < start + kMaxAdvance; ++s) {
    SCC c;
    c.j = j;
    c.epsilon = epsilon;
    c.requested_start = start;
    c.support = maximal_member(FamilyExpr::S(j), s);
    c.coeffs = repeated_average(j, c.support);
    if (check_scc(c)) return c;
  }
  throw Error("Unbounded", "no special convex combination found within the start range");
}

// ---- equal-norm partitions ----

namespace {

class Partitioner {
 public:
  Partitioner(const SpaceSpec& space, const SparseVector& z) : space_(space), z_(z) {}

  // norm of z restricted to positions [a, b)
  Scalar seg(std::size_t a, std::size_t b) {
    auto key = std::make_pair(a, b);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<SparseVector::Entry> e(z_.entries().begin() + static_cast<long>(a),
                                       z_.entries().begin() + static_cast<long>(b));
    Scalar v = norm_value(space_, SparseVector(std::move(e)));
    memo_.emplace(key, v);
    return v;
  }

  // cut points c_0 = 0 < ... < c_m = len for z restricted to [0, len)
  std::vector<std::size_t> split(std::size_t len, int m, const Scalar& eps) {
    if (m == 1) return {0, len};
    if (m == 2) {
      // ||z_c|| - ||z - z_c|| is non-decreasing in c: bisect for the sign change
      std::size_t lo = 1, hi = len - 1;
      if ((seg(0, lo) - seg(lo, len)).sign() >= 0) return {0, lo, len};
      if ((seg(0, hi) - seg(hi, len)).sign() < 0) return {0, hi, len};
      while (hi - lo > 1) {
        std::size_t mid = lo + (hi - lo) / 2;
        if ((seg(0, mid) - seg(mid, len)).sign() < 0) lo = mid;
        else hi = mid;
      }
      const bool take_lo = definitely_greater((seg(0, hi) - seg(hi, len)).abs(), (seg(0, lo) - seg(lo, len)).abs());
      return {0, take_lo ? lo : hi, len};
    }
    const std::size_t first = static_cast<std::size_t>(m - 1);
    if (definitely_greater(eps, seg(first, len))) {
      std::vector<std::size_t> cuts;
      for (std::size_t c = 0; c <= first; ++c) cuts.push_back(c);
      cuts.push_back(len);
      return cuts;
    }
    // xi(j) = ||z - z_j|| - max_i ||F_i^j z_j||: positive at m-1, non-positive at len
    auto xi = [&](std::size_t j, std::vector<std::size_t>* cuts_out) {
      auto cuts = split(j, m - 1, eps);
      Scalar mx = seg(cuts[0], cuts[1]);
      for (std::size_t i = 1; i + 1 < cuts.size(); ++i) mx = max(mx, seg(cuts[i], cuts[i + 1]));
      if (cuts_out) *cuts_out = cuts;
      return seg(j, len) - mx;
    };
    // xi(len) < 0 always; keep the last part nonempty
    std::size_t lo = first, hi = len;
    while (hi - lo > 1) {
      std::size_t mid = lo + (hi - lo) / 2;
      if (xi(mid, nullptr).sign() > 0) lo = mid;
      else hi = mid;
    }
    if (hi == len) hi = len - 1;
    std::vector<std::size_t> cuts;
    xi(hi, &cuts);
    cuts.push_back(len);
    return cuts;
  }

 private:
  const SpaceSpec& space_;
  const SparseVector& z_;
  std::map<std::pair<std::size_t, std::size_t>, Scalar> memo_;
};

}  // namespace

std::vector<FiniteSet> equal_norm_partition(const SpaceSpec& space, const SparseVector& z0, int m, double delta) {
  if (m < 1) throw Error("InvalidArgument", "m must be >= 1");
  if (!(delta > 0 && delta < 1)) throw Error("InvalidArgument", "delta must lie in (0,1)");
  const SparseVector z = z0.in_mode(space.arithmetic);
  if (z.empty()) throw Error("EmptyVector", "z is empty");
  const double sup = z.sup_norm().to_double();
  const double eps = delta / (8.0 * m * m);
  const Scalar nz = norm_value(space, z);
  if (!approx_le(Scalar::exact(1, 2), nz) || !(sup < eps))
    throw Error("HypothesisViolated", "need ||z|| >= 1/2 and ||z||_inf < delta/(8m^2) = " + fmt(eps) +
                                          "; got ||z|| = " + fmt(nz.to_double()) + ", ||z||_inf = " + fmt(sup));
  Partitioner p(space, z);
  auto cuts = p.split(z.size(), m, z.sup_norm());
  std::vector<FiniteSet> out;
  const FiniteSet s = z.support();
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    out.emplace_back(s.begin() + static_cast<long>(cuts[i]), s.begin() + static_cast<long>(cuts[i + 1]));
  return out;
}

// ---- c_0^N averages ----

namespace {

// normalized vector on supp f with large f(x), by coordinate search from the coefficient profile
std::pair<SparseVector, Scalar> norming_vector(const SpaceSpec& space, const TreeFunctional& f) {
  const Arithmetic mode = space.arithmetic;
  std::vector<Coord> coords;
  std::vector<int> signs;
  for (auto& t : leaf_terms(f)) {
    coords.push_back(t.coord);
    signs.push_back(t.sign);
  }
  if (coords.size() > kAssociateSupportLimit)
    throw Error("SupportTooLarge", "norming-vector search supports at most " +
                                       std::to_string(kAssociateSupportLimit) + " coordinates");
  auto make = [&](const std::vector<Scalar>& mag) {
    std::vector<SparseVector::Entry> e;
    for (std::size_t i = 0; i < coords.size(); ++i) e.emplace_back(coords[i], signs[i] < 0 ? -mag[i] : mag[i]);
    return SparseVector(std::move(e));
  };
  auto ratio = [&](const std::vector<Scalar>& mag) {
    SparseVector x = make(mag);
    return eval_functional(space, f, x) / norm_value(space, x);
  };
  std::vector<Scalar> mag(coords.size(), Scalar(1).in_mode(mode));
  Scalar best = ratio(mag);
  const Scalar half = Scalar::exact(1, 2).in_mode(mode), two = Scalar(2).in_mode(mode);
  for (int round = 0; round < 6; ++round) {
    bool improved = false;
    for (std::size_t i = 0; i < mag.size(); ++i)
      for (const Scalar& factor : {half, two}) {
        auto trial = mag;
        trial[i] = trial[i] * factor;
        Scalar r = ratio(trial);
        if (definitely_greater(r, best)) {
          best = r;
          mag = std::move(trial);
          improved = true;
        }
      }
    if (!improved) break;
  }
  SparseVector x = make(mag);
  x = x.scaled(Scalar(1).in_mode(mode) / norm_value(space, x));
  return {x, eval_functional(space, f, x)};
}

}  // namespace

C0Associate c0_average_associate(const SpaceSpec& space, const std::vector<TreeFunctional>& f_parts) {
  if (f_parts.empty()) throw Error("InvalidArgument", "no functionals");
  for (std::size_t i = 0; i < f_parts.size(); ++i) {
    auto v = validate(space, f_parts[i]);
    if (!v.empty()) throw Error("InvalidInput", "part " + std::to_string(i) + " is not valid: " + v.front().reason);
    if (i > 0 && f_parts[i - 1].max_coord() >= f_parts[i].min_coord())
      throw Error("NonSuccessive", "functionals must be successive");
  }
  C0Associate out;
  for (auto& f : f_parts) {
    auto [x, act] = norming_vector(space, f);
    out.parts.push_back(x);
    out.actions.push_back(act);
  }
  SparseVector s = sum(out.parts);
  const Scalar ns = norm_value(space, s);
  out.x = s.scaled(Scalar(1).in_mode(space.arithmetic) / ns);
  out.constant = Scalar(static_cast<int>(f_parts.size())).in_mode(space.arithmetic) / ns;
  return out;
}

}  // namespace tsx
