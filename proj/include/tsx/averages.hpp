#ifndef tsx_averages_hpp
#define tsx_averages_hpp

#include "tsx/functional.hpp"
#include "tsx/report.hpp"
#include "tsx/spaces.hpp"
#include "tsx/vector.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tsx {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// ---- l_r averages ----

struct EquivEstimate {
  double c_est = 1;
  std::size_t samples = 0;
  std::string worst;  // coefficient family that attained c_est
};

// lower bound on the equivalence constant with the unit vector basis of l_r^m
EquivEstimate estimate_equiv_const(const SpaceSpec& space, const std::vector<SparseVector>& blocks, double r,
                                   std::uint64_t seed = 1, std::size_t samples = 1000);

struct LrAverage {
  SparseVector x;
  Scalar sum_norm;  // norm of the unnormalized sum
  double c_est = 1;
  std::size_t length = 0;
};

LrAverage build_lr_average(const SpaceSpec& space, const std::vector<SparseVector>& pool, double r, std::size_t m,
                           std::uint64_t seed = 1);

// j^{1/s} / (2C^2) <= sup_{A_j} sum ||E_i x|| <= 2C^2 j^{1/s} for j <= M, 1/s + 1/r = 1
AuditReport check_lr_average_bounds(const SpaceSpec& space, const SparseVector& x, double c, double r, long big_m,
                                    std::size_t length);

// ---- averaging trees ----

/// Successive normalized blocks handed out on demand.
class BlockPool {
 public:
  static BlockPool basis(Coord start);
  static BlockPool list(std::vector<SparseVector> blocks);
  // next unused block with min support >= at_least
  SparseVector next(Coord at_least, std::size_t* index);
  std::string describe() const;

 private:
  bool basis_ = true;
  Coord start_ = 1;
  std::vector<SparseVector> blocks_;
  std::size_t cursor_ = 0;
};

struct AvgNode {
  long first_child = 0, last_child = 0;  // 1-based interval in the level below
  long k = 0;
  SparseVector x;
  long pool_index = -1;  // leaves only
};

struct AveragingTree {
  int M = 0;
  Scalar epsilon, theta;
  bool exact = true;
  Scalar scale = Scalar(1);
  std::vector<std::vector<AvgNode>> levels;  // levels[j], j = 0..M

  const SparseVector& root() const { return levels.back().front().x; }
  std::vector<long> sizes() const;
  std::size_t leaf_count() const { return levels.front().size(); }
};

inline constexpr std::size_t kDefaultLeafBudget = 100000;

// relaxed_scale: divide the node size bounds by this value (tree marked non-conforming)
AveragingTree build_averaging_tree(BlockPool pool, int M, const Scalar& epsilon, const Scalar& theta,
                                   std::optional<Scalar> relaxed_scale = std::nullopt,
                                   std::size_t leaf_budget = kDefaultLeafBudget);

// lower bound on k for node i of level j (before relaxation)
Scalar size_bound(const AveragingTree& t, long i, long j);

struct TreeCheck {
  std::vector<std::pair<std::string, bool>> conditions;  // level_sizes, leaves, children, averaging, size_bound
  std::vector<std::string> notes;
  bool well_formed = true;  // tree conditions and exact averaging
  bool conforming = true;   // size bounds
};
TreeCheck check_averaging_tree(const AveragingTree& tree);

// sup over S_j-admissible partitions of the normalized root, j = 0..M, against
// [theta_1 theta^{1-j}/4, 4 theta_1^{-1} theta^{-j-1}]; node norms vs (1-delta)^j theta^j are informational
AuditReport audit_tav(const SpaceSpec& space, const AveragingTree& tree, double delta = 0.5);

// ---- special convex combinations ----

struct SCC {
  int j = 1;
  Scalar epsilon;
  FiniteSet support;
  std::vector<Scalar> coeffs;
  Coord requested_start = 1;
};

SCC build_scc(int j, const Scalar& epsilon, Coord start);
bool check_scc(const SCC& c);
// largest mass an S_{j-1} set carries
WeightedSubset scc_max_mass(const SCC& c);

// ---- equal-norm partitions ----

std::vector<FiniteSet> equal_norm_partition(const SpaceSpec& space, const SparseVector& z, int m, double delta);

// ---- c_0^N averages ----

struct C0Associate {
  SparseVector x;                  // normalized sum of the chosen norming vectors
  std::vector<SparseVector> parts; // normalized x_k with supp x_k = supp f_k
  std::vector<Scalar> actions;     // f_k(x_k)
  Scalar constant;                 // N / ||sum x_k||
};

inline constexpr std::size_t kAssociateSupportLimit = 12;
C0Associate c0_average_associate(const SpaceSpec& space, const std::vector<TreeFunctional>& f_parts);

}  // namespace tsx

#endif
