#ifndef tsx_norm_hpp
#define tsx_norm_hpp

#include "tsx/functional.hpp"
#include "tsx/spaces.hpp"
#include "tsx/vector.hpp"

#include <vector>

namespace tsx {

struct NormResult {
  Scalar value;
  TreeFunctional witness;
  long max_n_explored = 0;
  // theta_{n+1} * ||x||_1 for the first unexplored index; never exceeds value
  Scalar cutoff_bound;
};

NormResult norm(const SpaceSpec& space, const SparseVector& x);
// 0 for the empty vector
Scalar norm_value(const SpaceSpec& space, const SparseVector& x);

struct AdmissibleSum {
  Scalar value;
  std::vector<FiniteSet> partition;  // coordinate runs of supp x
};
// sup over family-admissible (E_i) of sum ||E_i x||
AdmissibleSum admissible_sum(const SpaceSpec& space, const SparseVector& x, const FamilyExpr& family);

inline constexpr std::size_t kBruteSupportLimit = 8;
// exhaustive search over tree functionals of height <= depth_cap on supp x
Scalar brute_norm(const SpaceSpec& space, const SparseVector& x, int depth_cap);

// best functional whose node supports respect the blocks: every node lies inside one
// block range or is a union of whole blocks (restricted to the functional's support)
NormResult comparable_best(const SpaceSpec& space, const std::vector<SparseVector>& blocks);

}  // namespace tsx

#endif
