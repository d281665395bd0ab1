#ifndef tsx_surgery_hpp
#define tsx_surgery_hpp

#include "tsx/functional.hpp"

#include <string>
#include <vector>

namespace tsx {

// f valid in X_k (space.inner_ak = k): successive parts valid in X summing to f
std::vector<TreeFunctional> split_xk(const SpaceSpec& space, const TreeFunctional& f);

// same signed leaves with the same weight paths, as a multiset
bool same_leaf_multiset(const std::vector<TreeFunctional>& parts, const TreeFunctional& f);

struct ComparableResult {
  TreeFunctional f;
  std::string method;  // "unchanged", "surgery", "dp"
  Scalar before, after;
  int constant = 1;
};

// c * f'(v) >= f(v) with c = 6 (A-type) or 4 (S-type); v = sum of blocks
ComparableResult make_comparable_ex(const SpaceSpec& space, const TreeFunctional& f,
                                    const std::vector<SparseVector>& blocks);
TreeFunctional make_comparable(const SpaceSpec& space, const TreeFunctional& f,
                               const std::vector<SparseVector>& blocks);

}  // namespace tsx

#endif
