#ifndef tsx_audit_hpp
#define tsx_audit_hpp

#include "tsx/functional.hpp"
#include "tsx/report.hpp"
#include "tsx/spaces.hpp"
#include "tsx/vector.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace tsx {

inline constexpr Coord kInclusionGroundLimit = 14;

// every member of lhs inside {1..ground} must be a member of rhs
AuditReport audit_family_inclusion(const FamilyExpr& lhs, const FamilyExpr& rhs, Coord ground);
// hereditary and spreading laws, exhaustively inside {1..ground}
AuditReport audit_family_laws(const FamilyExpr& family, Coord ground);
// (S_n[A_k])[A_m] inside A_l[S_n] for k, m in {1,2}, minimal l, n <= max_n; plus negative controls
AuditReport audit_sch1(Coord ground, int max_n = 2);

AuditReport audit_l3(int m, std::size_t trials, std::uint64_t seed, unsigned threads = 1);

struct DominationEstimate {
  double estimate = 1;
  std::size_t samples = 0;
};
// max over sampled a >= 0 of ||sum a z|| / ||sum a y||, a lower bound on the domination constant
DominationEstimate estimate_domination(const SpaceSpec& space, const std::vector<SparseVector>& ys,
                                       const std::vector<SparseVector>& zs, std::size_t trials, std::uint64_t seed);

struct KrivOptions {
  long N = 1;
  double r = 1;
  std::uint64_t seed = 1;
  // total support the norm engine is allowed to handle; norms beyond ~128 coordinates take minutes
  std::size_t budget = 128;
  // desk-scale blocks ignoring the block conditions; rows are archived, the 99 bound is not checked
  bool relaxed = false;
  std::size_t relaxed_length = 8;
};
AuditReport audit_kriv(const SpaceSpec& space, const KrivOptions& opt);

AuditReport audit_pest(const SpaceSpec& space, std::size_t instances, std::uint64_t seed, unsigned threads = 1);

// random functional valid in `space` supported inside coords
TreeFunctional random_functional(const SpaceSpec& space, const std::vector<Coord>& coords, std::mt19937_64& rng,
                                 int depth, long max_index = 4);

// p with 1/p + 1/q = 1 for A-type spaces with a known exponent
double space_p(const SpaceSpec& space);

}  // namespace tsx

#endif
