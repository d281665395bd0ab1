#ifndef tsx_families_hpp
#define tsx_families_hpp

#include "tsx/scalar.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tsx {

using Coord = long;
// strictly increasing, 1-based
using FiniteSet = std::vector<Coord>;

/// A_n, S_n or a composition M[N].
class FamilyExpr {
 public:
  enum class Kind { A, S, Compose };

  static FamilyExpr A(int n);
  static FamilyExpr S(int n);
  static FamilyExpr compose(const FamilyExpr& outer, const FamilyExpr& inner);
  // grammar: A<n> | S<n> | F[F]; errors carry the offending position
  static FamilyExpr parse(const std::string& text);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  const FamilyExpr& outer() const { return *outer_; }
  const FamilyExpr& inner() const { return *inner_; }
  std::string str() const;

  friend bool operator==(const FamilyExpr& a, const FamilyExpr& b) { return a.str() == b.str(); }

 private:
  Kind kind_ = Kind::S;
  int n_ = 0;
  std::shared_ptr<const FamilyExpr> outer_, inner_;
};

/// Nested membership witness: `pieces` are the successive inner-family parts.
struct Decomposition {
  FiniteSet set;
  std::vector<Decomposition> pieces;
};

bool is_successive(const std::vector<FiniteSet>& sets);
bool is_member(const FamilyExpr& family, const FiniteSet& set);
// throws Error("NonSuccessive") on overlapping / unordered / empty sets
bool is_admissible(const FamilyExpr& family, const std::vector<FiniteSet>& sets);
std::optional<Decomposition> decompose(const FamilyExpr& family, const FiniteSet& set);
// longest prefix of `set` that is a member (hereditary families make prefixes monotone)
std::size_t longest_member_prefix(const FamilyExpr& family, const FiniteSet& set, std::size_t from);

struct WeightedSubset {
  FiniteSet set;
  Scalar value;
};
// ties: smaller cardinality, then lexicographically smaller
WeightedSubset max_weight_subset(const FamilyExpr& family, const std::map<Coord, Scalar>& weights);
FiniteSet maximal_member(const FamilyExpr& family, Coord start);

std::string set_str(const FiniteSet& s);
FiniteSet parse_set(const std::string& text);

}  // namespace tsx

#endif
