#ifndef tsx_vector_hpp
#define tsx_vector_hpp

#include "tsx/families.hpp"
#include "tsx/scalar.hpp"

#include <string>
#include <utility>
#include <vector>

namespace tsx {

/// Finitely supported vector, strictly increasing coordinates, no stored zeros.
class SparseVector {
 public:
  using Entry = std::pair<Coord, Scalar>;

  SparseVector() = default;
  explicit SparseVector(std::vector<Entry> entries);
  static SparseVector basis(Coord k);
  static SparseVector uniform(const FiniteSet& s, const Scalar& value);

  const std::vector<Entry>& entries() const { return e_; }
  std::size_t size() const { return e_.size(); }
  bool empty() const { return e_.empty(); }
  FiniteSet support() const;
  Coord min_coord() const;
  Coord max_coord() const;
  Scalar at(Coord k) const;

  Scalar sup_norm() const;
  Scalar l1_norm() const;
  SparseVector abs() const;
  SparseVector scaled(const Scalar& s) const;
  SparseVector in_mode(Arithmetic a) const;
  SparseVector restrict_to(const FiniteSet& s) const;
  SparseVector restrict_range(Coord lo, Coord hi) const;
  // sum of vectors with disjoint supports or general sums
  SparseVector plus(const SparseVector& o) const;

  friend bool operator==(const SparseVector& a, const SparseVector& b);

 private:
  std::vector<Entry> e_;
};

// x < y iff max supp x < min supp y
bool precedes(const SparseVector& x, const SparseVector& y);
bool is_block_sequence(const std::vector<SparseVector>& blocks);
SparseVector sum(const std::vector<SparseVector>& vs);
SparseVector linear_combination(const std::vector<Scalar>& a, const std::vector<SparseVector>& vs);

}  // namespace tsx

#endif
