#include "tsx/vector.hpp"

#include <algorithm>
#include <map>

namespace tsx {

SparseVector::SparseVector(std::vector<Entry> entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].first < 1) throw Error("InvalidVector", "coordinates are 1-based");
    if (i && entries[i].first <= entries[i - 1].first)
      throw Error("InvalidVector", "coordinates must be strictly increasing");
  }
  for (auto& e : entries)
    if (!e.second.is_zero()) e_.push_back(std::move(e));
}

SparseVector SparseVector::basis(Coord k) { return SparseVector({{k, Scalar(1)}}); }

SparseVector SparseVector::uniform(const FiniteSet& s, const Scalar& value) {
  std::vector<Entry> e;
  for (Coord k : s) e.emplace_back(k, value);
  return SparseVector(std::move(e));
}

FiniteSet SparseVector::support() const {
  FiniteSet s;
  for (auto& e : e_) s.push_back(e.first);
  return s;
}

Coord SparseVector::min_coord() const {
  if (e_.empty()) throw Error("EmptyVector", "vector is empty");
  return e_.front().first;
}

Coord SparseVector::max_coord() const {
  if (e_.empty()) throw Error("EmptyVector", "vector is empty");
  return e_.back().first;
}

Scalar SparseVector::at(Coord k) const {
  auto it = std::lower_bound(e_.begin(), e_.end(), k, [](const Entry& e, Coord c) { return e.first < c; });
  if (it != e_.end() && it->first == k) return it->second;
  return Scalar(0);
}

Scalar SparseVector::sup_norm() const {
  Scalar m;
  bool first = true;
  for (auto& e : e_) {
    Scalar a = e.second.abs();
    if (first || a > m) m = a;
    first = false;
  }
  return m;
}

Scalar SparseVector::l1_norm() const {
  Scalar s;
  for (auto& e : e_) s += e.second.abs();
  return s;
}

SparseVector SparseVector::abs() const {
  SparseVector v;
  for (auto& e : e_) v.e_.emplace_back(e.first, e.second.abs());
  return v;
}

SparseVector SparseVector::scaled(const Scalar& s) const {
  SparseVector v;
  if (s.is_zero()) return v;
  for (auto& e : e_) v.e_.emplace_back(e.first, e.second * s);
  return v;
}

SparseVector SparseVector::in_mode(Arithmetic a) const {
  SparseVector v;
  for (auto& e : e_) v.e_.emplace_back(e.first, e.second.in_mode(a));
  return v;
}

SparseVector SparseVector::restrict_to(const FiniteSet& s) const {
  SparseVector v;
  std::size_t j = 0;
  for (auto& e : e_) {
    while (j < s.size() && s[j] < e.first) ++j;
    if (j < s.size() && s[j] == e.first) v.e_.push_back(e);
  }
  return v;
}

SparseVector SparseVector::restrict_range(Coord lo, Coord hi) const {
  SparseVector v;
  for (auto& e : e_)
    if (e.first >= lo && e.first <= hi) v.e_.push_back(e);
  return v;
}

SparseVector SparseVector::plus(const SparseVector& o) const {
  std::map<Coord, Scalar> m;
  for (auto& e : e_) m[e.first] += e.second;
  for (auto& e : o.e_) m[e.first] += e.second;
  std::vector<Entry> out;
  for (auto& [k, v] : m) out.emplace_back(k, v);
  return SparseVector(std::move(out));
}

bool operator==(const SparseVector& a, const SparseVector& b) {
  if (a.e_.size() != b.e_.size()) return false;
  for (std::size_t i = 0; i < a.e_.size(); ++i)
    if (a.e_[i].first != b.e_[i].first || a.e_[i].second != b.e_[i].second) return false;
  return true;
}

bool precedes(const SparseVector& x, const SparseVector& y) {
  if (x.empty() || y.empty()) return true;
  return x.max_coord() < y.min_coord();
}

bool is_block_sequence(const std::vector<SparseVector>& blocks) {
  for (std::size_t i = 1; i < blocks.size(); ++i)
    if (!precedes(blocks[i - 1], blocks[i])) return false;
  return true;
}

SparseVector sum(const std::vector<SparseVector>& vs) {
  std::vector<SparseVector::Entry> all;
  for (auto& v : vs) all.insert(all.end(), v.entries().begin(), v.entries().end());
  // stable: equal coordinates are added in sequence order
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<SparseVector::Entry> out;
  for (auto& e : all) {
    if (!out.empty() && out.back().first == e.first)
      out.back().second += e.second;
    else
      out.push_back(std::move(e));
  }
  std::erase_if(out, [](const auto& e) { return e.second.is_zero(); });
  return SparseVector(std::move(out));
}

SparseVector linear_combination(const std::vector<Scalar>& a, const std::vector<SparseVector>& vs) {
  if (a.size() != vs.size()) throw Error("LengthMismatch", "coefficient count differs from vector count");
  std::vector<SparseVector> terms;
  for (std::size_t i = 0; i < a.size(); ++i) terms.push_back(vs[i].scaled(a[i]));
  return sum(terms);
}

}  // namespace tsx
