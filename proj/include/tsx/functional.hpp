#ifndef tsx_functional_hpp
#define tsx_functional_hpp

#include "tsx/spaces.hpp"
#include "tsx/vector.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tsx {

/// Tree-analysis of a norming functional: signed unit leaves, weighted nodes.
struct TreeFunctional {
  bool leaf = true;
  int sign = 1;
  Coord coord = 1;
  long weight_index = 1;
  std::vector<TreeFunctional> children;

  static TreeFunctional make_leaf(int sign, Coord k);
  static TreeFunctional make_node(long n, std::vector<TreeFunctional> children);

  FiniteSet support() const;
  Coord min_coord() const;
  Coord max_coord() const;
  int height() const;
  std::size_t node_count() const;

  friend bool operator==(const TreeFunctional& a, const TreeFunctional& b);
};

Scalar eval_functional(const SpaceSpec& space, const TreeFunctional& f, const SparseVector& x);

struct Violation {
  std::string path;  // child indices from the root, e.g. "0.2"
  std::string reason;
};
std::vector<Violation> validate(const SpaceSpec& space, const TreeFunctional& f);

// every node support lies inside a block's range, misses it, or holds all of the block it sees
bool is_comparable(const TreeFunctional& f, const std::vector<SparseVector>& blocks);

// restriction of the tree to coordinates satisfying keep(); nullopt when nothing is left
std::optional<TreeFunctional> restrict_functional(const TreeFunctional& f, const std::function<bool(Coord)>& keep);
std::optional<TreeFunctional> restrict_functional(const TreeFunctional& f, const FiniteSet& s);

// signed leaves with their path weights' index lists, sorted by coordinate
struct LeafTerm {
  Coord coord;
  int sign;
  std::vector<long> path;  // weight indices from the root down
};
std::vector<LeafTerm> leaf_terms(const TreeFunctional& f);

std::string to_sexpr(const TreeFunctional& f);
TreeFunctional parse_sexpr(const std::string& text);

}  // namespace tsx

#endif
