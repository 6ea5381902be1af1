#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cat0/single_vertex.hpp"

namespace cat0 {

// A split of the leaf set {1..5} with both sides of size >= 2, stored as the
// bitmask of the side containing leaf 1 (bit k = leaf k+1).  There are
// exactly 10 of them.
struct Split {
  uint8_t side1 = 0;

  static Split parse(const std::string& text);  // "12|345" etc.
  std::string str() const;
  static const std::vector<Split>& all();

  bool operator==(const Split& o) const { return side1 == o.side1; }
};

// Compatible iff some side of one is disjoint from some side of the other;
// exactly 15 unordered compatible pairs exist (the tree shapes).
bool splits_compatible(Split a, Split b);

// A binary 5-leaf tree: two compatible interior splits with edge lengths.
// Zero lengths address the shared cone boundaries (degenerate trees).
struct Tree5 {
  Split s1, s2;
  double len1 = 0.0;
  double len2 = 0.0;
};

// BHV tree space T5: one ray per split, one quarter-plane cone per tree
// shape.  The link graph is the Petersen graph with every arc pi/2.
SingleVertexComplex build_t5();

// Errc::incompatible_splits when the tree's splits do not form a shape.
ConePoint tree_to_point(const SingleVertexComplex& t5, const Tree5& t);

double bhv_distance(const SingleVertexComplex& t5, const Tree5& a, const Tree5& b);

}  // namespace cat0
