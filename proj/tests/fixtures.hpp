#pragma once

#include <vector>

#include "cuttree/cut_tree.hpp"
#include "cuttree/rooted_tree.hpp"
#include "cuttree/schedule.hpp"

namespace fixtures {

// The eleven-vertex example: edges are named by their child vertex and cut
// in the order i..x below.
inline cuttree::RootedTree eleven_tree() {
  return {{0, 0, 1, 1, 3, 1, 2, 6, 2, 5, 6, 3}, "example"};
}

inline const std::vector<cuttree::Vertex>& eleven_order() {
  static const std::vector<cuttree::Vertex> order{2, 6, 3, 9, 4, 10, 5, 11, 8, 7};
  return order;
}

inline cuttree::CutSchedule eleven_schedule() {
  return cuttree::CutSchedule::from_order(11, eleven_order());
}

inline const char* eleven_newick() { return "((((1,5),9),((3,11),4)),((2,8),((6,7),10)));"; }

inline cuttree::RootedTree path3() { return {{0, 0, 1, 2}, "path"}; }

}  // namespace fixtures
