#pragma once

#include <vector>

namespace horsmc {

/// Strongly connected components of a directed graph given as adjacency
/// lists. Components are numbered in reverse topological order: every edge
/// leaving component c enters a component with a smaller number.
struct SccDecomposition {
  std::vector<int> component;                // node -> component id
  std::vector<std::vector<int>> members;     // component id -> nodes (ascending)
  std::vector<bool> cyclic;                  // component has an internal edge

  int count() const { return static_cast<int>(members.size()); }
};

SccDecomposition strongly_connected_components(const std::vector<std::vector<int>>& successors);

}  // namespace horsmc
