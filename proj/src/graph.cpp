#include "horsmc/graph.hpp"

#include <algorithm>
#include <cstddef>
#include <utility>

namespace horsmc {

// Iterative Tarjan; components come out sinks first.
SccDecomposition strongly_connected_components(const std::vector<std::vector<int>>& successors) {
  const int n = static_cast<int>(successors.size());
  SccDecomposition out;
  out.component.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> call;
  int counter = 0;

  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [v, next] = call.back();
      if (next == 0 && index[v] == -1) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      const auto& succ = successors[static_cast<std::size_t>(v)];
      if (next < succ.size()) {
        int w = succ[next++];
        if (index[w] == -1) {
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          out.component[w] = out.count();
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        out.members.push_back(std::move(comp));
      }
      int finished = v;
      call.pop_back();
      if (!call.empty()) {
        int parent = call.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }

  out.cyclic.assign(out.members.size(), false);
  for (int v = 0; v < n; ++v)
    for (int w : successors[static_cast<std::size_t>(v)])
      if (out.component[v] == out.component[w]) out.cyclic[out.component[v]] = true;
  return out;
}

}  // namespace horsmc
