#include "netgrab/graph.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace netgrab {

const Vertex* ExtractedGraph::find_vertex(int id) const noexcept {
  const auto it = std::lower_bound(vertices.begin(), vertices.end(), id,
                                   [](const Vertex& v, int key) { return v.id < key; });
  return it != vertices.end() && it->id == id ? &*it : nullptr;
}

const Edge* ExtractedGraph::find_edge(int id) const noexcept {
  const auto it = std::lower_bound(edges.begin(), edges.end(), id,
                                   [](const Edge& e, int key) { return e.id < key; });
  return it != edges.end() && it->id == id ? &*it : nullptr;
}

std::unordered_map<int, int> degrees(const ExtractedGraph& graph) {
  std::unordered_map<int, int> deg;
  for (const auto& v : graph.vertices) deg[v.id] = 0;
  for (const auto& e : graph.edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

std::vector<std::vector<int>> graph_components(const ExtractedGraph& graph) {
  std::unordered_map<int, std::size_t> slot;
  for (std::size_t i = 0; i < graph.vertices.size(); ++i) slot[graph.vertices[i].id] = i;
  std::vector<std::size_t> parent(graph.vertices.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& e : graph.edges) {
    const auto a = find(slot.at(e.u));
    const auto b = find(slot.at(e.v));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::unordered_map<std::size_t, std::size_t> comp_of_root;
  std::vector<std::vector<int>> comps;
  // Vertices are sorted by id, so components come out ordered by smallest id.
  for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
    const auto root = find(i);
    auto [it, fresh] = comp_of_root.try_emplace(root, comps.size());
    if (fresh) comps.emplace_back();
    comps[it->second].push_back(graph.vertices[i].id);
  }
  return comps;
}

ExtractedGraph induced_subgraph(const ExtractedGraph& graph, const std::vector<int>& keep_ids) {
  const std::unordered_set<int> keep(keep_ids.begin(), keep_ids.end());
  ExtractedGraph out;
  out.width = graph.width;
  out.height = graph.height;
  out.weights_only = graph.weights_only;
  for (const auto& v : graph.vertices) {
    if (keep.count(v.id)) out.vertices.push_back(v);
  }
  for (const auto& e : graph.edges) {
    if (keep.count(e.u) && keep.count(e.v)) out.edges.push_back(e);
  }
  return out;
}

void sort_by_id(ExtractedGraph& graph) {
  std::sort(graph.vertices.begin(), graph.vertices.end(),
            [](const Vertex& a, const Vertex& b) { return a.id < b.id; });
  std::sort(graph.edges.begin(), graph.edges.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
}

}  // namespace netgrab
