#include "netgrab/graphfilter.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <set>
#include <unordered_set>

#include "netgrab/graphdetect.hpp"

namespace netgrab {
namespace {

void orient(Edge& e, bool reversed) {
  if (!reversed) return;
  std::swap(e.u, e.v);
  std::swap(e.u_attach, e.v_attach);
  std::reverse(e.path.begin(), e.path.end());
}

void canonical_orientation(Edge& e) { orient(e, e.u > e.v); }

// Cheapest 8-connected route from `from` to `to` through cluster pixels,
// both ends included. Empty when unreachable.
std::vector<Pixel> route_through(const std::vector<Pixel>& cluster, Pixel from, Pixel to, double& cost) {
  cost = 0.0;
  if (from == to) return {from};
  std::map<std::pair<int, int>, std::size_t> slot;
  for (std::size_t i = 0; i < cluster.size(); ++i) slot[{cluster[i].x, cluster[i].y}] = i;
  const auto src = slot.find({from.x, from.y});
  const auto dst = slot.find({to.x, to.y});
  if (src == slot.end() || dst == slot.end()) return {};

  std::vector<double> dist(cluster.size(), std::numeric_limits<double>::infinity());
  std::vector<std::size_t> prev(cluster.size(), cluster.size());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[src->second] = 0.0;
  open.push({0.0, src->second});
  while (!open.empty()) {
    const auto [d, i] = open.top();
    open.pop();
    if (d > dist[i]) continue;
    if (i == dst->second) break;
    for (const auto& off : kNeighbors8) {
      const auto it = slot.find({cluster[i].x + off.x, cluster[i].y + off.y});
      if (it == slot.end()) continue;
      const double nd = d + step_length(cluster[i], cluster[it->second]);
      if (nd < dist[it->second]) {
        dist[it->second] = nd;
        prev[it->second] = i;
        open.push({nd, it->second});
      }
    }
  }
  if (!std::isfinite(dist[dst->second])) return {};
  cost = dist[dst->second];
  std::vector<Pixel> route;
  for (std::size_t i = dst->second; i != cluster.size(); i = prev[i]) route.push_back(cluster[i]);
  std::reverse(route.begin(), route.end());
  return route;
}

void mark_loop_only_anchors(ExtractedGraph& g) {
  std::unordered_map<int, int> incident;
  std::unordered_map<int, int> loops;
  for (const auto& e : g.edges) {
    if (e.is_loop()) {
      ++loops[e.u];
      ++incident[e.u];
    } else {
      ++incident[e.u];
      ++incident[e.v];
    }
  }
  for (auto& v : g.vertices) {
    if (incident[v.id] == 1 && loops[v.id] == 1) v.anchor = true;
  }
}

}  // namespace

ExtractedGraph filter_small_components(const ExtractedGraph& graph, SizeMode mode, double threshold) {
  if (!std::isfinite(threshold) || threshold < 0.0) {
    throw Error(ErrorKind::InvalidParameter, "threshold must be a finite non-negative number");
  }
  if (mode == SizeMode::Absolute && threshold != std::floor(threshold)) {
    throw Error(ErrorKind::InvalidParameter, "absolute threshold must be a whole number of vertices");
  }
  if (mode == SizeMode::Relative && threshold > 1.0) {
    throw Error(ErrorKind::InvalidParameter, "relative threshold must lie in [0, 1]");
  }
  const auto comps = graph_components(graph);
  std::size_t largest = 0;
  for (const auto& c : comps) largest = std::max(largest, c.size());
  const double cutoff = mode == SizeMode::Absolute ? threshold : threshold * static_cast<double>(largest);
  std::vector<int> keep;
  for (const auto& c : comps) {
    if (static_cast<double>(c.size()) >= cutoff) keep.insert(keep.end(), c.begin(), c.end());
  }
  return induced_subgraph(graph, keep);
}

ExtractedGraph keep_largest_component(const ExtractedGraph& graph) {
  if (graph.vertices.empty()) throw Error(ErrorKind::EmptyGraph, "graph has no vertices");
  const auto comps = graph_components(graph);
  const std::vector<int>* best = &comps.front();
  for (const auto& c : comps) {
    if (c.size() > best->size()) best = &c;
  }
  return induced_subgraph(graph, *best);
}

ExtractedGraph prune_dead_ends(const ExtractedGraph& graph) {
  auto deg = degrees(graph);
  std::unordered_map<int, std::vector<std::size_t>> incident;
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    incident[graph.edges[i].u].push_back(i);
    if (!graph.edges[i].is_loop()) incident[graph.edges[i].v].push_back(i);
  }
  std::vector<char> edge_gone(graph.edges.size(), 0);
  std::unordered_set<int> removed;
  std::queue<int> pending;
  for (const auto& v : graph.vertices) {
    if (deg[v.id] < 2) pending.push(v.id);
  }
  while (!pending.empty()) {
    const int id = pending.front();
    pending.pop();
    if (!removed.insert(id).second) continue;
    for (const auto i : incident[id]) {
      if (edge_gone[i]) continue;
      edge_gone[i] = 1;
      const int other = graph.edges[i].other(id);
      if (other == id) continue;
      if (--deg[other] < 2 && !removed.count(other)) pending.push(other);
    }
  }
  std::vector<int> keep;
  for (const auto& v : graph.vertices) {
    if (!removed.count(v.id)) keep.push_back(v.id);
  }
  return induced_subgraph(graph, keep);
}

ExtractedGraph merge_close_junctions(const ExtractedGraph& graph, double radius) {
  if (!std::isfinite(radius) || radius <= 0.0) {
    throw Error(ErrorKind::InvalidParameter, "radius must be a positive number of pixels");
  }
  ExtractedGraph g = graph;
  const double r2 = radius * radius;
  for (;;) {
    const std::size_t n = g.vertices.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](std::size_t a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    // Spatial hash with cell side = radius: close pairs sit in adjacent cells.
    std::map<std::pair<long, long>, std::vector<std::size_t>> cells;
    auto cell_of = [&](const Vertex& v) {
      return std::make_pair(static_cast<long>(std::floor(v.x / radius)),
                            static_cast<long>(std::floor(v.y / radius)));
    };
    for (std::size_t i = 0; i < n; ++i) cells[cell_of(g.vertices[i])].push_back(i);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto [cx, cy] = cell_of(g.vertices[i]);
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dx = -1; dx <= 1; ++dx) {
          const auto it = cells.find({cx + dx, cy + dy});
          if (it == cells.end()) continue;
          for (const auto j : it->second) {
            if (j <= i) continue;
            const double ddx = g.vertices[i].x - g.vertices[j].x;
            const double ddy = g.vertices[i].y - g.vertices[j].y;
            if (ddx * ddx + ddy * ddy <= r2) {
              const auto a = find(i);
              const auto b = find(j);
              if (a != b) {
                parent[std::max(a, b)] = std::min(a, b);
                any = true;
              }
            }
          }
        }
      }
    }
    if (!any) break;

    // Vertices are sorted by id, so each root is its group's smallest id.
    std::unordered_map<int, int> group_of;
    std::map<std::size_t, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < n; ++i) {
      const auto root = find(i);
      members[root].push_back(i);
      group_of[g.vertices[i].id] = g.vertices[root].id;
    }
    std::map<int, std::size_t> group_size;
    for (const auto& [root, list] : members) group_size[g.vertices[root].id] = list.size();

    ExtractedGraph out;
    out.width = g.width;
    out.height = g.height;
    out.weights_only = g.weights_only;
    std::map<int, Vertex> merged;
    for (const auto& [root, list] : members) {
      if (list.size() == 1) {
        out.vertices.push_back(g.vertices[root]);
        continue;
      }
      Vertex v;
      v.id = g.vertices[root].id;
      double sx = 0.0;
      double sy = 0.0;
      for (const auto i : list) {
        sx += g.vertices[i].x;
        sy += g.vertices[i].y;
        v.pixels.insert(v.pixels.end(), g.vertices[i].pixels.begin(), g.vertices[i].pixels.end());
      }
      v.x = sx / static_cast<double>(list.size());
      v.y = sy / static_cast<double>(list.size());
      merged.emplace(v.id, std::move(v));
    }
    for (const auto& e : g.edges) {
      const int gu = group_of.at(e.u);
      const int gv = group_of.at(e.v);
      if (gu == gv && group_size[gu] > 1) {
        auto& cluster = merged.at(gu).pixels;
        cluster.insert(cluster.end(), e.path.begin(), e.path.end());
        continue;
      }
      Edge moved = e;
      moved.u = gu;
      moved.v = gv;
      canonical_orientation(moved);
      out.edges.push_back(std::move(moved));
    }
    for (auto& [id, v] : merged) {
      std::sort(v.pixels.begin(), v.pixels.end(),
                [](Pixel a, Pixel b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
      out.vertices.push_back(std::move(v));
    }
    sort_by_id(out);
    g = std::move(out);
  }
  return g;
}

ExtractedGraph smooth_filtered_ends(const ExtractedGraph& graph) {
  std::map<int, Edge> edges;
  std::map<int, Vertex> vertices;
  std::map<int, std::vector<int>> incident;  // loop ids appear twice
  for (const auto& v : graph.vertices) {
    vertices.emplace(v.id, v);
    incident[v.id];
  }
  for (const auto& e : graph.edges) {
    edges.emplace(e.id, e);
    incident[e.u].push_back(e.id);
    incident[e.v].push_back(e.id);
  }
  auto detach = [&](int vertex, int edge) {
    auto& list = incident[vertex];
    list.erase(std::find(list.begin(), list.end(), edge));
  };

  std::set<int> candidates;
  for (const auto& v : graph.vertices) candidates.insert(v.id);
  while (!candidates.empty()) {
    const int m = *candidates.begin();
    candidates.erase(candidates.begin());
    const auto vit = vertices.find(m);
    if (vit == vertices.end() || vit->second.anchor) continue;
    const auto& inc = incident[m];
    if (inc.size() != 2 || inc[0] == inc[1]) continue;

    Edge a = edges.at(std::min(inc[0], inc[1]));
    Edge b = edges.at(std::max(inc[0], inc[1]));
    orient(a, a.v != m);  // a runs into m
    orient(b, b.u != m);  // b runs out of m

    Edge joined;
    joined.id = std::min(a.id, b.id);
    joined.u = a.u;
    joined.v = b.v;
    joined.u_attach = a.u_attach;
    joined.v_attach = b.v_attach;
    double inner = 0.0;
    std::vector<Pixel> route;
    if (a.v_attach && b.u_attach) {
      route = route_through(vit->second.pixels, *a.v_attach, *b.u_attach, inner);
      if (route.empty()) {
        inner = std::hypot(a.v_attach->x - b.u_attach->x, a.v_attach->y - b.u_attach->y);
      }
    }
    joined.path = a.path;
    joined.path.insert(joined.path.end(), route.begin(), route.end());
    joined.path.insert(joined.path.end(), b.path.begin(), b.path.end());
    joined.length = a.length + b.length + inner;
    const int counted = a.pixel_count + b.pixel_count;
    joined.width = counted > 0 ? (a.width * a.pixel_count + b.width * b.pixel_count) / counted
                               : 0.5 * (a.width + b.width);
    joined.pixel_count = counted + static_cast<int>(route.size());
    canonical_orientation(joined);

    detach(a.u, a.id);
    detach(b.v, b.id);
    edges.erase(a.id);
    edges.erase(b.id);
    incident.erase(m);
    vertices.erase(vit);
    incident[joined.u].push_back(joined.id);
    incident[joined.v].push_back(joined.id);
    candidates.insert(joined.u);
    candidates.insert(joined.v);
    edges.emplace(joined.id, std::move(joined));
  }

  ExtractedGraph out;
  out.width = graph.width;
  out.height = graph.height;
  out.weights_only = graph.weights_only;
  for (auto& [id, v] : vertices) out.vertices.push_back(std::move(v));
  for (auto& [id, e] : edges) out.edges.push_back(std::move(e));
  mark_loop_only_anchors(out);
  return out;
}

}  // namespace netgrab
