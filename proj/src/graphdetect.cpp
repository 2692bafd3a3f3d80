#include "netgrab/graphdetect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

#include "netgrab/components.hpp"

namespace netgrab {
namespace {

struct Tracer {
  const BinaryImage& skel;
  Plane<std::int32_t> owner;  // vertex id of the cluster holding a pixel, or -1
  Plane<std::uint8_t> consumed;
  std::vector<Edge> edges;

  explicit Tracer(const BinaryImage& s)
      : skel(s), owner(s.width(), s.height(), -1), consumed(s.width(), s.height(), 0) {}

  bool on(int x, int y) const { return skel.at_or(x, y, 0) != 0; }

  [[noreturn]] static void inconsistent(Pixel p, const std::string& why) {
    std::ostringstream msg;
    msg << "skeleton pixel (" << p.x << "," << p.y << ") " << why;
    throw Error(ErrorKind::InconsistentSkeleton, msg.str());
  }

  // Follow a chain of degree-2 pixels from `start`, entered from cluster
  // pixel `from` of vertex `from_id`.
  void walk(Pixel start, Pixel from, int from_id) {
    Edge e;
    e.u = from_id;
    e.u_attach = from;
    Pixel prev = from;
    Pixel cur = start;
    consumed(cur.x, cur.y) = 1;
    e.path.push_back(cur);
    for (;;) {
      Pixel nb[2];
      int n = 0;
      for (const auto& d : kNeighbors8) {
        if (!on(cur.x + d.x, cur.y + d.y)) continue;
        if (n == 2) inconsistent(cur, "has more than two neighbours but is not a vertex");
        nb[n++] = {cur.x + d.x, cur.y + d.y};
      }
      if (n != 2) inconsistent(cur, "has fewer than two neighbours but is not a vertex");
      const Pixel next = nb[0] == prev ? nb[1] : nb[0];
      if (owner(next.x, next.y) >= 0) {
        e.v = owner(next.x, next.y);
        e.v_attach = next;
        break;
      }
      if (consumed(next.x, next.y)) inconsistent(next, "closes a chain without reaching a vertex");
      consumed(next.x, next.y) = 1;
      e.path.push_back(next);
      prev = cur;
      cur = next;
    }
    if (e.u > e.v) {
      std::swap(e.u, e.v);
      std::swap(e.u_attach, e.v_attach);
      std::reverse(e.path.begin(), e.path.end());
    }
    e.pixel_count = static_cast<int>(e.path.size());
    edges.push_back(std::move(e));
  }

  void walks_from(const Vertex& v) {
    for (const auto& p : v.pixels) {
      for (const auto& d : kNeighbors8) {
        const int nx = p.x + d.x;
        const int ny = p.y + d.y;
        if (!on(nx, ny) || owner(nx, ny) >= 0 || consumed(nx, ny)) continue;
        walk({nx, ny}, p, v.id);
      }
    }
  }
};

}  // namespace

double step_length(Pixel a, Pixel b) noexcept {
  return (a.x != b.x && a.y != b.y) ? std::numbers::sqrt2 : 1.0;
}

int skeleton_degree(const BinaryImage& skeleton, int x, int y) noexcept {
  int n = 0;
  for (const auto& d : kNeighbors8) n += skeleton.at_or(x + d.x, y + d.y, 0) != 0;
  return n;
}

std::vector<Vertex> detect_vertices(const Skeleton& skeleton) {
  const BinaryImage& skel = skeleton.mask;
  const int w = skel.width();
  const int h = skel.height();
  BinaryImage candidates(w, h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (skel(x, y) && skeleton_degree(skel, x, y) != 2) candidates(x, y) = 1;
    }
  }
  const LabelImage labels = connected_components(candidates, Connectivity::Eight);
  std::vector<Vertex> vertices(static_cast<std::size_t>(labels.component_count));
  for (std::size_t i = 0; i < vertices.size(); ++i) vertices[i].id = static_cast<int>(i);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto l = labels(x, y);
      if (l > 0) vertices[static_cast<std::size_t>(l - 1)].pixels.push_back({x, y});
    }
  }
  for (auto& v : vertices) {
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& p : v.pixels) {
      sx += p.x;
      sy += p.y;
    }
    v.x = sx / static_cast<double>(v.pixels.size());
    v.y = sy / static_cast<double>(v.pixels.size());
  }
  return vertices;
}

ExtractedGraph trace_edges(const Skeleton& skeleton, const std::vector<Vertex>& vertices) {
  const BinaryImage& skel = skeleton.mask;
  Tracer tracer(skel);
  ExtractedGraph graph;
  graph.width = skel.width();
  graph.height = skel.height();
  graph.vertices = vertices;
  for (const auto& v : graph.vertices) {
    for (const auto& p : v.pixels) {
      if (!tracer.on(p.x, p.y)) throw Error(ErrorKind::InconsistentSkeleton, "vertex pixel is not on the skeleton");
      tracer.owner(p.x, p.y) = v.id;
    }
  }
  for (const auto& v : graph.vertices) tracer.walks_from(v);

  // Whatever is left is a union of junction-free closed curves.
  int next_id = graph.vertices.empty() ? 0 : graph.vertices.back().id + 1;
  for (int y = 0; y < skel.height(); ++y) {
    for (int x = 0; x < skel.width(); ++x) {
      if (!skel(x, y) || tracer.owner(x, y) >= 0 || tracer.consumed(x, y)) continue;
      Vertex anchor;
      anchor.id = next_id++;
      anchor.x = x;
      anchor.y = y;
      anchor.pixels = {{x, y}};
      anchor.anchor = true;
      tracer.owner(x, y) = anchor.id;
      graph.vertices.push_back(anchor);
      tracer.walks_from(graph.vertices.back());
    }
  }

  auto key = [&](const Edge& e) {
    const auto& first = e.path.empty() ? *e.u_attach : e.path.front();
    return std::make_tuple(e.u, e.v, skel.index(first.x, first.y));
  };
  std::sort(tracer.edges.begin(), tracer.edges.end(),
            [&](const Edge& a, const Edge& b) { return key(a) < key(b); });
  for (std::size_t i = 0; i < tracer.edges.size(); ++i) tracer.edges[i].id = static_cast<int>(i);
  graph.edges = std::move(tracer.edges);
  return graph;
}

ExtractedGraph compute_weights(ExtractedGraph graph, const DistanceField& distance) {
  if (!distance.same_size(graph.width, graph.height)) {
    throw Error(ErrorKind::DimensionMismatch, "distance field size differs from the graph's source image");
  }
  auto width_at = [&](Pixel p) {
    return std::max(0.0, 2.0 * std::sqrt(static_cast<double>(distance(p.x, p.y))) - 1.0);
  };
  const auto n = static_cast<std::ptrdiff_t>(graph.edges.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    Edge& e = graph.edges[static_cast<std::size_t>(i)];
    e.pixel_count = static_cast<int>(e.path.size());
    if (e.path.empty()) {
      if (!e.u_attach || !e.v_attach) continue;
      e.length = step_length(*e.u_attach, *e.v_attach);
      e.width = 0.5 * (width_at(*e.u_attach) + width_at(*e.v_attach));
      continue;
    }
    double length = 0.0;
    double width = 0.0;
    for (std::size_t k = 0; k < e.path.size(); ++k) {
      if (k > 0) length += step_length(e.path[k - 1], e.path[k]);
      width += width_at(e.path[k]);
    }
    if (e.u_attach) length += step_length(*e.u_attach, e.path.front());
    if (e.v_attach) length += step_length(e.path.back(), *e.v_attach);
    e.length = length;
    e.width = width / static_cast<double>(e.path.size());
  }
  return graph;
}

std::string check_pixel_partition(const BinaryImage& skeleton, const ExtractedGraph& graph) {
  Plane<std::uint8_t> hits(skeleton.width(), skeleton.height(), 0);
  auto claim = [&](Pixel p, const char* what, int id) -> std::string {
    std::ostringstream msg;
    if (!skeleton.contains(p.x, p.y) || !skeleton(p.x, p.y)) {
      msg << what << " " << id << " owns off-skeleton pixel (" << p.x << "," << p.y << ")";
      return msg.str();
    }
    if (hits(p.x, p.y)++) {
      msg << what << " " << id << " shares pixel (" << p.x << "," << p.y << ")";
      return msg.str();
    }
    return {};
  };
  for (const auto& v : graph.vertices) {
    for (const auto& p : v.pixels) {
      if (auto err = claim(p, "vertex", v.id); !err.empty()) return err;
    }
  }
  for (const auto& e : graph.edges) {
    for (const auto& p : e.path) {
      if (auto err = claim(p, "edge", e.id); !err.empty()) return err;
    }
  }
  for (int y = 0; y < skeleton.height(); ++y) {
    for (int x = 0; x < skeleton.width(); ++x) {
      if (skeleton(x, y) && !hits(x, y)) {
        std::ostringstream msg;
        msg << "skeleton pixel (" << x << "," << y << ") is not covered";
        return msg.str();
      }
    }
  }
  return {};
}

}  // namespace netgrab
