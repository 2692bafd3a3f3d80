#include "netgrab/graphio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace netgrab {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view token, std::size_t line, const char* what) {
  T value{};
  if constexpr (std::is_integral_v<T>) {
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec == std::errc{} && ptr == token.data() + token.size()) return value;
  } else {
    // from_chars for double is not available on every toolchain we build with.
    const std::string copy(token);
    char* end = nullptr;
    value = std::strtod(copy.c_str(), &end);
    if (!copy.empty() && end == copy.c_str() + copy.size() && std::isfinite(value)) return value;
  }
  throw FormatError(line, std::string("invalid ") + what + " '" + std::string(token) + "'");
}

std::string_view keyed(std::string_view token, std::string_view key, std::size_t line) {
  if (token.size() <= key.size() || token.substr(0, key.size()) != key || token[key.size()] != '=') {
    throw FormatError(line, "expected " + std::string(key) + "=<value>, got '" + std::string(token) + "'");
  }
  return token.substr(key.size() + 1);
}

void stamp(RgbImage& img, int cx, int cy, int side, Rgb color) {
  const int x0 = cx - (side - 1) / 2;
  const int y0 = cy - (side - 1) / 2;
  for (int y = std::max(0, y0); y < std::min(img.height(), y0 + side); ++y) {
    for (int x = std::max(0, x0); x < std::min(img.width(), x0 + side); ++x) img.set(x, y, color);
  }
}

std::vector<Pixel> line_pixels(Pixel a, Pixel b) {
  std::vector<Pixel> out;
  int dx = std::abs(b.x - a.x);
  int dy = -std::abs(b.y - a.y);
  const int sx = a.x < b.x ? 1 : -1;
  const int sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  for (Pixel p = a;;) {
    out.push_back(p);
    if (p == b) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      p.x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      p.y += sy;
    }
  }
  return out;
}

Pixel nearest_pixel(double x, double y) {
  return {static_cast<int>(round_half_away(x)), static_cast<int>(round_half_away(y))};
}

}  // namespace

std::string format_fixed4(double value) {
  const long long scaled = std::llround(value * 10000.0);  // half away from zero
  const bool negative = scaled < 0;
  const unsigned long long mag = negative ? 0ULL - static_cast<unsigned long long>(scaled)
                                          : static_cast<unsigned long long>(scaled);
  std::string frac = std::to_string(mag % 10000);
  frac.insert(0, 4 - frac.size(), '0');
  return (negative ? "-" : "") + std::to_string(mag / 10000) + "." + frac;
}

std::string serialize_graph(const ExtractedGraph& graph) {
  ExtractedGraph sorted = graph;
  sort_by_id(sorted);
  std::string out = "netgraph v1 " + std::to_string(graph.width) + " " + std::to_string(graph.height) + "\n";
  for (const auto& v : sorted.vertices) {
    out += "node " + std::to_string(v.id) + " " + format_fixed4(v.x) + " " + format_fixed4(v.y) + "\n";
  }
  for (const auto& e : sorted.edges) {
    out += "edge " + std::to_string(e.id) + " " + std::to_string(e.u) + " " + std::to_string(e.v) +
           " length=" + format_fixed4(e.length) + " width=" + format_fixed4(e.width) +
           " pixels=" + std::to_string(e.pixel_count) + "\n";
  }
  return out;
}

ExtractedGraph parse_graph(std::string_view text) {
  ExtractedGraph g;
  g.weights_only = true;
  bool header = false;
  std::set<int> node_ids;
  std::set<int> edge_ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() == '#') continue;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (!header) {
      if (tok.size() != 4 || tok[0] != "netgraph") throw FormatError(line_no, "missing 'netgraph' header");
      if (tok[1] != "v1") throw FormatError(line_no, "unsupported version '" + std::string(tok[1]) + "'");
      g.width = parse_number<int>(tok[2], line_no, "width");
      g.height = parse_number<int>(tok[3], line_no, "height");
      if (g.width < 1 || g.height < 1) throw FormatError(line_no, "image dimensions must be positive");
      header = true;
      continue;
    }
    if (tok[0] == "node") {
      if (tok.size() != 4) throw FormatError(line_no, "node line needs: node <id> <x> <y>");
      if (!g.edges.empty()) throw FormatError(line_no, "node lines must precede edge lines");
      Vertex v;
      v.id = parse_number<int>(tok[1], line_no, "node id");
      v.x = parse_number<double>(tok[2], line_no, "x");
      v.y = parse_number<double>(tok[3], line_no, "y");
      if (!node_ids.insert(v.id).second) throw FormatError(line_no, "duplicate node id " + std::to_string(v.id));
      g.vertices.push_back(v);
    } else if (tok[0] == "edge") {
      if (tok.size() != 7) {
        throw FormatError(line_no, "edge line needs: edge <id> <u> <v> length=<l> width=<w> pixels=<n>");
      }
      Edge e;
      e.id = parse_number<int>(tok[1], line_no, "edge id");
      e.u = parse_number<int>(tok[2], line_no, "vertex id");
      e.v = parse_number<int>(tok[3], line_no, "vertex id");
      for (const int end_id : {e.u, e.v}) {
        if (!node_ids.count(end_id)) {
          throw FormatError(line_no, "edge " + std::to_string(e.id) + " references missing node " +
                                         std::to_string(end_id));
        }
      }
      e.length = parse_number<double>(keyed(tok[4], "length", line_no), line_no, "length");
      e.width = parse_number<double>(keyed(tok[5], "width", line_no), line_no, "width");
      e.pixel_count = parse_number<int>(keyed(tok[6], "pixels", line_no), line_no, "pixel count");
      if (!edge_ids.insert(e.id).second) throw FormatError(line_no, "duplicate edge id " + std::to_string(e.id));
      g.edges.push_back(e);
    } else {
      throw FormatError(line_no, "unknown record '" + std::string(tok[0]) + "'");
    }
  }
  if (!header) throw FormatError(1, "missing 'netgraph' header");
  sort_by_id(g);
  return g;
}

void write_graph(const ExtractedGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  const std::string text = serialize_graph(graph);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

ExtractedGraph read_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

int vertex_marker_side(int width, int height) noexcept {
  const int side = static_cast<int>(round_half_away(0.006 * std::min(width, height)));
  return std::max(3, side);
}

RgbImage render_overlay(const RgbImage& base, const ExtractedGraph& graph) {
  if (base.width() != graph.width || base.height() != graph.height) {
    throw Error(ErrorKind::DimensionMismatch, "overlay base image size differs from the graph's source image");
  }
  RgbImage out = base;
  for (const auto& e : graph.edges) {
    const int thickness = std::max(1, static_cast<int>(round_half_away(e.width)));
    std::vector<Pixel> stroke = e.path;
    if (e.u_attach) stroke.insert(stroke.begin(), *e.u_attach);
    if (e.v_attach) stroke.push_back(*e.v_attach);
    if (stroke.empty()) {
      const Vertex* a = graph.find_vertex(e.u);
      const Vertex* b = graph.find_vertex(e.v);
      if (a && b) stroke = line_pixels(nearest_pixel(a->x, a->y), nearest_pixel(b->x, b->y));
    }
    for (const auto& p : stroke) stamp(out, p.x, p.y, thickness, kEdgeColor);
  }
  const int side = vertex_marker_side(base.width(), base.height());
  for (const auto& v : graph.vertices) {
    const int x0 = static_cast<int>(round_half_away(v.x - (side - 1) / 2.0));
    const int y0 = static_cast<int>(round_half_away(v.y - (side - 1) / 2.0));
    for (int y = std::max(0, y0); y < std::min(out.height(), y0 + side); ++y) {
      for (int x = std::max(0, x0); x < std::min(out.width(), x0 + side); ++x) out.set(x, y, kVertexColor);
    }
  }
  return out;
}

EdgeAttribute parse_edge_attribute(std::string_view name) {
  if (name == "length") return EdgeAttribute::Length;
  if (name == "width") return EdgeAttribute::Width;
  if (name == "pixel_count" || name == "pixels") return EdgeAttribute::PixelCount;
  throw Error(ErrorKind::InvalidParameter, "unknown edge attribute '" + std::string(name) + "'");
}

EdgeHistogram edge_histogram(const ExtractedGraph& graph, EdgeAttribute attribute, int bin_count) {
  if (bin_count < 1) throw Error(ErrorKind::InvalidParameter, "bin_count must be >= 1");
  if (graph.edges.empty()) throw Error(ErrorKind::EmptyGraph, "graph has no edges");
  std::vector<double> values;
  values.reserve(graph.edges.size());
  for (const auto& e : graph.edges) {
    switch (attribute) {
      case EdgeAttribute::Length: values.push_back(e.length); break;
      case EdgeAttribute::Width: values.push_back(e.width); break;
      case EdgeAttribute::PixelCount: values.push_back(e.pixel_count); break;
    }
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  EdgeHistogram h;
  if (hi == lo) {
    h.bin_edges = {lo, hi};
    h.counts = {values.size()};
    return h;
  }
  const auto bins = static_cast<std::size_t>(bin_count);
  h.counts.assign(bins, 0);
  h.bin_edges.resize(bins + 1);
  const double span = hi - lo;
  for (std::size_t i = 0; i <= bins; ++i) {
    h.bin_edges[i] = lo + span * static_cast<double>(i) / static_cast<double>(bins);
  }
  h.bin_edges.back() = hi;
  for (const double v : values) {
    auto bin = static_cast<std::size_t>((v - lo) / span * static_cast<double>(bins));
    ++h.counts[std::min(bin, bins - 1)];
  }
  return h;
}

}  // namespace netgrab
