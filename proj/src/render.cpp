#include "dehnlift/render.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "dehnlift/errors.hpp"
#include "refined.hpp"

namespace dehnlift {

namespace {

constexpr double kCanvas = 1000.0;

// ---------------------------------------------------------------------------
// Dart-level map of one component, rebuilt locally for layout purposes.
// ---------------------------------------------------------------------------

struct MapDarts {
  // Edge e of curve ci runs from its crossing event j to event j+1.
  struct EdgeRec {
    int curve = 0;  // index into diagram curves
    int index = 0;  // crossing-subsequence edge index
    std::string from, to;  // crossing ids
  };
  std::vector<EdgeRec> edges;
  std::vector<int> next_ccw;       // dart = 2*edge + (0 fwd | 1 bwd)
  std::vector<int> face_of_dart;   // traced faces
  int face_count = 0;
  std::vector<std::vector<int>> face_darts;  // per face, in walk order

  static int rev(int d) { return d ^ 1; }
};

MapDarts build_map_darts(const Diagram& d, const std::string& component) {
  MapDarts m;
  std::map<std::string, std::vector<std::pair<int, int>>> flags;  // crossing -> (ci, k)
  std::vector<std::vector<int>> positions(d.curves.size());
  std::map<std::pair<int, int>, int> edge_index;  // (ci, j) -> edge id
  for (int ci = 0; ci < static_cast<int>(d.curves.size()); ++ci) {
    const Curve& c = d.curves[ci];
    if (c.component != component) continue;
    int k = 0;
    for (int i = 0; i < static_cast<int>(c.events.size()); ++i) {
      if (c.events[i].kind != Event::Kind::kCrossing) continue;
      positions[ci].push_back(i);
      flags[c.events[i].ref].push_back({ci, k});
      ++k;
    }
    for (int j = 0; j < k; ++j) {
      edge_index[{ci, j}] = static_cast<int>(m.edges.size());
      m.edges.push_back({ci, j, "", ""});
    }
  }
  for (auto& [xid, fl] : flags) {
    std::sort(fl.begin(), fl.end(), [&](const auto& a, const auto& b) {
      return std::tie(d.curves[a.first].id, a.second) < std::tie(d.curves[b.first].id, b.second);
    });
  }
  for (auto& e : m.edges) {
    const Curve& c = d.curves[e.curve];
    int mtot = static_cast<int>(positions[e.curve].size());
    e.from = c.events[positions[e.curve][e.index]].ref;
    e.to = c.events[positions[e.curve][(e.index + 1) % mtot]].ref;
  }
  m.next_ccw.assign(2 * m.edges.size(), -1);
  for (const auto& [xid, fl] : flags) {
    if (fl.size() != 2) throw UnsupportedDiagramError("crossing " + xid + " is not 2 passes");
    auto [c1, k1] = fl[0];
    auto [c2, k2] = fl[1];
    int m1 = static_cast<int>(positions[c1].size());
    int m2 = static_cast<int>(positions[c2].size());
    int out1 = 2 * edge_index.at({c1, k1});
    int in1 = 2 * edge_index.at({c1, (k1 - 1 + m1) % m1}) + 1;
    int out2 = 2 * edge_index.at({c2, k2});
    int in2 = 2 * edge_index.at({c2, (k2 - 1 + m2) % m2}) + 1;
    std::vector<int> ring = d.crossings.at(xid).handedness >= 0
                                ? std::vector<int>{out1, out2, in1, in2}
                                : std::vector<int>{out1, in2, in1, out2};
    for (int i = 0; i < 4; ++i) m.next_ccw[ring[i]] = ring[(i + 1) % 4];
  }
  m.face_of_dart.assign(2 * m.edges.size(), -1);
  for (int start = 0; start < static_cast<int>(m.face_of_dart.size()); ++start) {
    if (m.face_of_dart[start] >= 0) continue;
    int face = m.face_count++;
    m.face_darts.emplace_back();
    int dart = start;
    do {
      m.face_of_dart[dart] = face;
      m.face_darts[face].push_back(dart);
      dart = m.next_ccw[MapDarts::rev(dart)];
    } while (dart != start);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Tutte solve: free nodes at the average of their neighbors.
// ---------------------------------------------------------------------------

std::vector<Point> solve_positions(int node_count,
                                   const std::set<std::pair<int, int>>& edges,
                                   const std::map<int, Point>& pinned) {
  std::vector<int> free_index(node_count, -1);
  std::vector<int> free_nodes;
  for (int v = 0; v < node_count; ++v) {
    if (!pinned.count(v)) {
      free_index[v] = static_cast<int>(free_nodes.size());
      free_nodes.push_back(v);
    }
  }
  int nf = static_cast<int>(free_nodes.size());
  std::vector<Point> pos(node_count);
  for (const auto& [v, p] : pinned) pos[v] = p;
  if (nf == 0) return pos;

  std::vector<std::vector<double>> a(nf, std::vector<double>(nf, 0.0));
  std::vector<double> bx(nf, 0.0), by(nf, 0.0);
  for (const auto& [u, v] : edges) {
    for (auto [s, t] : {std::pair{u, v}, std::pair{v, u}}) {
      if (free_index[s] < 0) continue;
      int i = free_index[s];
      a[i][i] += 1.0;
      if (free_index[t] >= 0) {
        a[i][free_index[t]] -= 1.0;
      } else {
        bx[i] += pos[t].x;
        by[i] += pos[t].y;
      }
    }
  }
  // Gaussian elimination with partial pivoting; systems here are tiny.
  for (int col = 0; col < nf; ++col) {
    int pivot = col;
    for (int row = col + 1; row < nf; ++row) {
      if (std::fabs(a[row][col]) > std::fabs(a[pivot][col])) pivot = row;
    }
    if (std::fabs(a[pivot][col]) < 1e-14) {
      throw InternalError("singular layout system (disconnected from the boundary?)");
    }
    std::swap(a[col], a[pivot]);
    std::swap(bx[col], bx[pivot]);
    std::swap(by[col], by[pivot]);
    for (int row = col + 1; row < nf; ++row) {
      double f = a[row][col] / a[col][col];
      if (f == 0.0) continue;
      for (int k = col; k < nf; ++k) a[row][k] -= f * a[col][k];
      bx[row] -= f * bx[col];
      by[row] -= f * by[col];
    }
  }
  std::vector<double> x(nf), y(nf);
  for (int row = nf - 1; row >= 0; --row) {
    double sx = bx[row], sy = by[row];
    for (int k = row + 1; k < nf; ++k) {
      sx -= a[row][k] * x[k];
      sy -= a[row][k] * y[k];
    }
    x[row] = sx / a[row][row];
    y[row] = sy / a[row][row];
  }
  for (int i = 0; i < nf; ++i) pos[free_nodes[i]] = {x[i], y[i]};
  return pos;
}

bool segments_cross(Point a, Point b, Point c, Point d, double eps) {
  auto orient = [](Point p, Point q, Point r) {
    return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
  };
  auto on_box = [&](Point p, Point q, Point r) {
    return std::min(p.x, q.x) - eps <= r.x && r.x <= std::max(p.x, q.x) + eps &&
           std::min(p.y, q.y) - eps <= r.y && r.y <= std::max(p.y, q.y) + eps;
  };
  double o1 = orient(a, b, c), o2 = orient(a, b, d);
  double o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > eps && o2 < -eps) || (o1 < -eps && o2 > eps)) &&
      ((o3 > eps && o4 < -eps) || (o3 < -eps && o4 > eps))) {
    return true;
  }
  // Near-collinear overlaps count as intersections too.
  if (std::fabs(o1) <= eps && on_box(a, b, c)) return true;
  if (std::fabs(o2) <= eps && on_box(a, b, d)) return true;
  if (std::fabs(o3) <= eps && on_box(c, d, a)) return true;
  if (std::fabs(o4) <= eps && on_box(c, d, b)) return true;
  return false;
}

struct Seg {
  Point a, b;
};

std::vector<Seg> layout_segments(const Layout& layout) {
  std::vector<Seg> segs;
  for (const auto& [key, poly] : layout.edges) {
    for (size_t i = 0; i + 1 < poly.size(); ++i) segs.push_back({poly[i], poly[i + 1]});
  }
  return segs;
}

bool same_point(Point p, Point q) { return p.x == q.x && p.y == q.y; }

}  // namespace

namespace {

std::string planarity_violation(const Layout& layout, double tolerance) {
  std::vector<Seg> segs = layout_segments(layout);
  double scale = std::max(layout.width, layout.height);
  double eps = tolerance * scale;
  for (size_t i = 0; i < segs.size(); ++i) {
    for (size_t j = i + 1; j < segs.size(); ++j) {
      const Seg& s = segs[i];
      const Seg& t = segs[j];
      if (same_point(s.a, t.a) || same_point(s.a, t.b) || same_point(s.b, t.a) ||
          same_point(s.b, t.b)) {
        continue;
      }
      if (segments_cross(s.a, s.b, t.a, t.b, eps)) {
        std::ostringstream msg;
        msg << "segments (" << s.a.x << "," << s.a.y << ")-(" << s.b.x << "," << s.b.y
            << ") and (" << t.a.x << "," << t.a.y << ")-(" << t.b.x << "," << t.b.y
            << ") intersect";
        return msg.str();
      }
    }
  }
  return {};
}

}  // namespace

bool check_planarity(const Layout& layout, double tolerance) {
  return planarity_violation(layout, tolerance).empty();
}

// ---------------------------------------------------------------------------
// tutte_layout
// ---------------------------------------------------------------------------

namespace {

Layout circle_layout(const Diagram& d, const std::string& component) {
  // A lone embedded circle: drawn as a round polygon.
  Layout layout;
  layout.component = component;
  const Curve* circle = nullptr;
  for (const auto& c : d.curves) {
    if (c.component == component) circle = &c;
  }
  std::vector<Point> poly;
  const int kSamples = 96;
  for (int i = 0; i <= kSamples; ++i) {
    // i % kSamples keeps the closing point bit-identical to the first one.
    double ang = 2 * M_PI * (i % kSamples) / kSamples;
    poly.push_back({500 + 330 * std::cos(ang), 500 + 330 * std::sin(ang)});
  }
  layout.edges[{circle->id, 0}] = poly;
  for (const auto& p : d.marked_points) {
    if (p.at.curve != circle->id) continue;
    double r = p.at.side == Side::kLeft ? 220 : 440;
    layout.points[p.id] = {500 + r, 500};
  }
  if (d.basepoint && d.basepoint->curve == circle->id) {
    layout.has_basepoint = true;
    double r = d.basepoint->side == Side::kLeft ? 220 : 440;
    layout.basepoint = {500, 500 + r};
  }
  return layout;
}

}  // namespace

Layout tutte_layout(const Diagram& d, const std::string& component) {
  if (!d.find_component(component)) {
    throw ValidationFailure("unknown component " + component);
  }
  bool any_crossing = false;
  for (const auto& c : d.curves) {
    if (c.component == component && c.crossing_event_count() > 0) any_crossing = true;
  }
  if (!any_crossing) return circle_layout(d, component);

  MapDarts m = build_map_darts(d, component);

  // Faces of this component in the canonical diagram order, to pick the
  // outer face: the basepoint face when it is here, else the longest walk.
  std::vector<Face> all_faces = faces(d);
  int outer = -1;
  if (d.basepoint && d.find_curve(d.basepoint->curve)->component == component) {
    // Identify the dart-face holding the basepoint corner.
    int ci = -1;
    for (int i = 0; i < static_cast<int>(d.curves.size()); ++i) {
      if (d.curves[i].id == d.basepoint->curve) ci = i;
    }
    // Locate the edge covering the basepoint segment.
    for (int e = 0; e < static_cast<int>(m.edges.size()) && outer < 0; ++e) {
      if (m.edges[e].curve != ci) continue;
      const Curve& c = d.curves[ci];
      std::vector<int> pos;
      for (int i = 0; i < static_cast<int>(c.events.size()); ++i) {
        if (c.events[i].kind == Event::Kind::kCrossing) pos.push_back(i);
      }
      int from = pos[m.edges[e].index];
      int to = pos[(m.edges[e].index + 1) % pos.size()];
      int len = static_cast<int>(c.events.size());
      int span = (to - from + len - 1) % len + 1;
      for (int s = 0; s < span; ++s) {
        if ((from + s) % len == d.basepoint->segment) {
          outer = m.face_of_dart[2 * e + (d.basepoint->side == Side::kLeft ? 0 : 1)];
        }
      }
    }
  }
  if (outer < 0) {
    int best = -1;
    for (int f = 0; f < m.face_count; ++f) {
      if (static_cast<int>(m.face_darts[f].size()) > best) {
        best = static_cast<int>(m.face_darts[f].size());
        outer = f;
      }
    }
  }

  // Expand every crossing into a 4-cycle of corner nodes, one per dart in
  // ring order. Loops and parallel edges then attach to distinct corners, so
  // the barycentric system has no collapsing symmetries. Each edge carries
  // one interior point; a crossing's drawn position is its center node.
  int total_nodes = 0;
  std::vector<int> corner(2 * m.edges.size(), -1);  // per dart
  for (int d = 0; d < static_cast<int>(corner.size()); ++d) corner[d] = total_nodes++;
  std::vector<int> mid(m.edges.size());
  for (size_t e = 0; e < m.edges.size(); ++e) mid[e] = total_nodes++;
  std::map<std::string, int> center;
  for (const auto& e : m.edges) {
    if (!center.count(e.from)) center[e.from] = total_nodes++;
    if (!center.count(e.to)) center[e.to] = total_nodes++;
  }
  std::vector<int> face_node(m.face_count, -1);
  for (int f = 0; f < m.face_count; ++f) {
    if (f != outer) face_node[f] = total_nodes++;
  }

  std::set<std::pair<int, int>> springs;
  auto link = [&](int u, int v) {
    if (u != v) springs.insert({std::min(u, v), std::max(u, v)});
  };
  // Crossing 4-cycles and their centers, in stored ring order.
  std::map<std::string, std::vector<int>> ring_of;
  for (int dart = 0; dart < static_cast<int>(corner.size()); ++dart) {
    const auto& rec = m.edges[dart / 2];
    ring_of[dart % 2 == 0 ? rec.from : rec.to];  // ensure the key exists
  }
  for (auto& [xid, ring] : ring_of) {
    // Recover the ring from next_ccw: pick any dart at this vertex and walk.
    int start = -1;
    for (int dart = 0; dart < static_cast<int>(corner.size()) && start < 0; ++dart) {
      const auto& rec = m.edges[dart / 2];
      const std::string& anchor = dart % 2 == 0 ? rec.from : rec.to;
      if (anchor == xid) start = dart;
    }
    int dart = start;
    do {
      ring.push_back(dart);
      dart = m.next_ccw[dart];
    } while (dart != start);
    for (size_t i = 0; i < ring.size(); ++i) {
      link(corner[ring[i]], corner[ring[(i + 1) % ring.size()]]);
      link(center.at(xid), corner[ring[i]]);
    }
  }
  for (size_t e = 0; e < m.edges.size(); ++e) {
    link(corner[2 * e], mid[e]);
    link(mid[e], corner[2 * e + 1]);
  }
  for (int f = 0; f < m.face_count; ++f) {
    if (f == outer) continue;
    for (int dart : m.face_darts[f]) {
      link(face_node[f], corner[dart]);
      link(face_node[f], mid[dart / 2]);
      link(face_node[f], corner[MapDarts::rev(dart)]);
    }
  }

  // Pin the outer face walk on a circle: tail corner, edge point, head
  // corner per traversed dart, in walk order.
  std::vector<int> boundary;
  for (int dart : m.face_darts[outer]) {
    boundary.push_back(corner[dart]);
    boundary.push_back(mid[dart / 2]);
    boundary.push_back(corner[MapDarts::rev(dart)]);
  }
  std::map<int, Point> pinned;
  int bn = static_cast<int>(boundary.size());
  for (int i = 0; i < bn; ++i) {
    double ang = 2 * M_PI * i / bn - M_PI / 2;
    Point p{500 + 430 * std::cos(ang), 500 + 430 * std::sin(ang)};
    pinned.emplace(boundary[i], p);
  }

  std::vector<Point> pos = solve_positions(total_nodes, springs, pinned);

  // Residual check of the barycentric system on free nodes.
  {
    std::map<int, std::vector<int>> adjacency;
    for (const auto& [u, v] : springs) {
      adjacency[u].push_back(v);
      adjacency[v].push_back(u);
    }
    double worst = 0;
    for (const auto& [v, nbrs] : adjacency) {
      if (pinned.count(v)) continue;
      double rx = 0, ry = 0;
      for (int w : nbrs) {
        rx += pos[w].x - pos[v].x;
        ry += pos[w].y - pos[v].y;
      }
      worst = std::max(worst, std::hypot(rx, ry) / static_cast<double>(nbrs.size()));
    }
    if (worst > 1e-10 * kCanvas) {
      throw InternalError("layout solve residual too large");
    }
  }

  Layout layout;
  layout.component = component;
  for (const auto& [xid, node] : center) layout.crossings[xid] = pos[node];
  for (size_t e = 0; e < m.edges.size(); ++e) {
    const auto& rec = m.edges[e];
    layout.edges[{d.curves[rec.curve].id, rec.index}] = {
        pos[center.at(rec.from)], pos[corner[2 * e]], pos[mid[e]], pos[corner[2 * e + 1]],
        pos[center.at(rec.to)]};
  }

  // Marked points and basepoint: at the face node of their face, or at fixed
  // margin spots when they live in the outer face.
  auto face_spot = [&](const FaceLocator& at, int stack) -> Point {
    // Find the dart face owning the locator.
    int ci = -1;
    for (int i = 0; i < static_cast<int>(d.curves.size()); ++i) {
      if (d.curves[i].id == at.curve) ci = i;
    }
    const Curve& c = d.curves[ci];
    std::vector<int> posn;
    for (int i = 0; i < static_cast<int>(c.events.size()); ++i) {
      if (c.events[i].kind == Event::Kind::kCrossing) posn.push_back(i);
    }
    for (int e = 0; e < static_cast<int>(m.edges.size()); ++e) {
      if (m.edges[e].curve != ci) continue;
      int from = posn[m.edges[e].index];
      int to = posn[(m.edges[e].index + 1) % posn.size()];
      int len = static_cast<int>(c.events.size());
      int span = (to - from + len - 1) % len + 1;
      for (int s = 0; s < span; ++s) {
        if ((from + s) % len != at.segment) continue;
        int f = m.face_of_dart[2 * e + (at.side == Side::kLeft ? 0 : 1)];
        if (f == outer) return {60.0, 60.0 + 45.0 * stack};
        return pos[face_node[f]];
      }
    }
    throw ValidationFailure("locator not found in layout");
  };
  int stack = 0;
  for (const auto& p : d.marked_points) {
    const Curve* c = d.find_curve(p.at.curve);
    if (!c || c->component != component) continue;
    layout.points[p.id] = face_spot(p.at, stack++);
  }
  if (d.basepoint && d.find_curve(d.basepoint->curve)->component == component) {
    layout.has_basepoint = true;
    layout.basepoint = face_spot(*d.basepoint, stack++);
  }

  if (std::string why = planarity_violation(layout, 1e-9); !why.empty()) {
    throw InternalError("tutte layout failed the planarity check: " + why);
  }
  return layout;
}

// ---------------------------------------------------------------------------
// SVG emission
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  // Deterministic fixed-point form, 1e-6 grid.
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

const char* kPalette[] = {"#c62828", "#1565c0", "#2e7d32", "#6a1b9a",
                          "#ef6c00", "#00838f", "#558b2f", "#4527a0"};

}  // namespace

std::string render_svg(const Layout& layout, const Diagram& d) {
  // Sister pairs share a color, in canonical pairing order.
  std::map<std::string, std::string> color_of;
  std::vector<SisterPairing> pairs = d.pairing;
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.curve_a < b.curve_a; });
  int next = 0;
  for (const auto& p : pairs) {
    const char* color = kPalette[next++ % (sizeof(kPalette) / sizeof(kPalette[0]))];
    color_of[p.curve_a] = color;
    color_of[p.curve_b] = color;
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(layout.width)
      << "\" height=\"" << fmt(layout.height) << "\" viewBox=\"0 0 " << fmt(layout.width) << " "
      << fmt(layout.height) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& [key, poly] : layout.edges) {
    auto it = color_of.find(key.first);
    std::string color = it != color_of.end() ? it->second : "#333333";
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < poly.size(); ++i) {
      if (i) svg << " ";
      svg << fmt(poly[i].x) << "," << fmt(poly[i].y);
    }
    svg << "\"/>\n";
  }
  for (const auto& [xid, p] : layout.crossings) {
    svg << "<circle cx=\"" << fmt(p.x) << "\" cy=\"" << fmt(p.y)
        << "\" r=\"3.5\" fill=\"#111111\"/>\n";
  }
  for (const auto& [pid, p] : layout.points) {
    svg << "<circle cx=\"" << fmt(p.x) << "\" cy=\"" << fmt(p.y)
        << "\" r=\"5\" fill=\"#d32f2f\"/>\n";
    svg << "<text x=\"" << fmt(p.x + 8) << "\" y=\"" << fmt(p.y - 6)
        << "\" font-size=\"16\" font-family=\"monospace\">" << pid << "</text>\n";
  }
  if (layout.has_basepoint) {
    const Point& p = layout.basepoint;
    svg << "<rect x=\"" << fmt(p.x - 4) << "\" y=\"" << fmt(p.y - 4)
        << "\" width=\"8\" height=\"8\" fill=\"#1b5e20\"/>\n";
    svg << "<text x=\"" << fmt(p.x + 8) << "\" y=\"" << fmt(p.y - 6)
        << "\" font-size=\"16\" font-family=\"monospace\">x</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_diagram_svg(const Diagram& d) {
  std::ostringstream out;
  std::vector<std::string> comps;
  for (const auto& s : d.components) comps.push_back(s.id);
  std::sort(comps.begin(), comps.end());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kCanvas * comps.size())
      << "\" height=\"" << fmt(kCanvas) << "\">\n";
  for (size_t i = 0; i < comps.size(); ++i) {
    Layout l = tutte_layout(d, comps[i]);
    out << "<g transform=\"translate(" << fmt(kCanvas * i) << ",0)\">\n";
    std::string inner = render_svg(l, d);
    // Strip the nested svg element, keep its children.
    auto first = inner.find('\n');
    auto last = inner.rfind("</svg>");
    out << inner.substr(first + 1, last - first - 1);
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// fan_layout
//
// The cut-open base (cut along both arcs of the star) is a disk; it is drawn
// once as a template in the sector 0 <= theta <= 2*pi/n with the whole cut
// boundary pinned: the first arc runs from the basepoint radius down to the
// center (the lift of the first branch point), the second from the basepoint
// radius out to the rim (representing the second branch point at infinity).
// Crossings are expanded into small 4-cycles as in tutte_layout and the
// interior is solved barycentrically over the refined complex, one face node
// per refined cell. The n sheets are rotated copies; curve lifts leave a
// sector through a pinned boundary point and re-enter the neighbouring one
// at the same canvas position.
// ---------------------------------------------------------------------------

Layout fan_layout(const LiftResult& lift) {
  const Diagram& base = lift.base;
  const MonodromySpec& spec = lift.spec;
  const int n = spec.sheets;
  if (base.marked_points.size() != 2 || base.cut_arcs.size() != 2) {
    throw ValidationFailure("fan layout needs a two-point (diametral) base");
  }
  for (const auto& p : base.marked_points) {
    auto it = spec.sigma.find(p.id);
    if (it == spec.sigma.end() || !it->second.is_full_cycle()) {
      throw ValidationFailure("fan layout needs a locally cyclic lift (missing sheet tags)");
    }
  }
  const std::string& p1 = spec.departure_order.front();
  const std::string& p2 = spec.departure_order.back();
  const Permutation& sigma1 = spec.sigma.at(p1);
  const Permutation sigma1_inv = inverse(sigma1);

  // Crossing the radial cut counterclockwise applies sigma_1^-1 (the first
  // arc points inward, so a counterclockwise pass crosses it left to right),
  // hence consecutive sectors host the sigma_1^-1 orbit of sheet 1.
  std::vector<int> sector_of(n + 1, 0);
  {
    int u = 1;
    for (int k = 0; k < n; ++k) {
      sector_of[u] = k;
      u = sigma1_inv(u);
    }
  }

  internal::BaseIndex bi = internal::BaseIndex::build(base);
  internal::RefinedComplex rc = internal::build_refined(base, bi, spec.departure_order);

  int a1 = -1, a2 = -1;
  for (int i = 0; i < static_cast<int>(base.cut_arcs.size()); ++i) {
    if (base.cut_arcs[i].target == p1) a1 = i;
    if (base.cut_arcs[i].target == p2) a2 = i;
  }
  if (a1 < 0 || a2 < 0) throw ValidationFailure("fan layout needs one cut arc per marked point");

  const double r_center = 6.0;
  const double r_x = 180.0;
  const double r_out = 460.0;
  const double sector = n == 1 ? 2 * M_PI - 0.35 : 2 * M_PI / n;
  auto polar = [&](double r, double theta) -> Point {
    return {500 + r * std::cos(theta - M_PI / 2), 500 + r * std::sin(theta - M_PI / 2)};
  };

  // Vertices along an arc: 0 = basepoint, 1..k = crossing points, k+1 = tip.
  auto arc_vertex_radius = [&](int arc, int v) -> double {
    int k = static_cast<int>(base.cut_arcs[arc].word.size());
    double t = static_cast<double>(v) / (k + 1);
    return arc == a1 ? r_x + (r_center - r_x) * t : r_x + (r_out - r_x) * t;
  };
  // Which radial edge of the template carries a given side of an arc: the
  // first arc points inward, the second outward, so their left sides land on
  // opposite edges. Returns 0 for the low edge and 1 for the high edge.
  auto side_edge = [&](int arc, Side side) -> int {
    if (arc == a1) return side == Side::kLeft ? 1 : 0;
    return side == Side::kLeft ? 0 : 1;
  };
  // Pinned positions are computed once per absolute radial line so pieces of
  // neighbouring sectors share bit-identical endpoints.
  auto boundary_point = [&](int arc, int v, int line) -> Point {
    return polar(arc_vertex_radius(arc, v), line * (2 * M_PI / n));
  };

  // --- Template node inventory ---------------------------------------------
  int total_nodes = 0;
  std::map<int, Point> pinned;
  // (arc, vertex, edge 0|1) -> node; the two x copies are shared by the arcs.
  std::map<std::tuple<int, int, int>, int> side_node;
  auto boundary_node = [&](int arc, int v, Side side) -> int {
    int edge = side_edge(arc, side);
    std::tuple<int, int, int> key{arc, v, edge};
    if (v == 0) key = {-1, 0, edge};  // the basepoint copy is shared
    auto it = side_node.find(key);
    if (it != side_node.end()) return it->second;
    int node = total_nodes++;
    side_node[key] = node;
    double r = v == 0 ? r_x : arc_vertex_radius(arc, v);
    double theta = edge * (n == 1 ? sector : 2 * M_PI / n);
    pinned[node] = polar(r, theta);
    return node;
  };

  std::map<std::string, int> center;
  std::map<int, int> corner;  // refined dart (at a crossing) -> node
  std::vector<int> mid(rc.curve_edge_total, -1);
  for (const auto& [xid, x] : base.crossings) center[xid] = total_nodes++;
  for (int e = 0; e < rc.curve_edge_total; ++e) mid[e] = total_nodes++;

  // Attach node of a curve sub-edge end: a crossing corner or a pinned
  // boundary copy at the arc crossing, depending on the event there.
  auto event_vertex_attach = [&](int ci, int event_idx, bool leaving) -> int {
    const Curve& c = base.curves[ci];
    const Event& e = c.events[event_idx];
    int L = static_cast<int>(c.events.size());
    if (e.kind == Event::Kind::kCrossing) {
      int dart = leaving ? rc.curve_fwd(ci, event_idx)
                         : rc.curve_bwd(ci, (event_idx - 1 + L) % L);
      auto it = corner.find(dart);
      if (it != corner.end()) return it->second;
      int node = total_nodes++;
      corner[dart] = node;
      return node;
    }
    int ai = bi.arc_index.at(e.ref);
    int entry = -1;
    for (int j = 0; j < static_cast<int>(base.cut_arcs[ai].word.size()); ++j) {
      const auto& w = base.cut_arcs[ai].word[j];
      if (w.curve == c.id && w.segment == event_idx) entry = j;
    }
    if (entry < 0) throw InternalError("cut event without a matching arc entry");
    // Sign +1: the curve crosses right to left; it arrives on the right copy
    // and leaves on the left copy.
    Side side = leaving ? (e.sign > 0 ? Side::kLeft : Side::kRight)
                        : (e.sign > 0 ? Side::kRight : Side::kLeft);
    return boundary_node(ai, entry + 1, side);
  };

  std::set<std::pair<int, int>> springs;
  auto link = [&](int u, int v) {
    if (u != v) springs.insert({std::min(u, v), std::max(u, v)});
  };

  // Curve chains (this also allocates every crossing corner node).
  for (int ci = 0; ci < static_cast<int>(base.curves.size()); ++ci) {
    const Curve& c = base.curves[ci];
    int L = static_cast<int>(c.events.size());
    for (int seg = 0; seg < L; ++seg) {
      int from = event_vertex_attach(ci, seg, true);
      int to = event_vertex_attach(ci, (seg + 1) % L, false);
      int e = rc.curve_edge_base[ci] + seg;
      link(from, mid[e]);
      link(mid[e], to);
    }
  }
  // Crossing 4-cycles and centers, in stored ring order.
  for (const auto& [xid, xnode] : center) {
    int start = -1;
    for (const auto& [dart, node] : corner) {
      const Curve* c = nullptr;
      // dart -> anchored crossing id
      int edge = dart / 2;
      int ci = static_cast<int>(std::upper_bound(rc.curve_edge_base.begin(),
                                                 rc.curve_edge_base.end(), edge) -
                                rc.curve_edge_base.begin()) -
               1;
      c = &base.curves[ci];
      int seg = edge - rc.curve_edge_base[ci];
      int event_idx = dart % 2 == 0 ? seg : (seg + 1) % static_cast<int>(c->events.size());
      if (c->events[event_idx].kind == Event::Kind::kCrossing && c->events[event_idx].ref == xid) {
        start = dart;
        break;
      }
    }
    if (start < 0) throw InternalError("crossing without corner darts");
    std::vector<int> ring;
    int dart = start;
    do {
      ring.push_back(dart);
      dart = rc.next_ccw[dart];
    } while (dart != start);
    for (size_t i = 0; i < ring.size(); ++i) {
      link(corner.at(ring[i]), corner.at(ring[(i + 1) % ring.size()]));
      link(xnode, corner.at(ring[i]));
    }
  }
  // One face node per refined cell, fanned to every node its walk passes.
  // The cell wrapping the second branch point spans the whole rim of the
  // sector; pinning its node mid-rim keeps the solve two-dimensional (for
  // n = 2 every cut boundary node lies on one diameter).
  std::vector<int> face_node(rc.face_total, -1);
  int rim_cell = rc.tip_cell(a2);
  for (int f = 0; f < rc.face_total; ++f) {
    face_node[f] = total_nodes++;
    if (f == rim_cell) pinned[face_node[f]] = polar(r_out * 0.92, sector / 2);
    for (int dart : rc.face_darts[f]) {
      if (rc.is_arc_dart(dart)) {
        int edge = dart / 2;
        int ai = static_cast<int>(std::upper_bound(rc.arc_edge_base.begin(),
                                                   rc.arc_edge_base.end(), edge) -
                                  rc.arc_edge_base.begin()) -
                 1;
        int j = edge - rc.arc_edge_base[ai];
        Side side = dart % 2 == 0 ? Side::kLeft : Side::kRight;
        link(face_node[f], boundary_node(ai, j, side));
        link(face_node[f], boundary_node(ai, j + 1, side));
      } else {
        int edge = dart / 2;
        int ci = static_cast<int>(std::upper_bound(rc.curve_edge_base.begin(),
                                                   rc.curve_edge_base.end(), edge) -
                                  rc.curve_edge_base.begin()) -
                 1;
        int seg = edge - rc.curve_edge_base[ci];
        int L = static_cast<int>(base.curves[ci].events.size());
        link(face_node[f], mid[edge]);
        link(face_node[f], event_vertex_attach(ci, seg, true));
        link(face_node[f], event_vertex_attach(ci, (seg + 1) % L, false));
      }
    }
  }

  std::vector<Point> pos = solve_positions(total_nodes, springs, pinned);

  // --- Replicate into sectors ----------------------------------------------
  Layout layout;
  layout.component = lift.lifted.components.front().id;
  auto rotate_into = [&](Point p, int sheet) -> Point {
    double ang = sector_of[sheet] * (2 * M_PI / n);
    double cx = p.x - 500, cy = p.y - 500;
    double ca = std::cos(ang), sa = std::sin(ang);
    return {500 + cx * ca - cy * sa, 500 + cx * sa + cy * ca};
  };
  // Boundary attach points in absolute coordinates: line index = sector of
  // the sheet the piece lies in, plus one if the template put the node on the
  // high edge.
  auto boundary_abs = [&](int ci, int event_idx, bool leaving, int sheet) -> Point {
    const Event& e = base.curves[ci].events[event_idx];
    int ai = bi.arc_index.at(e.ref);
    int entry = -1;
    for (int j = 0; j < static_cast<int>(base.cut_arcs[ai].word.size()); ++j) {
      const auto& w = base.cut_arcs[ai].word[j];
      if (w.curve == base.curves[ci].id && w.segment == event_idx) entry = j;
    }
    Side side = leaving ? (e.sign > 0 ? Side::kLeft : Side::kRight)
                        : (e.sign > 0 ? Side::kRight : Side::kLeft);
    int line = (sector_of[sheet] + side_edge(ai, side)) % n;
    if (n == 1) {
      // the slit stays open: use the template coordinates directly
      int edge = side_edge(ai, side);
      return polar(arc_vertex_radius(ai, entry + 1), edge * sector);
    }
    return boundary_point(ai, entry + 1, line);
  };

  for (const auto& lc : lift.lifted.curves) {
    const auto& prov = lift.provenance.curves.at(lc.id);
    int ci = bi.curve_index.at(prov.base);
    const Curve& c = base.curves[ci];
    int L = static_cast<int>(c.events.size());
    int base_m = c.crossing_event_count();
    if (base_m == 0) continue;  // circles never reach here for fan inputs
    int lifted_m = 0;
    for (const auto& e : lc.events) {
      if (e.kind == Event::Kind::kCrossing) ++lifted_m;
    }
    int wraps = lifted_m / base_m;
    int start = 0;
    while (c.events[start].kind != Event::Kind::kCrossing) start = (start + 1) % L;
    int u = prov.sheet;
    for (int i = 0; i < start; ++i) {
      const Event& e = c.events[i];
      if (e.kind == Event::Kind::kCut) {
        const Permutation& sg = spec.sigma.at(base.cut_arcs.at(bi.arc_index.at(e.ref)).target);
        u = e.sign > 0 ? sg(u) : inverse(sg)(u);
      }
    }
    std::vector<std::vector<Point>> edge_polys;
    std::vector<Point> current;
    for (int t = 0; t < wraps * L; ++t) {
      int idx = (start + t) % L;
      const Event& e = c.events[idx];
      if (e.kind == Event::Kind::kCrossing) {
        Point pc = rotate_into(pos[center.at(e.ref)], u);
        if (!current.empty()) {
          current.push_back(rotate_into(pos[event_vertex_attach(ci, idx, false)], u));
          current.push_back(pc);
          edge_polys.push_back(current);
        }
        current = {pc, rotate_into(pos[event_vertex_attach(ci, idx, true)], u)};
      } else {
        const Permutation& sg = spec.sigma.at(base.cut_arcs.at(bi.arc_index.at(e.ref)).target);
        current.push_back(boundary_abs(ci, idx, false, u));
        u = e.sign > 0 ? sg(u) : inverse(sg)(u);
        current.push_back(boundary_abs(ci, idx, true, u));
      }
      int seg_edge = rc.curve_edge_base[ci] + idx;
      current.push_back(rotate_into(pos[mid[seg_edge]], u));
    }
    if (!current.empty()) {
      current.push_back(rotate_into(pos[event_vertex_attach(ci, start, false)], u));
      current.push_back(edge_polys.empty() ? current.front() : edge_polys.front().front());
      edge_polys.push_back(current);
    }
    for (int k = 0; k < static_cast<int>(edge_polys.size()); ++k) {
      layout.edges[{lc.id, k}] = edge_polys[k];
    }
  }

  for (const auto& [xid, x] : lift.lifted.crossings) {
    const auto& prov = lift.provenance.crossings.at(xid);
    layout.crossings[xid] = rotate_into(pos[center.at(prov.base)], prov.sheet);
  }
  for (const auto& p : lift.lifted.marked_points) {
    const auto& prov = lift.provenance.marked_points.at(p.id);
    layout.points[p.id] = prov.first == p1 ? Point{500, 500} : polar(r_out + 24, 0.0);
  }
  layout.has_basepoint = true;
  layout.basepoint = polar(r_x, 0.0);

  if (std::string why = planarity_violation(layout, 1e-9); !why.empty()) {
    throw InternalError("fan layout failed the planarity check: " + why);
  }
  return layout;
}

}  // namespace dehnlift
