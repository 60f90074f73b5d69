#pragma once

#include <map>
#include <string>
#include <vector>

#include "dehnlift/cover.hpp"
#include "dehnlift/diagram.hpp"

namespace dehnlift {

struct Point {
  double x = 0;
  double y = 0;
};

// A straight-line drawing of one domain component: every curve edge is a
// polyline through its subdivision points. Coordinates live in a unit-ish
// canvas; emit_svg scales them.
struct Layout {
  std::string component;
  // One polyline per diagram edge, keyed by (curve id, edge index in the
  // crossing-event subsequence). Closed circles use a dense polygon.
  std::map<std::pair<std::string, int>, std::vector<Point>> edges;
  std::map<std::string, Point> crossings;
  std::map<std::string, Point> points;     // marked points
  bool has_basepoint = false;
  Point basepoint;
  double width = 1000;
  double height = 1000;
};

// Barycentric (Tutte-style) layout of one component. The outer face is the
// basepoint face when the basepoint lies on this component, otherwise the
// largest face. The returned drawing passes check_planarity; a failed check
// raises InternalError.
Layout tutte_layout(const Diagram& d, const std::string& component);

// Fan layout of a cyclic lift: sheet t of the cut-open base is drawn in the
// t-th angular sector of width 2*pi/n; the lift of the first branch point
// sits at the center, the second is represented by the outer boundary.
Layout fan_layout(const LiftResult& lift);

// True iff no two drawn segments intersect except at shared endpoints
// (tolerance in canvas units scaled to a unit box).
bool check_planarity(const Layout& layout, double tolerance = 1e-9);

// Deterministic SVG 1.1 text: sister pairs share a color, marked points are
// labelled dots, crossings drawn as vertices.
std::string render_svg(const Layout& layout, const Diagram& d);

// Convenience: layout every component with tutte_layout and stack the
// drawings into one SVG document.
std::string render_diagram_svg(const Diagram& d);

}  // namespace dehnlift
