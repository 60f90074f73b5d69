#include "dehnlift/render.hpp"

#include <cmath>
#include <set>

#include "dehnlift/cover.hpp"
#include "dehnlift/errors.hpp"
#include "dehnlift/jdformat.hpp"
#include "doctest.h"

using namespace dehnlift;

namespace {

Diagram fixture() { return builtin_fixture("johansson-unknot").diagram; }

// Independent quadratic sweep over drawn sub-segments, kept separate from
// the library's own checker.
int count_improper_intersections(const Layout& layout, double tol) {
  struct S {
    Point a, b;
  };
  std::vector<S> segs;
  for (const auto& [key, poly] : layout.edges) {
    for (size_t i = 0; i + 1 < poly.size(); ++i) segs.push_back({poly[i], poly[i + 1]});
  }
  double eps = tol * std::max(layout.width, layout.height);
  auto cross = [](Point o, Point p, Point q) {
    return (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
  };
  int bad = 0;
  for (size_t i = 0; i < segs.size(); ++i) {
    for (size_t j = i + 1; j < segs.size(); ++j) {
      auto same = [](Point p, Point q) { return p.x == q.x && p.y == q.y; };
      if (same(segs[i].a, segs[j].a) || same(segs[i].a, segs[j].b) ||
          same(segs[i].b, segs[j].a) || same(segs[i].b, segs[j].b)) {
        continue;
      }
      double o1 = cross(segs[i].a, segs[i].b, segs[j].a);
      double o2 = cross(segs[i].a, segs[i].b, segs[j].b);
      double o3 = cross(segs[j].a, segs[j].b, segs[i].a);
      double o4 = cross(segs[j].a, segs[j].b, segs[i].b);
      if (((o1 > eps && o2 < -eps) || (o1 < -eps && o2 > eps)) &&
          ((o3 > eps && o4 < -eps) || (o3 < -eps && o4 > eps))) {
        ++bad;
      }
    }
  }
  return bad;
}

}  // namespace

TEST_CASE("tutte layout of the fixture is planar and complete") {
  Diagram d = fixture();
  Layout l = tutte_layout(d, "S");
  CHECK(l.crossings.size() == 6);
  CHECK(l.edges.size() == 12);
  CHECK(l.points.size() == 2);
  CHECK(l.has_basepoint);
  CHECK(check_planarity(l, 1e-9));
  CHECK(count_improper_intersections(l, 1e-9) == 0);
}

TEST_CASE("tutte layouts of the cyclic lifts stay planar") {
  Diagram d = fixture();
  for (int n : {2, 3}) {
    LiftResult lift = cyclic_cover(d, n);
    Layout l = tutte_layout(lift.lifted, lift.lifted.components[0].id);
    CHECK(l.crossings.size() == static_cast<size_t>(6 * n));
    CHECK(l.edges.size() == static_cast<size_t>(12 * n));
    CHECK(check_planarity(l, 1e-9));
    CHECK(count_improper_intersections(l, 1e-9) == 0);
  }
}

TEST_CASE("lone circle components get the special drawing") {
  Diagram circles = builtin_fixture("sister-circles").diagram;
  Layout l = tutte_layout(circles, "S1");
  CHECK(l.edges.size() == 1);
  CHECK(l.crossings.empty());
  CHECK(check_planarity(l, 1e-9));
}

TEST_CASE("fan layout structure for n = 1, 2, 3") {
  Diagram d = fixture();
  for (int n : {1, 2, 3}) {
    LiftResult lift = cyclic_cover(d, n);
    Layout fan = fan_layout(lift);
    CHECK(check_planarity(fan, 1e-9));
    CHECK(count_improper_intersections(fan, 1e-9) == 0);
    // One sector per sheet: every lifted crossing gets its own spot.
    std::set<std::pair<long, long>> rounded;
    for (const auto& [id, p] : fan.crossings) {
      rounded.insert({std::lround(p.x * 1000), std::lround(p.y * 1000)});
    }
    CHECK(rounded.size() == static_cast<size_t>(6 * n));
    // Branch point lifts: P1-hat at the canvas center, P2-hat outside.
    bool center_seen = false, rim_seen = false;
    for (const auto& [pid, p] : fan.points) {
      if (p.x == 500 && p.y == 500) center_seen = true;
      if (std::hypot(p.x - 500, p.y - 500) > 460) rim_seen = true;
    }
    CHECK(center_seen);
    CHECK(rim_seen);
  }
}

TEST_CASE("curve lifts run continuously across sector boundaries") {
  Diagram d = fixture();
  LiftResult lift = cyclic_cover(d, 3);
  Layout fan = fan_layout(lift);
  // Piece endpoints of one lifted curve meet in pairs (closed loops), so the
  // drawing is continuous across the radial cuts.
  std::map<std::string, std::vector<std::vector<Point>>> by_curve;
  for (const auto& [key, poly] : fan.edges) by_curve[key.first].push_back(poly);
  CHECK(by_curve.size() == 2);
  for (const auto& [curve, polys] : by_curve) {
    std::map<std::pair<double, double>, int> degree;
    for (const auto& poly : polys) {
      degree[{poly.front().x, poly.front().y}] += 1;
      degree[{poly.back().x, poly.back().y}] += 1;
    }
    for (const auto& [pt, deg] : degree) CHECK(deg % 2 == 0);
  }
}

TEST_CASE("fan layout refuses non-cyclic input") {
  Diagram d = fixture();
  MonodromySpec split;
  split.sheets = 4;
  split.sigma.emplace("P1", Permutation::from_cycles(4, {{1, 2}, {3, 4}}));
  split.sigma.emplace("P2", Permutation::from_cycles(4, {{1, 2}, {3, 4}}));
  split.departure_order = {"P1", "P2"};
  LiftResult lift = branched_cover(d, split);
  CHECK_THROWS_AS(fan_layout(lift), ValidationFailure);
}

TEST_CASE("svg output is deterministic and styled per pair") {
  Diagram d = fixture();
  std::string svg1 = render_diagram_svg(d);
  std::string svg2 = render_diagram_svg(d);
  CHECK(svg1 == svg2);
  CHECK(svg1.find("<svg") != std::string::npos);
  CHECK(svg1.find("P1") != std::string::npos);
  CHECK(svg1.find("P2") != std::string::npos);
  LiftResult lift = cyclic_cover(d, 3);
  std::string svg3 = render_svg(fan_layout(lift), lift.lifted);
  std::string svg4 = render_svg(fan_layout(lift), lift.lifted);
  CHECK(svg3 == svg4);
  // Every edge polyline carries the pair color.
  size_t colors = 0;
  for (size_t pos = 0; (pos = svg1.find("stroke=\"#", pos)) != std::string::npos; ++pos) ++colors;
  CHECK(colors == 12);
}

TEST_CASE("render_svg draws labelled dots for marked points") {
  Diagram circles = builtin_fixture("sister-circles").diagram;
  Layout l = tutte_layout(circles, "S2");
  std::string svg = render_svg(l, circles);
  CHECK(svg.find("<circle") == std::string::npos);  // no crossings, no points here
  CHECK(svg.find("<polyline") != std::string::npos);
}
