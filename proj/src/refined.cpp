#include "refined.hpp"

#include <algorithm>
#include <tuple>

#include "dehnlift/errors.hpp"

namespace dehnlift::internal {

BaseIndex BaseIndex::build(const Diagram& d) {
  BaseIndex b;
  b.d = &d;
  b.crossing_positions.resize(d.curves.size());
  for (int ci = 0; ci < static_cast<int>(d.curves.size()); ++ci) {
    b.curve_index[d.curves[ci].id] = ci;
    const Curve& c = d.curves[ci];
    for (int i = 0; i < static_cast<int>(c.events.size()); ++i) {
      if (c.events[i].kind == Event::Kind::kCrossing) b.crossing_positions[ci].push_back(i);
    }
  }
  for (int ai = 0; ai < static_cast<int>(d.cut_arcs.size()); ++ai) {
    b.arc_index[d.cut_arcs[ai].id] = ai;
  }
  for (int pi = 0; pi < static_cast<int>(d.marked_points.size()); ++pi) {
    b.point_index[d.marked_points[pi].id] = pi;
  }
  return b;
}

RefinedComplex build_refined(const Diagram& d, const BaseIndex& bi,
                             const std::vector<std::string>& departure_order) {
  RefinedComplex r;
  r.d = &d;
  r.bi = &bi;

  r.curve_edge_base.resize(d.curves.size(), 0);
  for (size_t ci = 0; ci < d.curves.size(); ++ci) {
    r.curve_edge_base[ci] = r.curve_edge_total;
    r.curve_edge_total += bi.events_of(static_cast<int>(ci));  // one sub-edge per segment
  }
  r.arc_edge_base.resize(d.cut_arcs.size(), 0);
  int arc_edges = 0;
  for (size_t ai = 0; ai < d.cut_arcs.size(); ++ai) {
    r.arc_edge_base[ai] = r.curve_edge_total + arc_edges;
    arc_edges += static_cast<int>(d.cut_arcs[ai].word.size()) + 1;
  }
  r.edge_total = r.curve_edge_total + arc_edges;
  r.next_ccw.assign(2 * r.edge_total, -1);

  // Rotations at crossings: strands ordered by (curve id, event index).
  std::map<std::string, std::vector<std::pair<int, int>>> flags;  // crossing -> (ci, event idx)
  for (size_t ci = 0; ci < d.curves.size(); ++ci) {
    const Curve& c = d.curves[ci];
    for (int i = 0; i < static_cast<int>(c.events.size()); ++i) {
      if (c.events[i].kind == Event::Kind::kCrossing) {
        flags[c.events[i].ref].push_back({static_cast<int>(ci), i});
      }
    }
  }
  for (auto& [xid, fl] : flags) {
    std::sort(fl.begin(), fl.end(), [&](const auto& a, const auto& b) {
      return std::tie(d.curves[a.first].id, a.second) < std::tie(d.curves[b.first].id, b.second);
    });
    if (fl.size() != 2) throw ValidationFailure("crossing " + xid + " is not two strand passes");
    auto [c1, i1] = fl[0];
    auto [c2, i2] = fl[1];
    int L1 = bi.events_of(c1), L2 = bi.events_of(c2);
    int out1 = r.curve_fwd(c1, i1), in1 = r.curve_bwd(c1, (i1 - 1 + L1) % L1);
    int out2 = r.curve_fwd(c2, i2), in2 = r.curve_bwd(c2, (i2 - 1 + L2) % L2);
    std::vector<int> ring = d.crossings.at(xid).handedness >= 0
                                ? std::vector<int>{out1, out2, in1, in2}
                                : std::vector<int>{out1, in2, in1, out2};
    for (int i = 0; i < 4; ++i) r.next_ccw[ring[i]] = ring[(i + 1) % 4];
  }

  // Rotations at arc/curve intersections. Entry j of arc ai references the
  // cut event at (curve, event e); sub-edges j (incoming) and j+1 (outgoing).
  // Sign +1 means the curve crosses the arc right to left.
  for (size_t ai = 0; ai < d.cut_arcs.size(); ++ai) {
    const CutArc& a = d.cut_arcs[ai];
    for (int j = 0; j < static_cast<int>(a.word.size()); ++j) {
      const CutArcEntry& w = a.word[j];
      int ci = bi.curve_index.at(w.curve);
      int L = bi.events_of(ci);
      int curve_out = r.curve_fwd(ci, w.segment);
      int curve_in = r.curve_bwd(ci, (w.segment - 1 + L) % L);
      int arc_out = r.arc_fwd(static_cast<int>(ai), j + 1);
      int arc_in = r.arc_bwd(static_cast<int>(ai), j);
      std::vector<int> ring = w.sign > 0 ? std::vector<int>{arc_out, curve_in, arc_in, curve_out}
                                         : std::vector<int>{arc_out, curve_out, arc_in, curve_in};
      for (int i = 0; i < 4; ++i) r.next_ccw[ring[i]] = ring[(i + 1) % 4];
    }
  }

  // Basepoint star. The departure order is the counterclockwise order of the
  // arcs around the basepoint, so the stored (clockwise) ring reverses it.
  if (!d.cut_arcs.empty()) {
    std::vector<int> star;
    for (const auto& pid : departure_order) {
      for (size_t ai = 0; ai < d.cut_arcs.size(); ++ai) {
        if (d.cut_arcs[ai].target == pid) star.push_back(r.arc_fwd(static_cast<int>(ai), 0));
      }
    }
    if (star.size() != d.cut_arcs.size()) {
      throw MonodromyError("departure order does not match the cut arcs");
    }
    std::reverse(star.begin(), star.end());
    for (size_t i = 0; i < star.size(); ++i) {
      r.next_ccw[star[i]] = star[(i + 1) % star.size()];
    }
    // Marked point tips: a single dart each.
    for (size_t ai = 0; ai < d.cut_arcs.size(); ++ai) {
      int tip = r.arc_bwd(static_cast<int>(ai), static_cast<int>(d.cut_arcs[ai].word.size()));
      r.next_ccw[tip] = tip;
    }
  }

  // Trace refined faces. Curves with empty event words stay outside (their
  // lone-circle components carry no refined structure).
  r.face_of_dart.assign(2 * r.edge_total, -1);
  for (int start = 0; start < 2 * r.edge_total; ++start) {
    if (r.face_of_dart[start] >= 0) continue;
    if (r.next_ccw[start] < 0) continue;  // dart of an empty-word curve
    int face = r.face_total++;
    r.face_darts.emplace_back();
    int dart = start;
    int guard = 0;
    do {
      r.face_of_dart[dart] = face;
      r.face_darts[face].push_back(dart);
      dart = r.next_ccw[RefinedComplex::rev(dart)];
      if (dart < 0 || ++guard > 4 * r.edge_total) {
        throw InternalError("refined face tracing failed to close");
      }
    } while (dart != start);
  }
  return r;
}

}  // namespace dehnlift::internal
