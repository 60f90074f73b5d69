#pragma once

// Internal: the refined complex of a diagram with its cut system, shared by
// the covering construction and the fan renderer. Not part of the public API.

#include <map>
#include <string>
#include <vector>

#include "dehnlift/diagram.hpp"

namespace dehnlift::internal {

struct BaseIndex {
  const Diagram* d = nullptr;
  std::map<std::string, int> curve_index;
  std::vector<std::vector<int>> crossing_positions;  // curve -> event indices
  std::map<std::string, int> arc_index;
  std::map<std::string, int> point_index;

  static BaseIndex build(const Diagram& d);
  int events_of(int ci) const { return static_cast<int>(d->curves[ci].events.size()); }
};

// Diagram graph + cut arcs as one combinatorial map. Edges: curve sub-edges
// (one per full event segment) and arc sub-edges (one per word entry plus
// one). Vertices: crossings, arc/curve intersection points, the basepoint
// star and the marked points. Rings are stored in the clockwise sense the
// face tracer pairs with (the orbit of a forward dart is the face on its
// left).
struct RefinedComplex {
  const Diagram* d = nullptr;
  const BaseIndex* bi = nullptr;

  int curve_edge_total = 0;
  std::vector<int> curve_edge_base;  // per curve
  std::vector<int> arc_edge_base;    // per arc
  int edge_total = 0;

  std::vector<int> next_ccw;      // per dart
  std::vector<int> face_of_dart;  // per dart
  int face_total = 0;
  std::vector<std::vector<int>> face_darts;  // per face, in walk order

  int curve_fwd(int ci, int seg) const { return 2 * (curve_edge_base[ci] + seg); }
  int curve_bwd(int ci, int seg) const { return 2 * (curve_edge_base[ci] + seg) + 1; }
  int arc_fwd(int ai, int j) const { return 2 * (arc_edge_base[ai] + j); }
  int arc_bwd(int ai, int j) const { return 2 * (arc_edge_base[ai] + j) + 1; }
  static int rev(int dart) { return dart ^ 1; }

  bool is_arc_dart(int dart) const { return dart / 2 >= curve_edge_total; }

  int left_cell_of_curve_seg(int ci, int seg) const { return face_of_dart[curve_fwd(ci, seg)]; }
  int right_cell_of_curve_seg(int ci, int seg) const { return face_of_dart[curve_bwd(ci, seg)]; }
  int cell_of_locator(const FaceLocator& at) const {
    int ci = bi->curve_index.at(at.curve);
    return at.side == Side::kLeft ? left_cell_of_curve_seg(ci, at.segment)
                                  : right_cell_of_curve_seg(ci, at.segment);
  }
  int tip_cell(int ai) const {
    int entries = static_cast<int>(d->cut_arcs[ai].word.size());
    return face_of_dart[arc_fwd(ai, entries)];
  }
};

RefinedComplex build_refined(const Diagram& d, const BaseIndex& bi,
                             const std::vector<std::string>& departure_order);

}  // namespace dehnlift::internal
