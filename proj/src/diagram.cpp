#include "dehnlift/diagram.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "dehnlift/errors.hpp"

namespace dehnlift {

int Curve::crossing_event_count() const {
  int count = 0;
  for (const auto& e : events) {
    if (e.kind == Event::Kind::kCrossing) ++count;
  }
  return count;
}

int Curve::crossing_event_position(int k) const {
  int seen = 0;
  for (int i = 0; i < static_cast<int>(events.size()); ++i) {
    if (events[i].kind == Event::Kind::kCrossing) {
      if (seen == k) return i;
      ++seen;
    }
  }
  throw std::out_of_range("crossing_event_position: index " + std::to_string(k) +
                          " out of range for curve " + id);
}

const Curve* Diagram::find_curve(const std::string& id) const {
  for (const auto& c : curves) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const DomainComponent* Diagram::find_component(const std::string& id) const {
  for (const auto& s : components) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

const CutArc* Diagram::find_cut_arc(const std::string& id) const {
  for (const auto& a : cut_arcs) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

const MarkedPoint* Diagram::find_marked_point(const std::string& id) const {
  for (const auto& p : marked_points) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const LambdaSpec* Diagram::find_lambda(const std::string& curve_id) const {
  for (const auto& l : lambdas) {
    if (l.curve == curve_id) return &l;
  }
  return nullptr;
}

const SisterPairing* Diagram::find_pairing(const std::string& curve_id) const {
  for (const auto& p : pairing) {
    if (p.curve_a == curve_id || p.curve_b == curve_id) return &p;
  }
  return nullptr;
}

std::string Diagram::sister_of(const std::string& curve_id) const {
  const SisterPairing* p = find_pairing(curve_id);
  if (!p) throw ValidationFailure("curve " + curve_id + " has no sister pairing");
  return p->curve_a == curve_id ? p->curve_b : p->curve_a;
}

void ValidationReport::add(std::string name, CheckStatus status, std::string location,
                           std::string message) {
  if (status == CheckStatus::kFail) ok = false;
  checks.push_back({std::move(name), status, std::move(location), std::move(message)});
}

bool ValidationReport::has_failure(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name && c.status == CheckStatus::kFail) return true;
  }
  return false;
}

namespace {

int segment_count(const Curve& c) { return std::max<int>(1, static_cast<int>(c.events.size())); }

// Crossing-subsequence gap containing full segment `seg` (the gap between
// consecutive crossing events). Curve must have at least one crossing event.
int gap_of_segment(const Curve& c, int seg) {
  const int m = c.crossing_event_count();
  int gap = -1;  // becomes m-1 if seg precedes the first crossing event
  int seen = 0;
  for (int i = 0; i <= seg; ++i) {
    if (c.events[i].kind == Event::Kind::kCrossing) {
      gap = seen;
      ++seen;
    }
  }
  return gap < 0 ? m - 1 : gap;
}

// Image of curve_a's crossing gap under the pairing's point correspondence.
int sister_gap(const SisterPairing& p, int gap, int m) {
  int image = p.direction == +1 ? gap + p.offset : p.offset - gap - 1;
  return ((image % m) + m) % m;
}

struct FlagRef {
  int curve = -1;  // index into d.curves
  int k = -1;      // crossing-subsequence index
  bool operator==(const FlagRef&) const = default;
  auto operator<=>(const FlagRef&) const = default;
};

// Structure shared by the face tracer and the validators: per-curve crossing
// event positions and per-crossing flag pairs.
struct GraphIndex {
  std::vector<std::vector<int>> crossing_positions;  // curve -> event indices
  std::map<std::string, std::vector<FlagRef>> flags_by_crossing;
  bool structurally_sound = true;
  std::string problem;

  static GraphIndex build(const Diagram& d) {
    GraphIndex g;
    g.crossing_positions.resize(d.curves.size());
    for (int ci = 0; ci < static_cast<int>(d.curves.size()); ++ci) {
      const Curve& c = d.curves[ci];
      int k = 0;
      for (int i = 0; i < static_cast<int>(c.events.size()); ++i) {
        if (c.events[i].kind != Event::Kind::kCrossing) continue;
        g.crossing_positions[ci].push_back(i);
        g.flags_by_crossing[c.events[i].ref].push_back({ci, k});
        ++k;
      }
    }
    for (auto& [id, flags] : g.flags_by_crossing) {
      // The handedness convention names the strands by (curve id, event
      // index), so keep the flag pair in that order regardless of how the
      // curves vector happens to be arranged.
      std::sort(flags.begin(), flags.end(), [&](const FlagRef& a, const FlagRef& b) {
        return std::tie(d.curves[a.curve].id, a.k) < std::tie(d.curves[b.curve].id, b.k);
      });
      if (flags.size() != 2) {
        g.structurally_sound = false;
        g.problem = "crossing " + id + " has " + std::to_string(flags.size()) +
                    " strand passes, expected 2";
        break;
      }
    }
    return g;
  }
};

// Darts of the diagram graph. Edge (curve ci, j) runs from the curve's j-th
// crossing event to its (j+1)-th; dart id = 2*(edge index) for the forward
// dart, +1 for the backward dart.
struct DartMap {
  const Diagram* d = nullptr;
  const GraphIndex* g = nullptr;
  std::vector<int> edge_base;  // per curve: first edge index
  int edge_count = 0;
  std::vector<int> next_ccw;  // vertex rotation, per dart
  std::vector<int> face_of_dart;
  int face_total = 0;

  int forward_dart(int ci, int j) const { return 2 * (edge_base[ci] + j); }
  int backward_dart(int ci, int j) const { return 2 * (edge_base[ci] + j) + 1; }
  static int reversal(int dart) { return dart ^ 1; }
};

// Builds rotations and traces faces (orbits of d -> ccw(reversal(d))).
// Curves with zero crossing events must be handled by the caller.
DartMap build_darts(const Diagram& d, const GraphIndex& g) {
  DartMap m;
  m.d = &d;
  m.g = &g;
  m.edge_base.resize(d.curves.size(), 0);
  for (int ci = 0; ci < static_cast<int>(d.curves.size()); ++ci) {
    m.edge_base[ci] = m.edge_count;
    m.edge_count += static_cast<int>(g.crossing_positions[ci].size());
  }
  m.next_ccw.assign(2 * m.edge_count, -1);

  for (const auto& [xid, flags] : g.flags_by_crossing) {
    const Crossing& x = d.crossings.at(xid);
    const FlagRef f1 = flags[0];  // flags are stored in (curve, index) order
    const FlagRef f2 = flags[1];
    auto m_of = [&](const FlagRef& f) {
      return static_cast<int>(g.crossing_positions[f.curve].size());
    };
    int out1 = m.forward_dart(f1.curve, f1.k);
    int in1 = m.backward_dart(f1.curve, (f1.k + m_of(f1) - 1) % m_of(f1));
    int out2 = m.forward_dart(f2.curve, f2.k);
    int in2 = m.backward_dart(f2.curve, (f2.k + m_of(f2) - 1) % m_of(f2));
    std::vector<int> ring = x.handedness >= 0 ? std::vector<int>{out1, out2, in1, in2}
                                              : std::vector<int>{out1, in2, in1, out2};
    for (int i = 0; i < 4; ++i) m.next_ccw[ring[i]] = ring[(i + 1) % 4];
  }

  m.face_of_dart.assign(2 * m.edge_count, -1);
  for (int start = 0; start < 2 * m.edge_count; ++start) {
    if (m.face_of_dart[start] >= 0) continue;
    int face = m.face_total++;
    int dart = start;
    do {
      m.face_of_dart[dart] = face;
      dart = m.next_ccw[DartMap::reversal(dart)];
      if (dart < 0) throw InternalError("face tracing hit an unset rotation");
    } while (dart != start);
  }
  return m;
}

// Curve indices grouped by component, plus the lone-circle special case.
struct ComponentPlan {
  std::vector<int> curve_indices;
  bool lone_circle = false;
};

std::map<std::string, ComponentPlan> plan_components(const Diagram& d, const GraphIndex& g) {
  std::map<std::string, ComponentPlan> plan;
  for (const auto& s : d.components) plan[s.id];
  for (int ci = 0; ci < static_cast<int>(d.curves.size()); ++ci) {
    plan[d.curves[ci].component].curve_indices.push_back(ci);
  }
  for (auto& [sid, p] : plan) {
    if (p.curve_indices.empty()) {
      throw UnsupportedDiagramError("component " + sid + " has no curves, nothing to trace");
    }
    if (p.curve_indices.size() == 1 &&
        g.crossing_positions[p.curve_indices[0]].empty()) {
      p.lone_circle = true;
      continue;
    }
    // Connectivity of the union of curves through shared crossings.
    std::map<int, int> slot;  // curve index -> dense slot
    for (int ci : p.curve_indices) {
      if (g.crossing_positions[ci].empty()) {
        throw UnsupportedDiagramError("component " + sid + " mixes curve " + d.curves[ci].id +
                                      " (no crossings) with other curves; graph disconnected");
      }
      slot[ci] = static_cast<int>(slot.size());
    }
    std::vector<int> parent(slot.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    auto find = [&](int a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    for (const auto& [xid, flags] : g.flags_by_crossing) {
      if (flags.size() != 2) continue;
      auto it1 = slot.find(flags[0].curve);
      auto it2 = slot.find(flags[1].curve);
      if (it1 == slot.end() || it2 == slot.end()) continue;  // crossing of another component
      parent[find(it1->second)] = find(it2->second);
    }
    int roots = 0;
    for (size_t i = 0; i < parent.size(); ++i) {
      if (find(static_cast<int>(i)) == static_cast<int>(i)) ++roots;
    }
    if (roots != 1) {
      throw UnsupportedDiagramError("component " + sid +
                                    " has a disconnected diagram graph; faces are not traceable");
    }
  }
  return plan;
}

void canonicalize_face(Face& f) {
  if (f.corners.empty()) return;
  auto best = std::min_element(f.corners.begin(), f.corners.end());
  std::rotate(f.corners.begin(), best, f.corners.end());
}

}  // namespace

std::vector<Face> faces(const Diagram& d) {
  if (d.curves.empty()) throw UnsupportedDiagramError("diagram has no curves");
  GraphIndex g = GraphIndex::build(d);
  if (!g.structurally_sound) throw UnsupportedDiagramError(g.problem);
  for (const auto& c : d.curves) {
    if (!d.find_component(c.component)) {
      throw UnsupportedDiagramError("curve " + c.id + " references unknown component " +
                                    c.component);
    }
    for (const auto& e : c.events) {
      if (e.kind == Event::Kind::kCrossing && !d.crossings.count(e.ref)) {
        throw UnsupportedDiagramError("curve " + c.id + " references unknown crossing " + e.ref);
      }
    }
  }
  std::map<std::string, ComponentPlan> plan = plan_components(d, g);

  std::vector<Face> result;
  DartMap darts = build_darts(d, g);

  // Expand traced dart orbits into corner walks. A forward dart shows the
  // curve's left side, a backward dart its right side (walked backwards).
  std::vector<Face> traced(darts.face_total);
  std::vector<char> face_seen(darts.face_total, 0);
  for (int start = 0; start < 2 * darts.edge_count; ++start) {
    int face = darts.face_of_dart[start];
    if (face_seen[face]) continue;
    face_seen[face] = 1;
    int dart = start;
    do {
      int edge = dart / 2;
      bool fwd = (dart % 2) == 0;
      int ci = static_cast<int>(std::upper_bound(darts.edge_base.begin(), darts.edge_base.end(),
                                                 edge) -
                                darts.edge_base.begin()) -
               1;
      const Curve& c = d.curves[ci];
      const auto& pos = g.crossing_positions[ci];
      int j = edge - darts.edge_base[ci];
      int seg_from = pos[j];
      int seg_to = pos[(j + 1) % pos.size()];  // exclusive
      int len = static_cast<int>(c.events.size());
      int span = (seg_to - seg_from + len - 1) % len + 1;  // full segments on this edge
      traced[face].component = c.component;
      if (fwd) {
        for (int s = 0; s < span; ++s) {
          traced[face].corners.push_back({c.id, (seg_from + s) % len, Side::kLeft});
        }
      } else {
        for (int s = span - 1; s >= 0; --s) {
          traced[face].corners.push_back({c.id, (seg_from + s) % len, Side::kRight});
        }
      }
      dart = darts.next_ccw[DartMap::reversal(dart)];
    } while (dart != start);
  }
  for (auto& f : traced) {
    canonicalize_face(f);
    result.push_back(std::move(f));
  }

  // Lone circles: two faces, one per side.
  for (const auto& [sid, p] : plan) {
    if (!p.lone_circle) continue;
    const Curve& c = d.curves[p.curve_indices[0]];
    int segs = segment_count(c);
    Face left{sid, {}};
    Face right{sid, {}};
    for (int s = 0; s < segs; ++s) left.corners.push_back({c.id, s, Side::kLeft});
    for (int s = segs - 1; s >= 0; --s) right.corners.push_back({c.id, s, Side::kRight});
    canonicalize_face(left);
    canonicalize_face(right);
    result.push_back(std::move(left));
    result.push_back(std::move(right));
  }

  std::sort(result.begin(), result.end(), [](const Face& a, const Face& b) {
    return std::tie(a.component, a.corners) < std::tie(b.component, b.corners);
  });
  return result;
}

int face_of(const std::vector<Face>& all_faces, const FaceLocator& at) {
  FaceCorner corner{at.curve, at.segment, at.side};
  for (int i = 0; i < static_cast<int>(all_faces.size()); ++i) {
    for (const auto& c : all_faces[i].corners) {
      if (c == corner) return i;
    }
  }
  throw ValidationFailure("face locator " + at.curve + "@" + std::to_string(at.segment) + " " +
                          to_string(at.side) + " resolves to no traced face");
}

std::vector<EulerCount> euler_genus(const Diagram& d) {
  std::vector<Face> all_faces = faces(d);
  std::vector<EulerCount> result;
  for (const auto& s : d.components) {
    EulerCount e;
    e.component = s.id;
    std::set<std::string> vertices;
    for (const auto& c : d.curves) {
      if (c.component != s.id) continue;
      for (const auto& ev : c.events) {
        if (ev.kind == Event::Kind::kCrossing) vertices.insert(ev.ref);
      }
    }
    e.vertices = static_cast<int>(vertices.size());
    for (const auto& c : d.curves) {
      if (c.component == s.id) e.edges += c.crossing_event_count();
    }
    for (const auto& f : all_faces) {
      if (f.component == s.id) ++e.faces;
    }
    e.chi = e.vertices - e.edges + e.faces;
    if ((2 - e.chi) % 2 != 0 || e.chi > 2) {
      throw InternalError("component " + s.id + " traced to chi " + std::to_string(e.chi));
    }
    e.genus = (2 - e.chi) / 2;
    result.push_back(std::move(e));
  }
  return result;
}

std::vector<TriplePoint> triple_orbits(const Diagram& d) {
  GraphIndex g = GraphIndex::build(d);
  if (!g.structurally_sound) throw TripleClosureError(g.problem, "");

  // phi(flag) = other-flag-at-crossing(sister-point(flag))
  auto curve_index = [&](const std::string& id) {
    for (int i = 0; i < static_cast<int>(d.curves.size()); ++i) {
      if (d.curves[i].id == id) return i;
    }
    throw ValidationFailure("triple_orbits: unknown curve " + id);
  };
  auto flag_name = [&](const FlagRef& f) {
    return d.curves[f.curve].id + "[" + std::to_string(f.k) + "]";
  };
  auto sister = [&](const FlagRef& f) -> FlagRef {
    const Curve& c = d.curves[f.curve];
    const SisterPairing* p = d.find_pairing(c.id);
    if (!p) throw TripleClosureError("curve " + c.id + " is unpaired", flag_name(f));
    int other = curve_index(p->curve_a == c.id ? p->curve_b : p->curve_a);
    int m = static_cast<int>(g.crossing_positions[f.curve].size());
    int m_other = static_cast<int>(g.crossing_positions[other].size());
    if (m != m_other || m == 0) {
      throw TripleClosureError("sister curves " + p->curve_a + "/" + p->curve_b +
                                   " have mismatched crossing-event counts",
                               flag_name(f));
    }
    int j;
    if (p->curve_a == c.id) {
      j = p->direction == +1 ? f.k + p->offset : -f.k + p->offset;
    } else {
      j = p->direction == +1 ? f.k - p->offset : -f.k + p->offset;
    }
    j = ((j % m) + m) % m;
    return {other, j};
  };
  auto crossing_at = [&](const FlagRef& f) -> const std::string& {
    const Curve& c = d.curves[f.curve];
    return c.events[g.crossing_positions[f.curve][f.k]].ref;
  };
  auto partner = [&](const FlagRef& f) -> FlagRef {
    const auto& flags = g.flags_by_crossing.at(crossing_at(f));
    if (flags[0] == f) return flags[1];
    if (flags[1] == f) return flags[0];
    throw InternalError("flag not registered at its own crossing");
  };
  auto phi = [&](const FlagRef& f) { return partner(sister(f)); };

  std::set<FlagRef> seen;
  std::map<std::vector<std::string>, std::vector<std::vector<Flag>>> grouped;
  for (int ci = 0; ci < static_cast<int>(d.curves.size()); ++ci) {
    int m = static_cast<int>(g.crossing_positions[ci].size());
    for (int k = 0; k < m; ++k) {
      FlagRef f{ci, k};
      if (seen.count(f)) continue;
      FlagRef f1 = phi(f);
      FlagRef f2 = phi(f1);
      FlagRef f3 = phi(f2);
      if (f3 != f || f1 == f || f2 == f || f1 == f2) {
        throw TripleClosureError("diagram not realizable as Dehn surface (triple closure)",
                                 flag_name(f));
      }
      seen.insert(f);
      seen.insert(f1);
      seen.insert(f2);
      std::vector<std::string> xs = {crossing_at(f), crossing_at(f1), crossing_at(f2)};
      std::sort(xs.begin(), xs.end());
      if (xs[0] == xs[1] || xs[1] == xs[2]) {
        throw TripleClosureError("triple-point orbit revisits a crossing", flag_name(f));
      }
      std::vector<Flag> orbit = {{d.curves[f.curve].id, f.k},
                                 {d.curves[f1.curve].id, f1.k},
                                 {d.curves[f2.curve].id, f2.k}};
      grouped[xs].push_back(std::move(orbit));
    }
  }

  std::vector<TriplePoint> result;
  std::set<std::string> used;
  for (const auto& [xs, orbit_list] : grouped) {
    if (orbit_list.size() != 2) {
      throw TripleClosureError("crossing triple {" + xs[0] + "," + xs[1] + "," + xs[2] +
                                   "} carries " + std::to_string(orbit_list.size()) +
                                   " orbits, expected 2",
                               "");
    }
    for (const auto& x : xs) {
      if (!used.insert(x).second) {
        throw TripleClosureError("crossing " + x + " shared between triple points", "");
      }
    }
    TriplePoint t;
    t.crossings = xs;
    t.orbits = orbit_list;
    result.push_back(std::move(t));
  }
  return result;
}

bool is_diametral(const Diagram& d) {
  if (d.marked_points.size() != 2) return false;
  if (d.components.size() != 1) return false;
  return d.components[0].declared_genus == 0;
}

Diagram component_subdiagram(const Diagram& d, const std::string& component_id) {
  Diagram out;
  for (const auto& s : d.components) {
    if (s.id == component_id) out.components.push_back(s);
  }
  std::set<std::string> kept_curves;
  for (const auto& c : d.curves) {
    if (c.component != component_id) continue;
    kept_curves.insert(c.id);
    out.curves.push_back(c);
    for (const auto& e : c.events) {
      if (e.kind == Event::Kind::kCrossing && d.crossings.count(e.ref)) {
        out.crossings[e.ref] = d.crossings.at(e.ref);
      }
    }
  }
  for (const auto& p : d.pairing) {
    if (kept_curves.count(p.curve_a) && kept_curves.count(p.curve_b)) out.pairing.push_back(p);
  }
  std::set<std::string> kept_points;
  for (const auto& p : d.marked_points) {
    if (kept_curves.count(p.at.curve)) {
      kept_points.insert(p.id);
      out.marked_points.push_back(p);
    }
  }
  if (d.basepoint && kept_curves.count(d.basepoint->curve)) out.basepoint = d.basepoint;
  for (const auto& a : d.cut_arcs) {
    if (kept_points.count(a.target)) out.cut_arcs.push_back(a);
  }
  for (const auto& l : d.lambdas) {
    if (kept_curves.count(l.curve)) out.lambdas.push_back(l);
  }
  return out;
}

DiagramStats stats(const Diagram& d) {
  DiagramStats s;
  s.curve_count = static_cast<int>(d.curves.size());
  s.crossing_count = static_cast<int>(d.crossings.size());
  s.marked_point_count = static_cast<int>(d.marked_points.size());
  s.component_count = static_cast<int>(d.components.size());
  for (const auto& comp : d.components) s.component_genera.push_back(comp.declared_genus);
  s.triple_point_count = static_cast<int>(triple_orbits(d).size());
  std::vector<Face> all_faces = faces(d);
  s.face_count = static_cast<int>(all_faces.size());
  for (const auto& c : d.curves) s.self_intersections[c.id] = 0;
  GraphIndex g = GraphIndex::build(d);
  for (const auto& [xid, flags] : g.flags_by_crossing) {
    if (flags.size() == 2 && flags[0].curve == flags[1].curve) {
      s.self_intersections[d.curves[flags[0].curve].id] += 1;
    }
  }
  s.diametral = is_diametral(d);
  return s;
}

// --- validate -------------------------------------------------------------

namespace {

// Face path of a cut arc entry: the side the arc leaves behind and the side
// it moves into, as locators on the segment right after the referenced event.
// Sign +1 means the curve crosses the arc right to left, equivalently the
// arc crosses the curve from its left side to its right side.
FaceLocator entry_from_side(const CutArcEntry& e) {
  return {e.curve, e.segment, e.sign > 0 ? Side::kLeft : Side::kRight};
}

FaceLocator entry_to_side(const CutArcEntry& e) {
  return {e.curve, e.segment, e.sign > 0 ? Side::kRight : Side::kLeft};
}

}  // namespace

ValidationReport validate(const Diagram& d) {
  ValidationReport r;

  // Structural layer: ids, references, counts.
  bool structure_ok = true;
  auto fail = [&](const std::string& name, const std::string& loc, const std::string& msg) {
    r.add(name, CheckStatus::kFail, loc, msg);
    structure_ok = false;
  };

  if (d.components.empty()) fail("structure/components", "", "diagram declares no domain components");
  std::set<std::string> comp_ids;
  for (const auto& s : d.components) {
    if (!comp_ids.insert(s.id).second) fail("structure/components", s.id, "duplicate component id");
    if (s.declared_genus < 0) fail("structure/components", s.id, "negative declared genus");
  }
  if (d.curves.empty()) fail("structure/curves", "", "diagram has no curves");
  std::set<std::string> curve_ids;
  for (const auto& c : d.curves) {
    if (!curve_ids.insert(c.id).second) fail("structure/curves", c.id, "duplicate curve id");
    if (!d.find_component(c.component)) {
      fail("structure/curves", c.id, "unknown component " + c.component);
    }
  }
  for (const auto& s : d.components) {
    bool inhabited = false;
    for (const auto& c : d.curves) inhabited |= c.component == s.id;
    if (!inhabited) fail("structure/components", s.id, "component has no curves");
  }

  // Crossing references and flag counts.
  std::map<std::string, int> crossing_uses;
  for (const auto& c : d.curves) {
    for (const auto& e : c.events) {
      if (e.kind != Event::Kind::kCrossing) continue;
      if (!d.crossings.count(e.ref)) {
        fail("structure/crossing-refs", c.id, "unknown crossing " + e.ref);
      } else {
        crossing_uses[e.ref] += 1;
      }
    }
  }
  for (const auto& [xid, x] : d.crossings) {
    if (x.handedness != 1 && x.handedness != -1) {
      fail("structure/crossing-refs", xid, "handedness must be +1 or -1");
    }
    int uses = crossing_uses.count(xid) ? crossing_uses[xid] : 0;
    if (uses != 2) {
      fail("structure/crossing-flags", xid,
           "dangling crossing: referenced by " + std::to_string(uses) + " strand passes");
    }
  }
  if (structure_ok && d.crossings.size() % 3 != 0) {
    fail("structure/crossings-mod-3", "",
         "crossing count not divisible by 3 (" + std::to_string(d.crossings.size()) + ")");
  }

  // Pairing: fixed-point-free involution with aligned lengths.
  if (d.curves.size() % 2 != 0) {
    fail("pairing/involution", "", "odd number of curves cannot be paired");
  }
  std::map<std::string, int> paired;
  for (const auto& p : d.pairing) {
    if (p.curve_a == p.curve_b) {
      fail("pairing/involution", p.curve_a, "pairing not fixed-point-free");
      continue;
    }
    for (const auto& id : {p.curve_a, p.curve_b}) {
      if (!d.find_curve(id)) {
        fail("pairing/involution", id, "pairing references unknown curve");
      } else {
        paired[id] += 1;
      }
    }
    if (p.direction != 1 && p.direction != -1) {
      fail("pairing/involution", p.curve_a, "pairing direction must be +1 or -1");
    }
    const Curve* a = d.find_curve(p.curve_a);
    const Curve* b = d.find_curve(p.curve_b);
    if (a && b && a->crossing_event_count() != b->crossing_event_count()) {
      fail("pairing/sister-lengths", p.curve_a + "~" + p.curve_b,
           "sister curves have different crossing-event counts");
    }
  }
  for (const auto& c : d.curves) {
    int times = paired.count(c.id) ? paired[c.id] : 0;
    if (times != 1) {
      fail("pairing/involution", c.id,
           times == 0 ? "curve is unpaired" : "curve appears in several pairs");
    }
  }

  // Cut events vs cut-arc words: mutual, position-exact references.
  for (const auto& c : d.curves) {
    for (int i = 0; i < static_cast<int>(c.events.size()); ++i) {
      const Event& e = c.events[i];
      if (e.kind != Event::Kind::kCut) continue;
      if (e.sign != 1 && e.sign != -1) {
        fail("cut/events", c.id + "@" + std::to_string(i), "cut event sign must be +1 or -1");
        continue;
      }
      const CutArc* arc = d.find_cut_arc(e.ref);
      if (!arc) {
        fail("cut/events", c.id + "@" + std::to_string(i), "unknown cut arc " + e.ref);
        continue;
      }
      int refs = 0;
      for (const auto& w : arc->word) {
        if (w.curve == c.id && w.segment == i) {
          ++refs;
          if (w.sign != e.sign) {
            fail("cut/events", c.id + "@" + std::to_string(i),
                 "cut arc " + arc->id + " disagrees with the curve about the crossing sign");
          }
        }
      }
      if (refs != 1) {
        fail("cut/events", c.id + "@" + std::to_string(i),
             "cut event is referenced " + std::to_string(refs) + " times by arc " + e.ref);
      }
    }
  }
  std::set<std::string> arc_ids;
  std::map<std::string, int> arcs_per_point;
  for (const auto& a : d.cut_arcs) {
    if (!arc_ids.insert(a.id).second) fail("cut/arcs", a.id, "duplicate cut arc id");
    if (!d.find_marked_point(a.target)) {
      fail("cut/arcs", a.id, "cut arc targets unknown marked point " + a.target);
    } else {
      arcs_per_point[a.target] += 1;
    }
    for (const auto& w : a.word) {
      const Curve* c = d.find_curve(w.curve);
      if (!c) {
        fail("cut/arcs", a.id, "word references unknown curve " + w.curve);
        continue;
      }
      if (w.segment < 0 || w.segment >= static_cast<int>(c->events.size()) ||
          c->events[w.segment].kind != Event::Kind::kCut || c->events[w.segment].ref != a.id) {
        fail("cut/arcs", a.id,
             "word entry " + w.curve + "@" + std::to_string(w.segment) +
                 " does not point at a matching cut event");
      }
    }
  }
  for (const auto& [pid, n] : arcs_per_point) {
    if (n > 1) fail("cut/arcs", pid, "marked point has several cut arcs");
  }
  if (!d.cut_arcs.empty() && !d.basepoint) {
    fail("cut/arcs", "", "cut arcs declared but no basepoint");
  }

  // Marked points and locators.
  std::set<std::string> point_ids;
  for (const auto& p : d.marked_points) {
    if (!point_ids.insert(p.id).second) fail("points/ids", p.id, "duplicate marked point id");
  }
  auto locator_ok = [&](const FaceLocator& at, const std::string& what) {
    const Curve* c = d.find_curve(at.curve);
    if (!c) {
      fail("points/locators", what, "locator references unknown curve " + at.curve);
      return false;
    }
    if (at.segment < 0 || at.segment >= segment_count(*c)) {
      fail("points/locators", what, "locator segment out of range");
      return false;
    }
    return true;
  };
  for (const auto& p : d.marked_points) locator_ok(p.at, p.id);
  if (d.basepoint) locator_ok(*d.basepoint, "basepoint");

  // Lambdas: unique per curve, words resolve, marks in range.
  std::set<std::string> lambda_curves;
  for (const auto& l : d.lambdas) {
    const Curve* c = d.find_curve(l.curve);
    if (!c) {
      fail("lambda/words", l.curve, "lambda for unknown curve");
      continue;
    }
    if (!lambda_curves.insert(l.curve).second) {
      fail("lambda/words", l.curve, "curve has several lambda declarations");
    }
    if (l.base_segment < 0 || l.base_segment >= segment_count(*c)) {
      fail("lambda/words", l.curve, "lambda base mark out of range");
    }
    for (const auto& [arc, sign] : l.word) {
      if (!d.find_cut_arc(arc)) fail("lambda/words", l.curve, "lambda word uses unknown arc " + arc);
      if (sign != 1 && sign != -1) fail("lambda/words", l.curve, "lambda sign must be +1 or -1");
    }
  }
  for (const auto& c : d.curves) {
    if (!lambda_curves.count(c.id)) {
      r.add("lambda/words", CheckStatus::kWarn, c.id,
            "curve has no lambda declaration; lifting this diagram needs one");
    }
  }

  if (!structure_ok) {
    r.add("verdict", CheckStatus::kFail, "", "structural checks failed; deep checks skipped");
    return r;
  }

  // Filling necessary condition: every curve carries at least one crossing.
  for (const auto& c : d.curves) {
    if (c.crossing_event_count() == 0) {
      r.add("filling/edges-are-arcs", CheckStatus::kWarn, c.id,
            "curve has no crossing events; fails the filling edge-condition");
    }
  }

  // Face tracing, genus, cellularity.
  std::vector<Face> all_faces;
  bool faces_ok = false;
  try {
    all_faces = faces(d);
    faces_ok = true;
    r.add("faces/traceable", CheckStatus::kPass, "",
          std::to_string(all_faces.size()) + " faces traced");
  } catch (const UnsupportedDiagramError& e) {
    r.add("faces/traceable", CheckStatus::kFail, "", e.what());
  }
  if (faces_ok) {
    try {
      for (const auto& e : euler_genus(d)) {
        const DomainComponent* s = d.find_component(e.component);
        if (s && e.genus != s->declared_genus) {
          r.add("faces/genus", CheckStatus::kFail, e.component,
                "computed genus " + std::to_string(e.genus) + " != declared " +
                    std::to_string(s->declared_genus));
        } else {
          r.add("faces/genus", CheckStatus::kPass, e.component,
                "V=" + std::to_string(e.vertices) + " E=" + std::to_string(e.edges) +
                    " F=" + std::to_string(e.faces) + " chi=" + std::to_string(e.chi));
        }
      }
      r.add("filling/faces-are-disks", CheckStatus::kPass, "",
            "all faces are traced disks (cellular embedding)");
    } catch (const std::exception& e) {
      r.add("faces/genus", CheckStatus::kFail, "", e.what());
    }

    // Locators resolve to traced faces; at most one marked point per face.
    std::map<int, std::string> point_face;
    bool locators_resolved = true;
    for (const auto& p : d.marked_points) {
      try {
        int f = face_of(all_faces, p.at);
        auto [it, fresh] = point_face.emplace(f, p.id);
        if (!fresh) {
          // Branched covers legitimately stack branch points in one lifted
          // face, so this stays a warning rather than a failure.
          r.add("points/one-per-face", CheckStatus::kWarn, p.id,
                "shares a face with marked point " + it->second);
        }
      } catch (const ValidationFailure& e) {
        r.add("points/locators", CheckStatus::kFail, p.id, e.what());
        locators_resolved = false;
      }
    }
    int base_face = -1;
    if (d.basepoint) {
      try {
        base_face = face_of(all_faces, *d.basepoint);
      } catch (const ValidationFailure& e) {
        r.add("points/locators", CheckStatus::kFail, "basepoint", e.what());
        locators_resolved = false;
      }
    }

    // Cut arc face paths.
    if (locators_resolved) {
      for (const auto& a : d.cut_arcs) {
        if (!d.basepoint) break;
        const MarkedPoint* target = d.find_marked_point(a.target);
        if (!target) continue;
        bool path_ok = true;
        int cur = base_face;
        for (const auto& w : a.word) {
          int from, to;
          try {
            from = face_of(all_faces, entry_from_side(w));
            to = face_of(all_faces, entry_to_side(w));
          } catch (const ValidationFailure&) {
            path_ok = false;
            break;
          }
          if (from != cur) {
            path_ok = false;
            break;
          }
          cur = to;
        }
        int target_face = face_of(all_faces, target->at);
        if (!path_ok || cur != target_face) {
          r.add("cut/path", CheckStatus::kFail, a.id,
                "cut arc face path does not run from the basepoint face to the target face");
        } else {
          r.add("cut/path", CheckStatus::kPass, a.id, "");
        }
      }
      for (const auto& p : d.marked_points) {
        if (!arcs_per_point.count(p.id)) {
          r.add("cut/coverage", CheckStatus::kWarn, p.id,
                "marked point has no cut arc; lifting needs one per point");
        }
      }
    }
  }

  // Triple closure.
  try {
    auto triples = triple_orbits(d);
    r.add("triple/closure", CheckStatus::kPass, "",
          std::to_string(triples.size()) + " triple points");
  } catch (const TripleClosureError& e) {
    r.add("triple/closure", CheckStatus::kFail, e.flag(), e.what());
  } catch (const ValidationFailure& e) {
    r.add("triple/closure", CheckStatus::kFail, "", e.what());
  }

  // Lambda marks of a complete pair must be sister points (gap-aligned).
  for (const auto& p : d.pairing) {
    const LambdaSpec* la = d.find_lambda(p.curve_a);
    const LambdaSpec* lb = d.find_lambda(p.curve_b);
    const Curve* a = d.find_curve(p.curve_a);
    const Curve* b = d.find_curve(p.curve_b);
    if (!la || !lb || !a || !b) continue;
    int m = a->crossing_event_count();
    if (m == 0 || m != b->crossing_event_count()) continue;
    int ga = gap_of_segment(*a, la->base_segment);
    int gb = gap_of_segment(*b, lb->base_segment);
    if (sister_gap(p, ga, m) != gb) {
      r.add("lambda/marks-sister-aligned", CheckStatus::kWarn, p.curve_a + "~" + p.curve_b,
            "lambda base marks are not sister points under the pairing alignment");
    }
  }

  r.add("region/filling", CheckStatus::kWarn, "",
        "region condition not verified -- out of scope (needs the ambient manifold)");

  return r;
}

}  // namespace dehnlift
