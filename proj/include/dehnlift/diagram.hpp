#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dehnlift {

// Combinatorial model of a Johansson diagram with marked points and a cut
// system. The embedding is encoded purely combinatorially: a handedness per
// crossing (rotation system), so faces and genus are exactly computable.
//
// Conventions, fixed repo-wide:
//  * Curves are oriented by their event order; "left"/"right" of a segment are
//    relative to that orientation.
//  * A curve's events are a cyclic word mixing crossing events and cut events.
//    Segment i is the open piece of curve between event i and event i+1 (mod
//    the event count). All segment indices (face locators, lambda base marks)
//    refer to this full event word.
//  * A cut event's sign is +1 when the curve crosses the arc from the arc's
//    right side to its left side (arcs are oriented basepoint -> marked
//    point), -1 for the opposite crossing.
//  * Crossing handedness encodes the rotation system: the four half-edges in
//    the stored cyclic order around the vertex are (first out, second out,
//    first in, second in) for +1 and (first out, second in, first in,
//    second out) for -1, where the first strand is the flag with the
//    lexicographically smaller (curve id, event index) and the face tracer
//    pairs a forward half-edge with the face on the curve's left.
//  * Sister alignment: crossing events are numbered 0..m-1 along each curve
//    (cut events skipped); the i-th crossing event of the pair's first curve
//    is identified with crossing event (direction*i + offset) mod m of the
//    second.

enum class Side { kLeft, kRight };

inline Side opposite(Side s) { return s == Side::kLeft ? Side::kRight : Side::kLeft; }
inline const char* to_string(Side s) { return s == Side::kLeft ? "left" : "right"; }

struct Event {
  enum class Kind { kCrossing, kCut };
  Kind kind = Kind::kCrossing;
  std::string ref;  // crossing id or cut-arc id
  int sign = 0;     // cut events only: +1 or -1

  bool operator==(const Event&) const = default;
};

struct DomainComponent {
  std::string id;
  int declared_genus = 0;

  bool operator==(const DomainComponent&) const = default;
};

struct Curve {
  std::string id;
  std::string component;
  std::vector<Event> events;

  int crossing_event_count() const;
  // Index into `events` of the k-th crossing event (0-based, cut events
  // skipped). k must be in range.
  int crossing_event_position(int k) const;

  bool operator==(const Curve&) const = default;
};

struct Crossing {
  std::string id;
  int handedness = +1;

  bool operator==(const Crossing&) const = default;
};

// One record per sister pair (curve_a, curve_b), a != b. The induced point
// correspondence maps crossing event i of curve_a to crossing event
// direction*i + offset of curve_b.
struct SisterPairing {
  std::string curve_a;
  std::string curve_b;
  int offset = 0;
  int direction = +1;

  bool operator==(const SisterPairing&) const = default;
};

struct FaceLocator {
  std::string curve;
  int segment = 0;  // full event-word segment index
  Side side = Side::kLeft;

  bool operator==(const FaceLocator&) const = default;
};

struct MarkedPoint {
  std::string id;
  FaceLocator at;

  bool operator==(const MarkedPoint&) const = default;
};

// A transversal crossing of a cut arc with a curve: `segment` is the index of
// the matching cut event in the curve's event word, `sign` repeats that
// event's sign. Entries are listed in order along the arc, basepoint first.
struct CutArcEntry {
  std::string curve;
  int segment = 0;
  int sign = +1;

  bool operator==(const CutArcEntry&) const = default;
};

struct CutArc {
  std::string id;
  std::string target;  // marked point id
  std::vector<CutArcEntry> word;

  bool operator==(const CutArc&) const = default;
};

// Meridian word of the path joining the basepoint to a point on the curve
// (the pair's "related point"). The homotopy class of such a path in the
// punctured domain is exactly its reduced signed cut-arc word, so no further
// geometry is stored.
struct LambdaSpec {
  std::string curve;
  int base_segment = 0;                              // full event-word segment index
  std::vector<std::pair<std::string, int>> word;     // (cut-arc id, sign)

  bool operator==(const LambdaSpec&) const = default;
};

struct Diagram {
  std::vector<DomainComponent> components;
  std::vector<Curve> curves;
  std::vector<SisterPairing> pairing;
  std::map<std::string, Crossing> crossings;
  std::vector<MarkedPoint> marked_points;
  std::optional<FaceLocator> basepoint;
  std::vector<CutArc> cut_arcs;
  std::vector<LambdaSpec> lambdas;

  const Curve* find_curve(const std::string& id) const;
  const DomainComponent* find_component(const std::string& id) const;
  const CutArc* find_cut_arc(const std::string& id) const;
  const MarkedPoint* find_marked_point(const std::string& id) const;
  const LambdaSpec* find_lambda(const std::string& curve_id) const;
  // Sister curve id and the pairing record; nullptr when unpaired.
  const SisterPairing* find_pairing(const std::string& curve_id) const;
  std::string sister_of(const std::string& curve_id) const;

  bool operator==(const Diagram&) const = default;
};

// --- Validation ---------------------------------------------------------

enum class CheckStatus { kPass, kWarn, kFail };

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::kPass;
  std::string location;  // offending id / flag, empty when n/a
  std::string message;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool ok = true;  // false iff any check failed (warnings do not fail)

  void add(std::string name, CheckStatus status, std::string location, std::string message);
  bool has_failure(const std::string& name) const;
};

// Runs every structural invariant plus face tracing, genus, triple closure
// and the filling necessary conditions. Structural failures are reported,
// never thrown.
ValidationReport validate(const Diagram& d);

// --- Faces --------------------------------------------------------------

struct FaceCorner {
  std::string curve;
  int segment = 0;  // full event-word segment index
  Side side = Side::kLeft;

  bool operator==(const FaceCorner&) const = default;
  auto operator<=>(const FaceCorner&) const = default;
};

struct Face {
  std::string component;
  std::vector<FaceCorner> corners;  // cyclic boundary walk; a lone circle side
                                    // appears as a single corner
};

// Faces of every component, traced from the rotation system. Requires each
// component's diagram graph to be connected (a single embedded circle per
// component is also accepted); throws UnsupportedDiagramError otherwise.
std::vector<Face> faces(const Diagram& d);

// Face index (into faces(d)) owning a given segment side.
int face_of(const std::vector<Face>& all_faces, const FaceLocator& at);

struct EulerCount {
  std::string component;
  int vertices = 0;
  int edges = 0;
  int faces = 0;
  int chi = 0;
  int genus = 0;
};

std::vector<EulerCount> euler_genus(const Diagram& d);

// --- Triple points ------------------------------------------------------

// A flag is one strand pass at a crossing: (curve id, crossing-subsequence
// index). phi(flag) = other-flag-at-crossing(sister-point(flag)); triple
// closure means phi^3 = id with no orbit of size < 3. The two phi-orbits over
// one triple point (one per transversal direction) are merged into a single
// record of 3 distinct crossings.
struct Flag {
  std::string curve;
  int crossing_index = 0;  // index in the curve's crossing-event subsequence

  bool operator==(const Flag&) const = default;
  auto operator<=>(const Flag&) const = default;
};

struct TriplePoint {
  std::vector<std::string> crossings;      // 3 distinct crossing ids, sorted
  std::vector<std::vector<Flag>> orbits;   // the 2 merged phi-orbits
};

// Throws TripleClosureError (with the offending flag) if phi fails to close.
std::vector<TriplePoint> triple_orbits(const Diagram& d);

// --- Stats --------------------------------------------------------------

struct DiagramStats {
  int curve_count = 0;
  int crossing_count = 0;
  int triple_point_count = 0;
  int face_count = 0;
  int component_count = 0;
  std::vector<int> component_genera;
  int marked_point_count = 0;
  std::map<std::string, int> self_intersections;  // per curve id
  bool diametral = false;
};

DiagramStats stats(const Diagram& d);

// True iff the diagram has exactly 2 marked points on a single genus-0
// component.
bool is_diametral(const Diagram& d);

// Sub-diagram induced by one domain component. The basepoint, cut arcs and
// lambdas are kept only when they live on that component; pairs spanning two
// components are dropped (validate will flag the leftovers).
Diagram component_subdiagram(const Diagram& d, const std::string& component_id);

}  // namespace dehnlift
