#include "dehnlift/cover.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "dehnlift/errors.hpp"
#include "refined.hpp"

namespace dehnlift {

namespace {

// ---------------------------------------------------------------------------
// Indexed view of the base diagram
// ---------------------------------------------------------------------------

using internal::BaseIndex;

const Permutation& sigma_of_arc(const Diagram& d, const MonodromySpec& m, const std::string& arc) {
  const CutArc* a = d.find_cut_arc(arc);
  if (!a) throw ValidationFailure("unknown cut arc " + arc);
  auto it = m.sigma.find(a->target);
  if (it == m.sigma.end()) {
    throw MonodromyError("no permutation assigned to marked point " + a->target);
  }
  return it->second;
}

Permutation apply_word_transport(const Diagram& d, const MonodromySpec& m,
                                 const std::vector<std::pair<std::string, int>>& word) {
  Permutation acc = Permutation::identity(m.sheets);
  for (const auto& [arc, sign] : word) {
    acc = compose(power(sigma_of_arc(d, m, arc), sign), acc);
  }
  return acc;
}

// Transport around a full loop of the curve starting just after `base_event`
// (exclusive) and walking forward through all events once.
Permutation loop_transport(const Diagram& d, const MonodromySpec& m, const Curve& c,
                           int start_segment) {
  Permutation acc = Permutation::identity(m.sheets);
  int L = static_cast<int>(c.events.size());
  for (int step = 1; step <= L; ++step) {
    const Event& e = c.events[(start_segment + step) % L];
    if (e.kind == Event::Kind::kCut) {
      acc = compose(power(sigma_of_arc(d, m, e.ref), e.sign), acc);
    }
  }
  return acc;
}

// Same loop walked backwards (events start_segment, start_segment-1, ...).
Permutation loop_transport_reverse(const Diagram& d, const MonodromySpec& m, const Curve& c,
                                   int start_segment) {
  Permutation acc = Permutation::identity(m.sheets);
  int L = static_cast<int>(c.events.size());
  for (int step = 0; step < L; ++step) {
    const Event& e = c.events[((start_segment - step) % L + L) % L];
    if (e.kind == Event::Kind::kCut) {
      acc = compose(power(sigma_of_arc(d, m, e.ref), -e.sign), acc);
    }
  }
  return acc;
}

int crossing_subindex(const Curve& c, int event_index) {
  int k = 0;
  for (int i = 0; i < event_index; ++i) {
    if (c.events[i].kind == Event::Kind::kCrossing) ++k;
  }
  return k;
}

int gap_of_segment(const Curve& c, int seg) {
  int m = c.crossing_event_count();
  int gap = -1;
  int seen = 0;
  for (int i = 0; i <= seg && i < static_cast<int>(c.events.size()); ++i) {
    if (c.events[i].kind == Event::Kind::kCrossing) {
      gap = seen;
      ++seen;
    }
  }
  return gap < 0 ? m - 1 : gap;
}

int sister_gap_image(const SisterPairing& p, int gap, int m) {
  int image = p.direction == +1 ? gap + p.offset : p.offset - gap - 1;
  return ((image % m) + m) % m;
}

using internal::RefinedComplex;
using internal::build_refined;


// Euler check of the refined complex against the declared genera. Also
// verifies connectivity of each component's refined structure.
void check_refined_realizable(const Diagram& d, const RefinedComplex& r) {
  // Component of each curve / arc. Arcs live on the basepoint's component.
  std::string base_comp;
  if (d.basepoint) {
    base_comp = d.find_curve(d.basepoint->curve)->component;
  } else if (!d.cut_arcs.empty()) {
    throw MonodromyError("cut arcs without a basepoint");
  }

  std::map<std::string, int> V, E, F;
  std::map<std::string, std::set<int>> comp_cells;
  for (size_t ci = 0; ci < d.curves.size(); ++ci) {
    const Curve& c = d.curves[ci];
    if (c.events.empty()) continue;  // lone circle, handled separately
    int crossings_here = 0;
    for (const auto& e : c.events) {
      if (e.kind == Event::Kind::kCrossing) ++crossings_here;
    }
    // q-vertices sit on the curve (one per cut event).
    V[c.component] += static_cast<int>(c.events.size()) - crossings_here;
    E[c.component] += static_cast<int>(c.events.size());
    for (int seg = 0; seg < static_cast<int>(c.events.size()); ++seg) {
      comp_cells[c.component].insert(r.left_cell_of_curve_seg(static_cast<int>(ci), seg));
      comp_cells[c.component].insert(r.right_cell_of_curve_seg(static_cast<int>(ci), seg));
    }
  }
  std::set<std::string> counted;
  for (const auto& c : d.curves) {
    if (c.events.empty()) continue;
    for (const auto& e : c.events) {
      if (e.kind == Event::Kind::kCrossing && counted.insert(e.ref).second) V[c.component] += 1;
    }
  }
  if (!d.cut_arcs.empty()) {
    V[base_comp] += 1;  // basepoint
    V[base_comp] += static_cast<int>(d.marked_points.size());
    for (size_t ai = 0; ai < d.cut_arcs.size(); ++ai) {
      E[base_comp] += static_cast<int>(d.cut_arcs[ai].word.size()) + 1;
      for (int j = 0; j <= static_cast<int>(d.cut_arcs[ai].word.size()); ++j) {
        comp_cells[base_comp].insert(r.face_of_dart[r.arc_fwd(static_cast<int>(ai), j)]);
        comp_cells[base_comp].insert(r.face_of_dart[r.arc_bwd(static_cast<int>(ai), j)]);
      }
    }
  }
  int cells_assigned = 0;
  for (const auto& [comp, cells] : comp_cells) {
    F[comp] = static_cast<int>(cells.size());
    cells_assigned += F[comp];
  }
  if (cells_assigned != r.face_total) {
    // A refined face claimed by two components (impossible) or by none
    // (star disjoint from the diagram graph).
    throw MonodromyError(
        "cut system is disconnected from the diagram graph; refined faces are ill-defined");
  }
  for (const auto& s : d.components) {
    if (!V.count(s.id)) continue;  // lone circle component
    int chi = V[s.id] - E[s.id] + F[s.id];
    if (chi != 2 - 2 * s.declared_genus) {
      throw MonodromyError("cut system unrealizable on component " + s.id +
                           " with this departure order (refined Euler characteristic " +
                           std::to_string(chi) + ", expected " +
                           std::to_string(2 - 2 * s.declared_genus) + ")");
    }
  }
}

// Transport between refined cells across cut arcs only (stays inside one
// diagram face). Returns the sheet permutation of one such path.
Permutation cell_transport(const Diagram& d, const RefinedComplex& r,
                           const MonodromySpec& m, int from_cell, int to_cell) {
  if (from_cell == to_cell) return Permutation::identity(m.sheets);
  std::map<int, Permutation> reached;
  reached.emplace(from_cell, Permutation::identity(m.sheets));
  std::deque<int> queue{from_cell};
  while (!queue.empty()) {
    int cell = queue.front();
    queue.pop_front();
    const Permutation& t = reached.at(cell);
    for (size_t ai = 0; ai < d.cut_arcs.size(); ++ai) {
      const Permutation& sigma = sigma_of_arc(d, m, d.cut_arcs[ai].id);
      for (int j = 0; j <= static_cast<int>(d.cut_arcs[ai].word.size()); ++j) {
        int left = r.face_of_dart[r.arc_fwd(static_cast<int>(ai), j)];
        int right = r.face_of_dart[r.arc_bwd(static_cast<int>(ai), j)];
        // right -> left applies sigma, left -> right its inverse.
        if (cell == right && !reached.count(left)) {
          reached.emplace(left, compose(sigma, t));
          queue.push_back(left);
        }
        if (cell == left && !reached.count(right)) {
          reached.emplace(right, compose(inverse(sigma), t));
          queue.push_back(right);
        }
      }
    }
    if (reached.count(to_cell)) break;
  }
  auto it = reached.find(to_cell);
  if (it == reached.end()) {
    throw InternalError("no cut-arc path between refined cells of one face");
  }
  return it->second;
}

std::string sheet_tag(int sheet) { return ".s" + std::to_string(sheet); }

}  // namespace

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

Permutation curve_monodromy(const Diagram& d, const MonodromySpec& m, const std::string& curve) {
  const Curve* c = d.find_curve(curve);
  if (!c) throw ValidationFailure("unknown curve " + curve);
  const LambdaSpec* l = d.find_lambda(curve);
  int base_segment = l ? l->base_segment : 0;
  if (c->events.empty()) return Permutation::identity(m.sheets);
  return loop_transport(d, m, *c, base_segment);
}

Permutation dual_loop_permutation(const Diagram& d, const MonodromySpec& m,
                                  const std::string& curve_of_pair) {
  const SisterPairing* p = d.find_pairing(curve_of_pair);
  if (!p) throw ValidationFailure("curve " + curve_of_pair + " has no sister pairing");
  const LambdaSpec* la = d.find_lambda(p->curve_a);
  const LambdaSpec* lb = d.find_lambda(p->curve_b);
  if (!la || !lb) {
    throw ValidationFailure("pair " + p->curve_a + "~" + p->curve_b +
                            " is missing a lambda declaration");
  }
  // Out along lambda_a, back along lambda_b: perm(lambda_b)^-1 after
  // perm(lambda_a).
  return compose(inverse(apply_word_transport(d, m, lb->word)),
                 apply_word_transport(d, m, la->word));
}

bool locally_cyclic(const Diagram& d, const MonodromySpec& m) {
  for (const auto& p : d.marked_points) {
    auto it = m.sigma.find(p.id);
    if (it == m.sigma.end()) throw MonodromyError("no permutation for marked point " + p.id);
    if (!it->second.is_full_cycle()) return false;
  }
  return true;
}

int riemann_hurwitz_expected(const Diagram& d, const MonodromySpec& m) {
  int chi_base = 0;
  for (const auto& s : d.components) chi_base += 2 - 2 * s.declared_genus;
  int result = m.sheets * chi_base;
  for (const auto& p : d.marked_points) {
    auto it = m.sigma.find(p.id);
    if (it == m.sigma.end()) throw MonodromyError("no permutation for marked point " + p.id);
    result -= m.sheets - it->second.cycle_count();
  }
  return result;
}

ValidationReport validate_monodromy(const Diagram& d, const MonodromySpec& m) {
  ValidationReport r;
  if (m.sheets < 1) {
    r.add("monodromy/sheets", CheckStatus::kFail, "", "sheet count must be positive");
    return r;
  }
  r.add("monodromy/sheets", CheckStatus::kPass, "", "n = " + std::to_string(m.sheets));

  bool coverage_ok = true;
  for (const auto& p : d.marked_points) {
    if (!m.sigma.count(p.id)) {
      r.add("monodromy/coverage", CheckStatus::kFail, p.id, "marked point has no permutation");
      coverage_ok = false;
    }
  }
  for (const auto& [pid, sigma] : m.sigma) {
    if (!d.find_marked_point(pid)) {
      r.add("monodromy/coverage", CheckStatus::kFail, pid,
            "permutation for unknown marked point");
      coverage_ok = false;
    }
    if (sigma.size() != m.sheets) {
      r.add("monodromy/coverage", CheckStatus::kFail, pid, "permutation has wrong sheet count");
      coverage_ok = false;
    }
  }
  std::set<std::string> order_set(m.departure_order.begin(), m.departure_order.end());
  for (const auto& p : d.marked_points) {
    if (!order_set.count(p.id)) {
      r.add("monodromy/coverage", CheckStatus::kFail, p.id, "missing from departure order");
      coverage_ok = false;
    }
  }
  if (coverage_ok) r.add("monodromy/coverage", CheckStatus::kPass, "", "");
  if (!coverage_ok) return r;

  // Sphere relation along the counterclockwise walk around the basepoint.
  Permutation around = Permutation::identity(m.sheets);
  for (const auto& pid : m.departure_order) around = compose(m.sigma.at(pid), around);
  if (!around.is_identity()) {
    r.add("monodromy/sphere-relation", CheckStatus::kFail, "",
          "product over departure order is " + around.to_string() + ", not the identity");
  } else {
    r.add("monodromy/sphere-relation", CheckStatus::kPass, "", "");
  }

  std::vector<Permutation> gens;
  for (const auto& [pid, sigma] : m.sigma) gens.push_back(sigma);
  auto orbit_classes = orbits(gens, m.sheets);
  r.add("monodromy/orbits", CheckStatus::kPass, "",
        std::to_string(orbit_classes.size()) + " orbit(s); transitive: " +
            (orbit_classes.size() == 1 ? "yes" : "no"));
  for (const auto& p : d.marked_points) {
    const Permutation& sigma = m.sigma.at(p.id);
    r.add("monodromy/locally-cyclic", CheckStatus::kPass, p.id,
          sigma.is_full_cycle() ? "full cycle" : "not a full cycle");
  }

  // Realizability of the cut system with this departure order.
  if (!d.marked_points.empty()) {
    bool arcs_complete = d.basepoint.has_value();
    for (const auto& p : d.marked_points) {
      bool has_arc = false;
      for (const auto& a : d.cut_arcs) has_arc |= a.target == p.id;
      arcs_complete &= has_arc;
    }
    if (!arcs_complete) {
      r.add("monodromy/cut-realizable", CheckStatus::kFail, "",
            "lifting needs a basepoint and one cut arc per marked point");
    } else {
      try {
        BaseIndex bi = BaseIndex::build(d);
        RefinedComplex rc = build_refined(d, bi, m.departure_order);
        check_refined_realizable(d, rc);
        r.add("monodromy/cut-realizable", CheckStatus::kPass, "", "");
      } catch (const std::exception& e) {
        r.add("monodromy/cut-realizable", CheckStatus::kFail, "", e.what());
      }
    }
  }

  // Sister monodromy consistency: the loop of curve_a based at its mark must
  // equal the loop of curve_b based at the sister mark, walked in the
  // pairing direction.
  for (const auto& p : d.pairing) {
    const Curve* a = d.find_curve(p.curve_a);
    const Curve* b = d.find_curve(p.curve_b);
    const LambdaSpec* la = d.find_lambda(p.curve_a);
    const LambdaSpec* lb = d.find_lambda(p.curve_b);
    if (!a || !b || !la || !lb) continue;
    Permutation mu_a = a->events.empty() ? Permutation::identity(m.sheets)
                                         : loop_transport(d, m, *a, la->base_segment);
    Permutation mu_b =
        b->events.empty()
            ? Permutation::identity(m.sheets)
            : (p.direction == +1 ? loop_transport(d, m, *b, lb->base_segment)
                                 : loop_transport_reverse(d, m, *b, lb->base_segment));
    if (mu_a != mu_b) {
      r.add("monodromy/sister-consistency", CheckStatus::kFail, p.curve_a + "~" + p.curve_b,
            "based curve monodromies disagree: " + mu_a.to_string() + " vs " + mu_b.to_string());
    } else {
      r.add("monodromy/sister-consistency", CheckStatus::kPass, p.curve_a + "~" + p.curve_b, "");
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// branched_cover
// ---------------------------------------------------------------------------

namespace {

struct LiftedCurveData {
  std::string id;
  int start_sheet = 0;                 // minimum sheet of its monodromy cycle
  int wraps = 0;                       // cycle length
  int base_curve = 0;                  // index into base curves
  std::vector<Event> events;           // emitted lifted word
  std::vector<int> segment_sheet;      // sheet after emitted event k
  std::vector<int> event_walk_pos;     // walk position of emitted event k
  // (wrap, base event idx) -> lifted crossing-subsequence index
  std::map<std::pair<int, int>, int> crossing_instance;
  // (wrap, base event idx) -> lifted word position, for cut events that were
  // kept
  std::map<std::pair<int, int>, int> kept_cut_position;
  // sheet of the lift of base segment b in wrap w
  std::vector<std::vector<int>> wrap_segment_sheet;  // [wrap][base segment]
};

struct Lifter {
  const Diagram& d;
  const MonodromySpec& m;
  BaseIndex bi;
  int n;

  // kept star: per arc index, the left-side sheet of the lift departing the
  // sheet-1 basepoint lift.
  std::map<int, int> kept_left_sheet;

  std::vector<std::vector<LiftedCurveData>> lifts;  // per base curve
  // (base curve, base segment, segment sheet) -> (lift index in curve, wrap)
  std::map<std::tuple<int, int, int>, std::pair<int, int>> segment_instance;
  // lifted crossing id -> its two strand passes, as
  // (lifted curve id, lifted crossing index, base curve id, base event idx)
  std::map<std::string, std::vector<std::tuple<std::string, int, std::string, int>>> lifted_flags;

  Lifter(const Diagram& d_, const MonodromySpec& m_)
      : d(d_), m(m_), bi(BaseIndex::build(d_)), n(m_.sheets) {}

  const Permutation& sigma(const std::string& arc) const { return sigma_of_arc(d, m, arc); }

  void compute_kept_star() {
    int corner = 1;  // reference corner: between the last and first departures
    for (const auto& pid : m.departure_order) {
      for (size_t ai = 0; ai < d.cut_arcs.size(); ++ai) {
        if (d.cut_arcs[ai].target != pid) continue;
        const Permutation& s = sigma(d.cut_arcs[ai].id);
        kept_left_sheet[static_cast<int>(ai)] = s(corner);
        corner = s(corner);
      }
    }
    if (corner != 1) throw MonodromyError("sphere relation violated around the basepoint");
  }

  void lift_curves() {
    lifts.resize(d.curves.size());
    for (int ci = 0; ci < static_cast<int>(d.curves.size()); ++ci) {
      const Curve& c = d.curves[ci];
      int L = static_cast<int>(c.events.size());
      Permutation mu0 = c.events.empty() ? Permutation::identity(n)
                                         : loop_transport(d, m, c, L - 1);  // based at event 0
      for (const auto& cycle : mu0.cycle_decomposition()) {
        LiftedCurveData lc;
        lc.base_curve = ci;
        lc.start_sheet = cycle[0];
        lc.wraps = static_cast<int>(cycle.size());
        lc.id = c.id + sheet_tag(lc.start_sheet);
        lc.wrap_segment_sheet.assign(lc.wraps, std::vector<int>(std::max(L, 1), 0));
        int u = lc.start_sheet;
        if (L == 0) {
          lc.wrap_segment_sheet[0][0] = u;
        }
        for (int t = 0; t < lc.wraps * L; ++t) {
          int wrap = t / L;
          int idx = t % L;
          const Event& e = c.events[idx];
          if (e.kind == Event::Kind::kCrossing) {
            int k_hat = 0;
            for (const auto& ev : lc.events) {
              if (ev.kind == Event::Kind::kCrossing) ++k_hat;
            }
            lc.crossing_instance[{wrap, idx}] = k_hat;
            lifted_flags[e.ref + sheet_tag(u)].push_back({lc.id, k_hat, c.id, idx});
            lc.events.push_back({Event::Kind::kCrossing, e.ref + sheet_tag(u), 0});
            lc.event_walk_pos.push_back(t);
            lc.segment_sheet.push_back(u);
          } else {
            int ai = bi.arc_index.at(e.ref);
            const Permutation& s = sigma(e.ref);
            int crossed_left = e.sign > 0 ? s(u) : u;
            bool kept = kept_left_sheet.count(ai) && kept_left_sheet.at(ai) == crossed_left;
            u = e.sign > 0 ? s(u) : inverse(s)(u);
            if (kept) {
              lc.kept_cut_position[{wrap, idx}] = static_cast<int>(lc.events.size());
              lc.events.push_back({Event::Kind::kCut, lifted_arc_id(ai), e.sign});
              lc.event_walk_pos.push_back(t);
              lc.segment_sheet.push_back(u);
            }
          }
          lc.wrap_segment_sheet[wrap][idx] = u;
        }
        if (u != lc.start_sheet) throw InternalError("curve lift did not close");
        int li = static_cast<int>(lifts[ci].size());
        for (int w = 0; w < lc.wraps; ++w) {
          for (int b = 0; b < std::max(L, 1); ++b) {
            segment_instance[{ci, b, lc.wrap_segment_sheet[w][b]}] = {li, w};
          }
        }
        lifts[ci].push_back(std::move(lc));
      }
    }
  }

  int min_cycle_label(const std::string& pid, int sheet) const {
    const Permutation& s = m.sigma.at(pid);
    int min_label = sheet;
    int cur = s(sheet);
    while (cur != sheet) {
      min_label = std::min(min_label, cur);
      cur = s(cur);
    }
    return min_label;
  }

  // The lifted point id over P_i for the cycle containing `sheet`.
  std::string lifted_point_id(const std::string& pid, int sheet) const {
    return pid + sheet_tag(min_cycle_label(pid, sheet));
  }

  std::string lifted_arc_id(int ai) const {
    const CutArc& a = d.cut_arcs[ai];
    return a.id + sheet_tag(min_cycle_label(a.target, kept_left_sheet.at(ai)));
  }

  // Lifted face locator: the lift of (curve, segment, side) whose segment
  // sheet is `sheet`.
  FaceLocator lifted_locator(const FaceLocator& at, int sheet) const {
    int ci = bi.curve_index.at(at.curve);
    auto it = segment_instance.find({ci, at.segment, sheet});
    if (it == segment_instance.end()) {
      throw InternalError("no lift of segment " + at.curve + "@" + std::to_string(at.segment) +
                          " in sheet " + std::to_string(sheet));
    }
    auto [li, wrap] = it->second;
    const LiftedCurveData& lc = lifts[ci][li];
    int L = bi.events_of(ci);
    int lifted_segment = 0;
    if (L == 0 || lc.events.empty()) {
      lifted_segment = 0;
    } else {
      // Last emitted event at walk position <= wrap*L + at.segment.
      int target = wrap * L + at.segment;
      int k = -1;
      for (int i = 0; i < static_cast<int>(lc.event_walk_pos.size()); ++i) {
        if (lc.event_walk_pos[i] <= target) k = i;
      }
      if (k < 0) k = static_cast<int>(lc.event_walk_pos.size()) - 1;  // wraps around
      lifted_segment = k;
    }
    return {lc.id, lifted_segment, at.side};
  }
};

}  // namespace

LiftResult branched_cover(const Diagram& d, const MonodromySpec& m) {
  ValidationReport dr = validate(d);
  if (!dr.ok) throw ValidationFailure("diagram does not validate; refusing to lift");
  ValidationReport mr = validate_monodromy(d, m);
  if (!mr.ok) {
    std::string why;
    for (const auto& c : mr.checks) {
      if (c.status == CheckStatus::kFail) {
        why = c.name + (c.location.empty() ? "" : " (" + c.location + ")") + ": " + c.message;
        break;
      }
    }
    throw MonodromyError("monodromy rejected: " + why);
  }
  // Lifting also needs every pair to carry lambdas and aligned marks.
  for (const auto& p : d.pairing) {
    const LambdaSpec* la = d.find_lambda(p.curve_a);
    const LambdaSpec* lb = d.find_lambda(p.curve_b);
    if (!la || !lb) {
      throw ValidationFailure("pair " + p.curve_a + "~" + p.curve_b +
                              " is missing lambda declarations, cannot lift");
    }
    const Curve* a = d.find_curve(p.curve_a);
    const Curve* b = d.find_curve(p.curve_b);
    int mm = a->crossing_event_count();
    if (mm > 0) {
      int ga = gap_of_segment(*a, la->base_segment);
      int gb = gap_of_segment(*b, lb->base_segment);
      if (sister_gap_image(p, ga, mm) != gb) {
        throw ValidationFailure("lambda base marks of pair " + p.curve_a + "~" + p.curve_b +
                                " are not sister points");
      }
    }
  }

  const int n = m.sheets;
  Lifter lf(d, m);

  RefinedComplex rc;
  if (!d.marked_points.empty()) {
    rc = build_refined(d, lf.bi, m.departure_order);
    check_refined_realizable(d, rc);
    lf.compute_kept_star();
  }
  lf.lift_curves();

  LiftResult out;
  out.base = d;
  out.spec = m;
  Diagram& lifted = out.lifted;

  // Components: per base component, orbits of the full sigma set for the
  // basepoint component (arcs all live there), singleton sheets elsewhere.
  std::string base_comp;
  if (d.basepoint) base_comp = d.find_curve(d.basepoint->curve)->component;
  std::vector<Permutation> gens;
  for (const auto& [pid, sigma] : m.sigma) gens.push_back(sigma);
  std::map<std::string, std::map<int, std::string>> component_of_sheet;  // base comp -> sheet -> id
  std::map<std::string, int> lifted_comp_chi;
  for (const auto& s : d.components) {
    std::vector<std::vector<int>> cls =
        (s.id == base_comp && !d.marked_points.empty()) ? orbits(gens, n)
                                                        : orbits({}, n);
    for (const auto& orbit : cls) {
      std::string cid = s.id + sheet_tag(orbit[0]);
      int chi = static_cast<int>(orbit.size()) * (2 - 2 * s.declared_genus);
      if (s.id == base_comp) {
        for (const auto& p : d.marked_points) {
          const Permutation& sg = m.sigma.at(p.id);
          std::set<int> in_orbit(orbit.begin(), orbit.end());
          int cycles_here = 0;
          std::set<int> seen;
          for (int u : orbit) {
            if (seen.count(u)) continue;
            ++cycles_here;
            int cur = u;
            do {
              seen.insert(cur);
              cur = sg(cur);
            } while (cur != u);
          }
          chi -= static_cast<int>(orbit.size()) - cycles_here;
        }
      }
      if ((2 - chi) % 2 != 0 || chi > 2) {
        throw InternalError("per-component Euler bookkeeping failed");
      }
      int genus = (2 - chi) / 2;
      lifted.components.push_back({cid, genus});
      for (int u : orbit) component_of_sheet[s.id][u] = cid;
      lifted_comp_chi[cid] = chi;
    }
  }

  // Curves and crossings.
  for (int ci = 0; ci < static_cast<int>(d.curves.size()); ++ci) {
    const Curve& c = d.curves[ci];
    for (const auto& lc : lf.lifts[ci]) {
      Curve lifted_curve;
      lifted_curve.id = lc.id;
      lifted_curve.component = component_of_sheet.at(c.component).at(lc.start_sheet);
      lifted_curve.events = lc.events;
      lifted.curves.push_back(std::move(lifted_curve));
      out.provenance.curves[lc.id] = {c.id, lc.start_sheet};
    }
  }
  for (const auto& [xid, x] : d.crossings) {
    for (int u = 1; u <= n; ++u) {
      std::string id = xid + sheet_tag(u);
      // Handedness is declared relative to the lexicographically first
      // strand; if the two lifted flags sort the other way round than their
      // base flags, the declared value must flip to describe the same ring.
      auto flags_it = lf.lifted_flags.find(id);
      if (flags_it == lf.lifted_flags.end() || flags_it->second.size() != 2) {
        throw InternalError("lifted crossing " + id + " does not have two strand passes");
      }
      const auto& f0 = flags_it->second[0];
      const auto& f1 = flags_it->second[1];
      bool base_first =
          std::tie(std::get<2>(f0), std::get<3>(f0)) < std::tie(std::get<2>(f1), std::get<3>(f1));
      bool lifted_first =
          std::tie(std::get<0>(f0), std::get<1>(f0)) < std::tie(std::get<0>(f1), std::get<1>(f1));
      int handedness = base_first == lifted_first ? x.handedness : -x.handedness;
      lifted.crossings[id] = Crossing{id, handedness};
      out.provenance.crossings[id] = {xid, u};
    }
  }

  // Marked points, basepoint, kept cut arcs.
  if (!d.marked_points.empty()) {
    for (const auto& p : d.marked_points) {
      const Permutation& sg = m.sigma.at(p.id);
      int ai = -1;
      for (size_t k = 0; k < d.cut_arcs.size(); ++k) {
        if (d.cut_arcs[k].target == p.id) ai = static_cast<int>(k);
      }
      int tip = rc.tip_cell(ai);
      int locator_cell = rc.cell_of_locator(p.at);
      Permutation transport = cell_transport(d, rc, m, tip, locator_cell);
      for (const auto& cycle : sg.cycle_decomposition()) {
        std::string pid = p.id + sheet_tag(cycle[0]);
        FaceLocator at = lf.lifted_locator(p.at, transport(cycle[0]));
        lifted.marked_points.push_back({pid, at});
        out.provenance.marked_points[pid] = {p.id, cycle};
      }
    }
    // Basepoint: the sheet-1 lift, located through the reference corner cell
    // (the corner between the last and first departures, swept by the face
    // walk leaving along the last departure's dart).
    int last_arc = -1;
    for (size_t k = 0; k < d.cut_arcs.size() && last_arc < 0; ++k) {
      if (d.cut_arcs[k].target == m.departure_order.back()) last_arc = static_cast<int>(k);
    }
    int ref_cell = rc.face_of_dart[rc.arc_fwd(last_arc, 0)];
    int base_cell = rc.cell_of_locator(*d.basepoint);
    Permutation transport = cell_transport(d, rc, m, ref_cell, base_cell);
    lifted.basepoint = lf.lifted_locator(*d.basepoint, transport(1));

    for (size_t ai = 0; ai < d.cut_arcs.size(); ++ai) {
      const CutArc& a = d.cut_arcs[ai];
      const Permutation& sg = lf.sigma(a.id);
      int left = lf.kept_left_sheet.at(static_cast<int>(ai));
      CutArc lifted_arc;
      lifted_arc.id = lf.lifted_arc_id(static_cast<int>(ai));
      lifted_arc.target = lf.lifted_point_id(a.target, left);
      for (const auto& w : a.word) {
        int ci = lf.bi.curve_index.at(w.curve);
        int entering = w.sign > 0 ? inverse(sg)(left) : left;
        // Locate the kept cut event instance with that entering sheet.
        bool found = false;
        for (const auto& lc : lf.lifts[ci]) {
          for (int wrap = 0; wrap < lc.wraps && !found; ++wrap) {
            auto it = lc.kept_cut_position.find({wrap, w.segment});
            if (it == lc.kept_cut_position.end()) continue;
            int L = lf.bi.events_of(ci);
            int prev_sheet =
                w.segment == 0 ? lc.wrap_segment_sheet[(wrap - 1 + lc.wraps) % lc.wraps][L - 1]
                               : lc.wrap_segment_sheet[wrap][w.segment - 1];
            if (prev_sheet != entering) continue;
            lifted_arc.word.push_back({lc.id, it->second, w.sign});
            found = true;
          }
          if (found) break;
        }
        if (!found) throw InternalError("kept cut arc crossing not found on any lifted curve");
      }
      out.provenance.cut_arcs[lifted_arc.id] = {a.id, left};
      lifted.cut_arcs.push_back(std::move(lifted_arc));
    }
  } else if (d.basepoint) {
    lifted.basepoint = lf.lifted_locator(*d.basepoint, 1);
  }

  // Sistering: tandem walk from the lambda marks, sheet-preserving there.
  for (const auto& p : d.pairing) {
    int ca = lf.bi.curve_index.at(p.curve_a);
    int cb = lf.bi.curve_index.at(p.curve_b);
    const Curve& a = d.curves[ca];
    const Curve& b = d.curves[cb];
    const LambdaSpec* la = d.find_lambda(p.curve_a);
    const LambdaSpec* lb = d.find_lambda(p.curve_b);
    int La = static_cast<int>(a.events.size());
    int Lb = static_cast<int>(b.events.size());
    int mm = a.crossing_event_count();
    std::set<std::string> paired_b;

    for (int li = 0; li < static_cast<int>(lf.lifts[ca].size()); ++li) {
      const LiftedCurveData& lca = lf.lifts[ca][li];
      // Sister lift: the b-lift with a mark instance at the same sheet.
      int mark_sheet = La == 0 ? lca.start_sheet : lca.wrap_segment_sheet[0][la->base_segment];
      auto itb = lf.segment_instance.find({cb, lb->base_segment, mark_sheet});
      if (itb == lf.segment_instance.end()) {
        throw InternalError("no sister mark instance in sheet " + std::to_string(mark_sheet));
      }
      auto [lib, wrap_b0] = itb->second;
      const LiftedCurveData& lcb = lf.lifts[cb][lib];
      if (!paired_b.insert(lcb.id).second) {
        throw InternalError("two lifted curves claim the same sister");
      }
      if (lcb.wraps != lca.wraps) {
        throw InternalError("sister lifts have different wrap counts");
      }

      int lifted_offset = 0;
      bool have_offset = false;
      int m_hat = lca.wraps * mm;
      if (mm > 0) {
        // Tandem walk: a forward from its mark, b in the pairing direction.
        int ta = 0 * La + la->base_segment;
        int tb = wrap_b0 * Lb + lb->base_segment;
        int ua = mark_sheet, ub = mark_sheet;
        int total_a = lca.wraps * La;
        int total_b = lcb.wraps * Lb;
        for (int leg = 0; leg < lca.wraps * mm; ++leg) {
          // advance a to its next crossing event
          for (;;) {
            ta = (ta + 1) % total_a;
            const Event& e = a.events[ta % La];
            if (e.kind == Event::Kind::kCrossing) break;
            ua = e.sign > 0 ? lf.sigma(e.ref)(ua) : inverse(lf.sigma(e.ref))(ua);
          }
          // advance b in direction p.direction
          for (;;) {
            if (p.direction == +1) {
              tb = (tb + 1) % total_b;
              const Event& e = b.events[tb % Lb];
              if (e.kind == Event::Kind::kCrossing) break;
              ub = e.sign > 0 ? lf.sigma(e.ref)(ub) : inverse(lf.sigma(e.ref))(ub);
            } else {
              const Event& e = b.events[tb % Lb];
              tb = (tb - 1 + total_b) % total_b;
              if (e.kind == Event::Kind::kCrossing) {
                break;
              }
              ub = e.sign > 0 ? inverse(lf.sigma(e.ref))(ub) : lf.sigma(e.ref)(ub);
            }
          }
          int idx_a = ta % La, wrap_a = ta / La;
          int idx_b, wrap_b;
          if (p.direction == +1) {
            idx_b = tb % Lb;
            wrap_b = tb / Lb;
          } else {
            // tb was stepped past the crossing event; the event index is the
            // one we just left.
            idx_b = (tb + 1) % Lb;
            wrap_b = ((tb + 1) % total_b) / Lb;
          }
          int k_base_a = crossing_subindex(a, idx_a);
          int k_base_b = crossing_subindex(b, idx_b);
          int want = ((p.direction * k_base_a + p.offset) % mm + mm) % mm;
          if (k_base_b != want) {
            throw InternalError("tandem walk misaligned: base crossings " +
                                std::to_string(k_base_b) + " vs expected " + std::to_string(want));
          }
          int ka = lca.crossing_instance.at({wrap_a, idx_a});
          int kb = lcb.crossing_instance.at({wrap_b, idx_b});
          out.sister_events[{lca.id, ka}] = {lcb.id, kb};
          int off = ((kb - p.direction * ka) % m_hat + m_hat) % m_hat;
          if (!have_offset) {
            lifted_offset = off;
            have_offset = true;
          } else if (off != lifted_offset) {
            throw InternalError("lifted sister correspondence is not an aligned rotation");
          }
        }
        if (ua != mark_sheet || ub != mark_sheet) {
          throw InternalError("tandem walk did not return to the marks");
        }
      } else {
        lifted_offset = p.offset;
      }
      lifted.pairing.push_back({lca.id, lcb.id, lifted_offset, p.direction});
    }
    if (static_cast<int>(paired_b.size()) != static_cast<int>(lf.lifts[cb].size())) {
      throw InternalError("sister pairing of lifts is not a bijection");
    }
  }

  // Lambdas: emitted when the lifts of both base lambdas land on sister
  // marks, which happens exactly when the two word transports agree on
  // sheet 1. Other lifts stay without a lambda (validate warns).
  for (const auto& p : d.pairing) {
    const LambdaSpec* la = d.find_lambda(p.curve_a);
    const LambdaSpec* lb = d.find_lambda(p.curve_b);
    Permutation ta = apply_word_transport(d, m, la->word);
    Permutation tb = apply_word_transport(d, m, lb->word);
    if (ta(1) != tb(1)) continue;
    int h = ta(1);
    for (const auto& [curve_id, l] : {std::pair{p.curve_a, la}, std::pair{p.curve_b, lb}}) {
      int ci = lf.bi.curve_index.at(curve_id);
      auto it = lf.segment_instance.find({ci, l->base_segment, h});
      if (it == lf.segment_instance.end()) throw InternalError("lambda mark instance missing");
      auto [li, wrap] = it->second;
      const LiftedCurveData& lc = lf.lifts[ci][li];
      LambdaSpec lifted_lambda;
      lifted_lambda.curve = lc.id;
      lifted_lambda.base_segment =
          lf.lifted_locator({curve_id, l->base_segment, Side::kLeft}, h).segment;
      int u = 1;
      for (const auto& [arc, sign] : l->word) {
        int ai = lf.bi.arc_index.at(arc);
        const Permutation& sg = lf.sigma(arc);
        int crossed_left = sign > 0 ? sg(u) : u;
        if (lf.kept_left_sheet.count(ai) && lf.kept_left_sheet.at(ai) == crossed_left) {
          lifted_lambda.word.push_back({lf.lifted_arc_id(ai), sign});
        }
        u = sign > 0 ? sg(u) : inverse(sg)(u);
      }
      lifted.lambdas.push_back(std::move(lifted_lambda));
    }
  }

  // ---- Postconditions -----------------------------------------------------

  if (lifted.crossings.size() != d.crossings.size() * static_cast<size_t>(n)) {
    throw InternalError("lifted crossing count is not n times the base count");
  }
  // The lifted diagram graph can come out disconnected within a component for
  // degenerate cut systems; that is a model limitation, not a bug.
  try {
    faces(lifted);
  } catch (const UnsupportedDiagramError& e) {
    throw MonodromyError(std::string("lift is not representable: ") + e.what());
  }
  ValidationReport lr = validate(lifted);
  if (!lr.ok) {
    std::string why;
    for (const auto& c : lr.checks) {
      if (c.status == CheckStatus::kFail) {
        why = c.name + ": " + c.message;
        break;
      }
    }
    throw InternalError("lifted diagram failed validation: " + why);
  }
  auto base_triples = triple_orbits(d);
  auto lifted_triples = triple_orbits(lifted);
  if (lifted_triples.size() != base_triples.size() * static_cast<size_t>(n)) {
    throw InternalError("lifted triple point count is not n times the base count");
  }
  // Traced Euler data must match the Riemann-Hurwitz bookkeeping above
  // (validate already compared tracing against the declared genera).
  for (const auto& e : euler_genus(lifted)) {
    if (e.chi != lifted_comp_chi.at(e.component)) {
      throw InternalError("lifted component " + e.component + " traced chi " +
                          std::to_string(e.chi) + " but covering bookkeeping expected " +
                          std::to_string(lifted_comp_chi.at(e.component)));
    }
  }

  // Face provenance, in the canonical face order of the lifted diagram.
  std::vector<Face> base_faces = faces(d);
  std::vector<Face> lifted_faces = faces(lifted);
  for (const auto& f : lifted_faces) {
    const FaceCorner& corner = f.corners.front();
    int ci = -1, li = -1;
    for (int i = 0; i < static_cast<int>(d.curves.size()) && ci < 0; ++i) {
      for (int j = 0; j < static_cast<int>(lf.lifts[i].size()); ++j) {
        if (lf.lifts[i][j].id == corner.curve) {
          ci = i;
          li = j;
          break;
        }
      }
    }
    const LiftedCurveData& lc = lf.lifts[ci][li];
    int base_segment = 0;
    int sheet = lc.start_sheet;
    if (!lc.events.empty()) {
      int walk = lc.event_walk_pos[corner.segment];
      base_segment = walk % std::max(1, lf.bi.events_of(ci));
      sheet = lc.segment_sheet[corner.segment];
    }
    int bf = face_of(base_faces, {d.curves[ci].id, base_segment, corner.side});
    out.provenance.faces.push_back({bf, sheet});
  }

  return out;
}

LiftResult cyclic_cover(const Diagram& d, int n) {
  if (n < 1) throw ValidationFailure("cyclic cover needs n >= 1");
  if (!is_diametral(d)) {
    throw ValidationFailure("cyclic_cover needs a diametral diagram (2 marked points, one sphere)");
  }
  for (const auto& p : d.pairing) {
    if (!d.find_lambda(p.curve_a) || !d.find_lambda(p.curve_b)) {
      throw ValidationFailure("cyclic_cover needs lambda declarations for every curve");
    }
  }
  std::vector<std::string> points;
  for (const auto& p : d.marked_points) points.push_back(p.id);
  std::sort(points.begin(), points.end());

  MonodromySpec spec;
  spec.sheets = n;
  std::vector<int> full(n);
  for (int i = 0; i < n; ++i) full[i] = i + 1;
  Permutation cyc = Permutation::from_cycles(n, {full});
  spec.sigma.emplace(points[0], cyc);
  spec.sigma.emplace(points[1], inverse(cyc));
  spec.departure_order = points;
  return branched_cover(d, spec);
}

std::string ProvenanceMap::text() const {
  std::ostringstream out;
  for (const auto& [id, e] : curves) {
    out << id << " <- " << e.base << " sheet " << e.sheet << "\n";
  }
  for (const auto& [id, e] : crossings) {
    out << id << " <- " << e.base << " sheet " << e.sheet << "\n";
  }
  for (const auto& [id, e] : marked_points) {
    out << id << " <- " << e.first << " sheets";
    for (int u : e.second) out << " " << u;
    out << "\n";
  }
  for (const auto& [id, e] : cut_arcs) {
    out << id << " <- " << e.base << " sheet " << e.sheet << "\n";
  }
  for (size_t i = 0; i < faces.size(); ++i) {
    out << "face." << i << " <- face." << faces[i].first << " sheet " << faces[i].second << "\n";
  }
  return out.str();
}

}  // namespace dehnlift
