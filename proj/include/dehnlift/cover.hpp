#pragma once

#include <map>
#include <string>
#include <vector>

#include "dehnlift/diagram.hpp"
#include "dehnlift/jdformat.hpp"
#include "dehnlift/perm.hpp"

namespace dehnlift {

// Branched-cover construction: validate a monodromy against a diagram, build
// the n-sheeted cover of the domain branched over the marked points, lift the
// diagram, and compute the sistering of lifted curves.
//
// Sheet conventions, fixed here and relied on throughout:
//  * Sheets of the cover are labelled 1..n by cutting the domain along the
//    cut-arc star; sheet labels are constant on the complement of the arcs.
//  * A path crossing cut arc A_i from its right side to its left side has its
//    sheet mapped by sigma_i; left to right by sigma_i^-1. A curve's cut
//    event with sign s therefore applies sigma_i^s.
//  * The sphere relation is read along a counterclockwise walk around the
//    basepoint: crossing the arcs in departure order composes (right factor
//    first) to the identity.
//  * Transport along a curve or lambda word multiplies on the left in
//    traversal order: after events e1..ek the sheet is
//    sigma(ek)^s .. sigma(e1)^s (start).

// MonodromySpec is the MonodromyDocument bound to a diagram.
using MonodromySpec = MonodromyDocument;

struct ProvenanceEntry {
  std::string base;  // id of the base cell
  int sheet = 0;     // representative sheet (start sheet for curves)
};

struct ProvenanceMap {
  std::map<std::string, ProvenanceEntry> curves;
  std::map<std::string, ProvenanceEntry> crossings;
  // Lifted marked point -> (base point, sheets of its sigma-cycle).
  std::map<std::string, std::pair<std::string, std::vector<int>>> marked_points;
  std::map<std::string, ProvenanceEntry> cut_arcs;
  // Lifted face index (canonical order of diagram::faces on the lifted
  // diagram) -> (base face index, representative sheet).
  std::vector<std::pair<int, int>> faces;

  std::string text() const;  // sidecar form, one line per lifted cell
};

struct LiftResult {
  Diagram lifted;
  ProvenanceMap provenance;
  // Kept for downstream consumers (fan rendering, tests).
  Diagram base;
  MonodromySpec spec;

  // Pointwise sister map on lifted curve crossing events, recorded during
  // construction: (curve id, crossing index) -> (sister id, crossing index).
  std::map<std::pair<std::string, int>, std::pair<std::string, int>> sister_events;
};

// Report-based monodromy validation: sphere relation, coverage of every
// marked point, transitivity and locally-cyclic status, realizability of the
// cut system (refined complex Euler check), sister-monodromy consistency.
ValidationReport validate_monodromy(const Diagram& d, const MonodromySpec& m);

// Product of sigma(arc)^sign over the curve's cut events starting from its
// lambda base mark, in traversal order.
Permutation curve_monodromy(const Diagram& d, const MonodromySpec& m, const std::string& curve);

// perm(lambda_tau)^-1 composed with perm(lambda_alpha): the permutation of
// the loop running out along lambda_alpha and back along lambda_tau.
Permutation dual_loop_permutation(const Diagram& d, const MonodromySpec& m,
                                  const std::string& curve_of_pair);

// True iff every sigma_i is a single n-cycle.
bool locally_cyclic(const Diagram& d, const MonodromySpec& m);

// n * chi(S) - sum_i (n - #cycles(sigma_i)).
int riemann_hurwitz_expected(const Diagram& d, const MonodromySpec& m);

// The full construction. Throws ValidationFailure / MonodromyError on bad
// input, InternalError when a postcondition of the construction fails.
LiftResult branched_cover(const Diagram& d, const MonodromySpec& m);

// Cyclic convenience wrapper: sigma_P1 = (1 2 .. n), sigma_P2 its inverse,
// departure order P1 P2. Requires a diametral diagram.
LiftResult cyclic_cover(const Diagram& d, int n);

}  // namespace dehnlift
