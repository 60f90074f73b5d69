#pragma once

#include <map>
#include <string>
#include <vector>

#include "dehnlift/diagram.hpp"
#include "dehnlift/perm.hpp"

namespace dehnlift {

// Line-oriented JD text format, one statement per fact:
//
//   # jd v1
//   surface <id> genus <g>
//   curve <id> on <surface-id> : <ev>...     # ev = X<crossing> | C<arc>+ | C<arc>-
//   pair <id> ~ <id> offset <int> dir <+1|-1>
//   cross <id> sign <+1|-1>
//   point <id> at <curve>@<seg> <left|right>
//   basepoint at <curve>@<seg> <left|right>
//   cutarc <id> to <point> : <curve>@<event-index><+|-> ...
//   lambda <curve> base @<seg> word <C-entries or "-">
//
// `#` starts a comment. Ids are [A-Za-z0-9_.]+. Segment and event indices are
// 0-based positions in the curve's full event word.
struct JdDocument {
  std::string text;  // original or canonical source
  Diagram diagram;
};

struct MonodromyDocument {
  int sheets = 0;
  std::map<std::string, Permutation> sigma;  // marked point id -> permutation
  std::vector<std::string> departure_order;  // marked point ids, basepoint departure order
};

// Structural parse; deep validation is diagram::validate, invoked separately.
// Throws ParseError with a 1-based line number on syntax errors, unresolved
// references and duplicate ids.
Diagram parse_diagram(const std::string& text);

// Canonical form: statements sorted (surfaces, curves by id, pairs, crossings
// by id, points, basepoint, cutarcs, lambdas); parse(serialize(d)) == d.
// Throws ValidationFailure on structurally empty diagrams.
std::string serialize_diagram(const Diagram& d);

MonodromyDocument parse_monodromy(const std::string& text);
std::string serialize_monodromy(const MonodromyDocument& m);

// Cycle-notation permutation parser, e.g. "(1 2 3)(4)" or "id".
Permutation parse_permutation(const std::string& text, int n);

// Built-in example diagrams; throws ValidationFailure for unknown names,
// listing the available ones.
JdDocument builtin_fixture(const std::string& name);
std::vector<std::string> builtin_fixture_names();

// Renames every id to a canonical scheme (components s0.., curves c0..,
// crossings x0.., points p0.., arcs t0..) in lexicographic order of the
// current ids. Used to compare diagrams up to renaming.
Diagram normalize_ids(const Diagram& d);

}  // namespace dehnlift
