#include <string>

#include "dehnlift/errors.hpp"
#include "dehnlift/jdformat.hpp"

namespace dehnlift {

namespace {

// Johansson's diagram of the sphere splitting the unknot: two sister curves
// on S^2 with 6 crossings and 2 triple points ({x1,x4,x5} and {x2,x3,x6}),
// 8 faces, marked points P1, P2 in distinct faces. Each curve crosses the
// cut system with total winding -1 around P1, so every cyclic cover lifts
// each curve to a single curve. Both lambda words are empty (the dual loop
// of the pair acts trivially), with base marks at sister-aligned gaps.
constexpr const char* kJohanssonUnknot = R"(# jd v1
# Johansson's diagram of the sphere splitting the unknot.
surface S genus 0
curve a on S : Xx1 Xx1 CA2+ Xx2 Xx3 Xx4 Xx2
curve b on S : Xx3 Xx4 Xx5 CA2+ Xx6 Xx6 Xx5
pair a ~ b offset 1 dir +1
cross x1 sign -1
cross x2 sign -1
cross x3 sign +1
cross x4 sign -1
cross x5 sign -1
cross x6 sign -1
point P1 at a@2 left
point P2 at b@2 right
basepoint at a@1 left
cutarc A1 to P1 :
cutarc A2 to P2 : a@2+ b@3+
lambda a base @0 word -
lambda b base @1 word -
)";

// Two disjoint embedded sister circles on two spheres: the smallest diagram
// with no crossings (hence no triple points).
constexpr const char* kSisterCircles = R"(# jd v1
# Two disjoint embedded sister circles, one sphere each.
surface S1 genus 0
surface S2 genus 0
curve a on S1 :
curve b on S2 :
pair a ~ b offset 0 dir +1
lambda a base @0 word -
lambda b base @0 word -
)";

}  // namespace

std::vector<std::string> builtin_fixture_names() {
  return {"johansson-unknot", "sister-circles"};
}

JdDocument builtin_fixture(const std::string& name) {
  const char* text = nullptr;
  if (name == "johansson-unknot") {
    text = kJohanssonUnknot;
  } else if (name == "sister-circles") {
    text = kSisterCircles;
  } else {
    std::string available;
    for (const auto& n : builtin_fixture_names()) {
      if (!available.empty()) available += ", ";
      available += n;
    }
    throw ValidationFailure("unknown fixture '" + name + "' (available: " + available + ")");
  }
  JdDocument doc;
  doc.text = text;
  doc.diagram = parse_diagram(doc.text);
  return doc;
}

}  // namespace dehnlift
