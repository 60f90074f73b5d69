#include "dehnlift/jdformat.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "dehnlift/errors.hpp"

namespace dehnlift {

namespace {

bool is_id_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

bool valid_id(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!is_id_char(c)) return false;
  }
  return true;
}

struct LineTokens {
  int line = 0;
  std::vector<std::string> tokens;

  const std::string& at(size_t i, const char* what) const {
    if (i >= tokens.size()) {
      throw ParseError(line, std::string("expected ") + what + ", found end of line");
    }
    return tokens[i];
  }
  void expect(size_t i, const std::string& literal) const {
    if (at(i, literal.c_str()) != literal) {
      throw ParseError(line, "expected '" + literal + "', found '" + tokens[i] + "'");
    }
  }
  void expect_end(size_t i) const {
    if (i < tokens.size()) {
      throw ParseError(line, "unexpected trailing token '" + tokens[i] + "'");
    }
  }
};

int parse_int(const LineTokens& t, size_t i, const char* what) {
  const std::string& s = t.at(i, what);
  try {
    size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(t.line, std::string("expected integer ") + what + ", found '" + s + "'");
  }
}

int parse_sign(const LineTokens& t, size_t i) {
  const std::string& s = t.at(i, "sign");
  if (s == "+1" || s == "+") return +1;
  if (s == "-1" || s == "-") return -1;
  throw ParseError(t.line, "expected sign +1 or -1, found '" + s + "'");
}

std::string parse_id(const LineTokens& t, size_t i, const char* what) {
  const std::string& s = t.at(i, what);
  if (!valid_id(s)) {
    throw ParseError(t.line, std::string("invalid ") + what + " '" + s + "'");
  }
  return s;
}

Side parse_side(const LineTokens& t, size_t i) {
  const std::string& s = t.at(i, "side");
  if (s == "left") return Side::kLeft;
  if (s == "right") return Side::kRight;
  throw ParseError(t.line, "expected 'left' or 'right', found '" + s + "'");
}

// <curve>@<number> with an optional trailing sign, e.g. "a@4" or "a@4+".
struct AtRef {
  std::string curve;
  int index = 0;
  int sign = 0;  // 0 when absent
};

AtRef parse_at_ref(const LineTokens& t, size_t i, bool want_sign, const char* what) {
  std::string s = t.at(i, what);
  AtRef ref;
  if (want_sign) {
    if (s.empty() || (s.back() != '+' && s.back() != '-')) {
      throw ParseError(t.line, std::string(what) + " '" + s + "' must end in + or -");
    }
    ref.sign = s.back() == '+' ? +1 : -1;
    s.pop_back();
  }
  auto at = s.find('@');
  if (at == std::string::npos || at == 0 || at + 1 >= s.size()) {
    throw ParseError(t.line, std::string(what) + " '" + s + "' is not of the form curve@index");
  }
  ref.curve = s.substr(0, at);
  if (!valid_id(ref.curve)) throw ParseError(t.line, "invalid curve id '" + ref.curve + "'");
  std::string num = s.substr(at + 1);
  for (char c : num) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw ParseError(t.line, std::string(what) + " index '" + num + "' is not a number");
    }
  }
  ref.index = std::stoi(num);
  return ref;
}

std::vector<LineTokens> tokenize(const std::string& text) {
  std::vector<LineTokens> lines;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    LineTokens lt;
    lt.line = number;
    std::istringstream ls(raw);
    std::string tok;
    while (ls >> tok) lt.tokens.push_back(tok);
    if (!lt.tokens.empty()) lines.push_back(std::move(lt));
  }
  return lines;
}

}  // namespace

Diagram parse_diagram(const std::string& text) {
  Diagram d;
  std::set<std::string> surface_ids, curve_ids, cross_ids, point_ids, arc_ids, lambda_curves;
  bool saw_basepoint = false;

  for (const LineTokens& t : tokenize(text)) {
    const std::string& head = t.at(0, "statement");
    if (head == "surface") {
      std::string id = parse_id(t, 1, "surface id");
      t.expect(2, "genus");
      int g = parse_int(t, 3, "genus");
      t.expect_end(4);
      if (!surface_ids.insert(id).second) throw ParseError(t.line, "duplicate surface id " + id);
      d.components.push_back({id, g});
    } else if (head == "curve") {
      std::string id = parse_id(t, 1, "curve id");
      t.expect(2, "on");
      std::string surface = parse_id(t, 3, "surface id");
      t.expect(4, ":");
      Curve c{id, surface, {}};
      for (size_t i = 5; i < t.tokens.size(); ++i) {
        const std::string& ev = t.tokens[i];
        if (ev.size() >= 2 && ev[0] == 'X') {
          std::string ref = ev.substr(1);
          if (!valid_id(ref)) throw ParseError(t.line, "invalid crossing event '" + ev + "'");
          c.events.push_back({Event::Kind::kCrossing, ref, 0});
        } else if (ev.size() >= 3 && ev[0] == 'C' && (ev.back() == '+' || ev.back() == '-')) {
          std::string ref = ev.substr(1, ev.size() - 2);
          if (!valid_id(ref)) throw ParseError(t.line, "invalid cut event '" + ev + "'");
          c.events.push_back({Event::Kind::kCut, ref, ev.back() == '+' ? +1 : -1});
        } else {
          throw ParseError(t.line, "bad event '" + ev + "' (want X<crossing> or C<arc>+/-)");
        }
      }
      if (!curve_ids.insert(id).second) throw ParseError(t.line, "duplicate curve id " + id);
      d.curves.push_back(std::move(c));
    } else if (head == "pair") {
      std::string a = parse_id(t, 1, "curve id");
      t.expect(2, "~");
      std::string b = parse_id(t, 3, "curve id");
      t.expect(4, "offset");
      int offset = parse_int(t, 5, "offset");
      t.expect(6, "dir");
      int dir = parse_sign(t, 7);
      t.expect_end(8);
      d.pairing.push_back({a, b, offset, dir});
    } else if (head == "cross") {
      std::string id = parse_id(t, 1, "crossing id");
      t.expect(2, "sign");
      int sign = parse_sign(t, 3);
      t.expect_end(4);
      if (!cross_ids.insert(id).second) throw ParseError(t.line, "duplicate crossing id " + id);
      d.crossings[id] = Crossing{id, sign};
    } else if (head == "point") {
      std::string id = parse_id(t, 1, "point id");
      t.expect(2, "at");
      AtRef at = parse_at_ref(t, 3, false, "point locator");
      Side side = parse_side(t, 4);
      t.expect_end(5);
      if (!point_ids.insert(id).second) throw ParseError(t.line, "duplicate point id " + id);
      d.marked_points.push_back({id, {at.curve, at.index, side}});
    } else if (head == "basepoint") {
      t.expect(1, "at");
      AtRef at = parse_at_ref(t, 2, false, "basepoint locator");
      Side side = parse_side(t, 3);
      t.expect_end(4);
      if (saw_basepoint) throw ParseError(t.line, "duplicate basepoint");
      saw_basepoint = true;
      d.basepoint = FaceLocator{at.curve, at.index, side};
    } else if (head == "cutarc") {
      std::string id = parse_id(t, 1, "cut arc id");
      t.expect(2, "to");
      std::string target = parse_id(t, 3, "point id");
      t.expect(4, ":");
      CutArc arc{id, target, {}};
      for (size_t i = 5; i < t.tokens.size(); ++i) {
        AtRef at = parse_at_ref(t, i, true, "cut arc entry");
        arc.word.push_back({at.curve, at.index, at.sign});
      }
      if (!arc_ids.insert(id).second) throw ParseError(t.line, "duplicate cut arc id " + id);
      d.cut_arcs.push_back(std::move(arc));
    } else if (head == "lambda") {
      std::string curve = parse_id(t, 1, "curve id");
      t.expect(2, "base");
      const std::string& mark = t.at(3, "base mark @<seg>");
      if (mark.size() < 2 || mark[0] != '@') {
        throw ParseError(t.line, "expected base mark @<seg>, found '" + mark + "'");
      }
      LambdaSpec l{curve, 0, {}};
      try {
        l.base_segment = std::stoi(mark.substr(1));
      } catch (const std::exception&) {
        throw ParseError(t.line, "bad base mark '" + mark + "'");
      }
      t.expect(4, "word");
      if (t.at(5, "lambda word") == "-") {
        t.expect_end(6);
      } else {
        for (size_t i = 5; i < t.tokens.size(); ++i) {
          const std::string& ev = t.tokens[i];
          if (ev.size() < 3 || ev[0] != 'C' || (ev.back() != '+' && ev.back() != '-')) {
            throw ParseError(t.line, "bad lambda entry '" + ev + "' (want C<arc>+/-)");
          }
          std::string ref = ev.substr(1, ev.size() - 2);
          if (!valid_id(ref)) throw ParseError(t.line, "invalid arc id in '" + ev + "'");
          l.word.push_back({ref, ev.back() == '+' ? +1 : -1});
        }
      }
      if (!lambda_curves.insert(curve).second) {
        throw ParseError(t.line, "duplicate lambda for curve " + curve);
      }
      d.lambdas.push_back(std::move(l));
    } else {
      throw ParseError(t.line, "unknown statement '" + head + "'");
    }
  }

  // Reference resolution (structural layer only; invariants live in validate).
  for (const auto& c : d.curves) {
    if (!surface_ids.count(c.component)) {
      throw ParseError(0, "curve " + c.id + " references unknown surface " + c.component);
    }
    for (const auto& e : c.events) {
      if (e.kind == Event::Kind::kCrossing && !cross_ids.count(e.ref)) {
        throw ParseError(0, "curve " + c.id + " references unknown crossing " + e.ref);
      }
      if (e.kind == Event::Kind::kCut && !arc_ids.count(e.ref)) {
        throw ParseError(0, "curve " + c.id + " references unknown cut arc " + e.ref);
      }
    }
  }
  for (const auto& p : d.pairing) {
    for (const auto& id : {p.curve_a, p.curve_b}) {
      if (!curve_ids.count(id)) throw ParseError(0, "pair references unknown curve " + id);
    }
  }
  for (const auto& p : d.marked_points) {
    if (!curve_ids.count(p.at.curve)) {
      throw ParseError(0, "point " + p.id + " references unknown curve " + p.at.curve);
    }
  }
  if (d.basepoint && !curve_ids.count(d.basepoint->curve)) {
    throw ParseError(0, "basepoint references unknown curve " + d.basepoint->curve);
  }
  for (const auto& a : d.cut_arcs) {
    if (!point_ids.count(a.target)) {
      throw ParseError(0, "cut arc " + a.id + " targets unknown point " + a.target);
    }
    for (const auto& w : a.word) {
      if (!curve_ids.count(w.curve)) {
        throw ParseError(0, "cut arc " + a.id + " references unknown curve " + w.curve);
      }
    }
  }
  for (const auto& l : d.lambdas) {
    if (!curve_ids.count(l.curve)) throw ParseError(0, "lambda references unknown curve " + l.curve);
    for (const auto& [arc, sign] : l.word) {
      if (!arc_ids.count(arc)) throw ParseError(0, "lambda references unknown cut arc " + arc);
    }
  }
  return d;
}

namespace {

std::string event_token(const Event& e) {
  if (e.kind == Event::Kind::kCrossing) return "X" + e.ref;
  return "C" + e.ref + (e.sign > 0 ? "+" : "-");
}

std::string locator_token(const FaceLocator& at) {
  return at.curve + "@" + std::to_string(at.segment) + " " + to_string(at.side);
}

// Numeric-aware id order so x2 sorts before x10 in canonical output.
bool natural_less(const std::string& a, const std::string& b) {
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) &&
        std::isdigit(static_cast<unsigned char>(b[j]))) {
      size_t i2 = i, j2 = j;
      while (i2 < a.size() && std::isdigit(static_cast<unsigned char>(a[i2]))) ++i2;
      while (j2 < b.size() && std::isdigit(static_cast<unsigned char>(b[j2]))) ++j2;
      long va = std::stol(a.substr(i, i2 - i));
      long vb = std::stol(b.substr(j, j2 - j));
      if (va != vb) return va < vb;
      i = i2;
      j = j2;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

}  // namespace

std::string serialize_diagram(const Diagram& d) {
  if (d.curves.empty() || d.components.empty()) {
    throw ValidationFailure("refusing to serialize an empty diagram");
  }
  std::ostringstream out;
  out << "# jd v1\n";

  std::vector<DomainComponent> comps = d.components;
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return natural_less(a.id, b.id); });
  for (const auto& s : comps) out << "surface " << s.id << " genus " << s.declared_genus << "\n";

  std::vector<Curve> curves = d.curves;
  std::sort(curves.begin(), curves.end(),
            [](const auto& a, const auto& b) { return natural_less(a.id, b.id); });
  for (const auto& c : curves) {
    out << "curve " << c.id << " on " << c.component << " :";
    for (const auto& e : c.events) out << " " << event_token(e);
    out << "\n";
  }

  std::vector<SisterPairing> pairs = d.pairing;
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return natural_less(a.curve_a, b.curve_a); });
  for (const auto& p : pairs) {
    out << "pair " << p.curve_a << " ~ " << p.curve_b << " offset " << p.offset << " dir "
        << (p.direction > 0 ? "+1" : "-1") << "\n";
  }

  std::vector<std::string> xids;
  for (const auto& [id, x] : d.crossings) xids.push_back(id);
  std::sort(xids.begin(), xids.end(), natural_less);
  for (const auto& id : xids) {
    out << "cross " << id << " sign " << (d.crossings.at(id).handedness > 0 ? "+1" : "-1") << "\n";
  }

  std::vector<MarkedPoint> points = d.marked_points;
  std::sort(points.begin(), points.end(),
            [](const auto& a, const auto& b) { return natural_less(a.id, b.id); });
  for (const auto& p : points) out << "point " << p.id << " at " << locator_token(p.at) << "\n";

  if (d.basepoint) out << "basepoint at " << locator_token(*d.basepoint) << "\n";

  std::vector<CutArc> arcs = d.cut_arcs;
  std::sort(arcs.begin(), arcs.end(),
            [](const auto& a, const auto& b) { return natural_less(a.id, b.id); });
  for (const auto& a : arcs) {
    out << "cutarc " << a.id << " to " << a.target << " :";
    for (const auto& w : a.word) {
      out << " " << w.curve << "@" << w.segment << (w.sign > 0 ? "+" : "-");
    }
    out << "\n";
  }

  std::vector<LambdaSpec> lambdas = d.lambdas;
  std::sort(lambdas.begin(), lambdas.end(),
            [](const auto& a, const auto& b) { return natural_less(a.curve, b.curve); });
  for (const auto& l : lambdas) {
    out << "lambda " << l.curve << " base @" << l.base_segment << " word";
    if (l.word.empty()) {
      out << " -";
    } else {
      for (const auto& [arc, sign] : l.word) out << " C" << arc << (sign > 0 ? "+" : "-");
    }
    out << "\n";
  }
  return out.str();
}

Permutation parse_permutation(const std::string& text, int n) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c)) || !s.empty()) s += c;
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (s == "id") return Permutation::identity(n);

  std::vector<std::vector<int>> cycles;
  size_t i = 0;
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    if (s[i] != '(') throw ParseError(0, "bad permutation '" + text + "': expected '('");
    size_t close = s.find(')', i);
    if (close == std::string::npos) {
      throw ParseError(0, "bad permutation '" + text + "': unbalanced parenthesis");
    }
    std::istringstream body(s.substr(i + 1, close - i - 1));
    std::vector<int> cycle;
    std::string tok;
    while (body >> tok) {
      try {
        size_t used = 0;
        int v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        cycle.push_back(v);
      } catch (const std::exception&) {
        throw ParseError(0, "bad permutation label '" + tok + "'");
      }
    }
    if (cycle.empty()) throw ParseError(0, "empty cycle in permutation '" + text + "'");
    cycles.push_back(std::move(cycle));
    i = close + 1;
  }
  if (cycles.empty()) throw ParseError(0, "bad permutation '" + text + "'");
  try {
    return Permutation::from_cycles(n, cycles);
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, std::string("bad permutation '") + text + "': " + e.what());
  }
}

MonodromyDocument parse_monodromy(const std::string& text) {
  MonodromyDocument m;
  bool saw_sheets = false;
  bool saw_order = false;
  for (const LineTokens& t : tokenize(text)) {
    const std::string& head = t.at(0, "statement");
    if (head == "sheets") {
      if (saw_sheets) throw ParseError(t.line, "duplicate sheets statement");
      m.sheets = parse_int(t, 1, "sheet count");
      t.expect_end(2);
      if (m.sheets < 1) throw ParseError(t.line, "sheet count must be positive");
      saw_sheets = true;
    } else if (head == "sigma") {
      if (!saw_sheets) throw ParseError(t.line, "sigma before sheets statement");
      std::string point = parse_id(t, 1, "point id");
      t.expect(2, "=");
      std::string rest;
      for (size_t i = 3; i < t.tokens.size(); ++i) {
        if (i > 3) rest += ' ';
        rest += t.tokens[i];
      }
      if (rest.empty()) throw ParseError(t.line, "missing permutation");
      if (m.sigma.count(point)) throw ParseError(t.line, "duplicate sigma for " + point);
      try {
        m.sigma.emplace(point, parse_permutation(rest, m.sheets));
      } catch (const ParseError& e) {
        throw ParseError(t.line, e.what());
      }
    } else if (head == "order") {
      if (saw_order) throw ParseError(t.line, "duplicate order statement");
      for (size_t i = 1; i < t.tokens.size(); ++i) {
        m.departure_order.push_back(parse_id(t, i, "point id"));
      }
      if (m.departure_order.empty()) throw ParseError(t.line, "empty departure order");
      saw_order = true;
    } else {
      throw ParseError(t.line, "unknown statement '" + head + "'");
    }
  }
  if (!saw_sheets) throw ParseError(0, "missing sheets statement");
  if (!saw_order) throw ParseError(0, "missing order statement");
  std::set<std::string> ordered(m.departure_order.begin(), m.departure_order.end());
  if (ordered.size() != m.departure_order.size()) {
    throw ParseError(0, "departure order repeats a point");
  }
  for (const auto& [point, sigma] : m.sigma) {
    if (!ordered.count(point)) throw ParseError(0, "sigma for " + point + " missing from order");
  }
  for (const auto& point : m.departure_order) {
    if (!m.sigma.count(point)) throw ParseError(0, "order lists " + point + " without a sigma");
  }
  return m;
}

std::string serialize_monodromy(const MonodromyDocument& m) {
  std::ostringstream out;
  out << "sheets " << m.sheets << "\n";
  for (const auto& [point, sigma] : m.sigma) {
    out << "sigma " << point << " = " << sigma.to_string() << "\n";
  }
  out << "order";
  for (const auto& p : m.departure_order) out << " " << p;
  out << "\n";
  return out.str();
}

Diagram normalize_ids(const Diagram& d) {
  auto build_map = [](std::vector<std::string> ids, const std::string& prefix) {
    std::sort(ids.begin(), ids.end(), natural_less);
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::map<std::string, std::string> m;
    for (size_t i = 0; i < ids.size(); ++i) m[ids[i]] = prefix + std::to_string(i);
    return m;
  };

  std::vector<std::string> comp_ids, curve_ids, cross_ids, point_ids, arc_ids;
  for (const auto& s : d.components) comp_ids.push_back(s.id);
  for (const auto& c : d.curves) curve_ids.push_back(c.id);
  for (const auto& [id, x] : d.crossings) cross_ids.push_back(id);
  for (const auto& p : d.marked_points) point_ids.push_back(p.id);
  for (const auto& a : d.cut_arcs) arc_ids.push_back(a.id);
  auto comp_map = build_map(comp_ids, "s");
  auto curve_map = build_map(curve_ids, "c");
  auto cross_map = build_map(cross_ids, "x");
  auto point_map = build_map(point_ids, "p");
  auto arc_map = build_map(arc_ids, "t");

  Diagram out = d;
  for (auto& s : out.components) s.id = comp_map.at(s.id);
  for (auto& c : out.curves) {
    c.id = curve_map.at(c.id);
    c.component = comp_map.at(c.component);
    for (auto& e : c.events) {
      e.ref = e.kind == Event::Kind::kCrossing ? cross_map.at(e.ref) : arc_map.at(e.ref);
    }
  }
  for (auto& p : out.pairing) {
    p.curve_a = curve_map.at(p.curve_a);
    p.curve_b = curve_map.at(p.curve_b);
  }
  std::map<std::string, Crossing> crossings;
  for (const auto& [id, x] : d.crossings) {
    Crossing nx = x;
    nx.id = cross_map.at(id);
    crossings[nx.id] = nx;
  }
  out.crossings = std::move(crossings);
  for (auto& p : out.marked_points) {
    p.id = point_map.at(p.id);
    p.at.curve = curve_map.at(p.at.curve);
  }
  if (out.basepoint) out.basepoint->curve = curve_map.at(out.basepoint->curve);
  for (auto& a : out.cut_arcs) {
    a.id = arc_map.at(a.id);
    a.target = point_map.at(a.target);
    for (auto& w : a.word) w.curve = curve_map.at(w.curve);
  }
  for (auto& l : out.lambdas) {
    l.curve = curve_map.at(l.curve);
    for (auto& [arc, sign] : l.word) arc = arc_map.at(arc);
  }
  return out;
}

}  // namespace dehnlift
