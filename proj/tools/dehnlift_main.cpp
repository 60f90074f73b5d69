// Command line front door: parse -> validate -> lift -> render, with stable
// exit codes (0 ok, 1 validation failure, 2 parse error, 3 monodromy
// inconsistency, 4 I/O error).

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dehnlift/cover.hpp"
#include "dehnlift/diagram.hpp"
#include "dehnlift/errors.hpp"
#include "dehnlift/jdformat.hpp"
#include "dehnlift/render.hpp"
#include "json.hpp"

namespace {

using dehnlift::CheckStatus;
using nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kParseError = 2;
constexpr int kMonodromyError = 3;
constexpr int kIoError = 4;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::ios_base::failure("write to " + path + " failed");
}

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass: return "pass";
    case CheckStatus::kWarn: return "warn";
    case CheckStatus::kFail: return "fail";
  }
  return "?";
}

ordered_json report_json(const dehnlift::ValidationReport& report) {
  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks) {
    checks.push_back(ordered_json{{"check", c.name},
                                  {"status", status_name(c.status)},
                                  {"location", c.location},
                                  {"message", c.message}});
  }
  return checks;
}

ordered_json stats_json(const dehnlift::DiagramStats& s) {
  ordered_json genera = ordered_json::array();
  for (int g : s.component_genera) genera.push_back(g);
  ordered_json self = ordered_json::object();
  for (const auto& [curve, k] : s.self_intersections) self[curve] = k;
  return ordered_json{{"curves", s.curve_count},
                      {"crossings", s.crossing_count},
                      {"triple_points", s.triple_point_count},
                      {"faces", s.face_count},
                      {"components", s.component_count},
                      {"genera", genera},
                      {"marked_points", s.marked_point_count},
                      {"self_intersections", self},
                      {"diametral", s.diametral}};
}

void print_report(const dehnlift::ValidationReport& report) {
  for (const auto& c : report.checks) {
    std::cout << status_name(c.status) << "  " << c.name;
    if (!c.location.empty()) std::cout << " [" << c.location << "]";
    if (!c.message.empty()) std::cout << ": " << c.message;
    std::cout << "\n";
  }
  std::cout << (report.ok ? "VALID" : "INVALID") << "\n";
}

void print_stats(const dehnlift::DiagramStats& s) {
  std::cout << "curves: " << s.curve_count << "\n"
            << "crossings: " << s.crossing_count << "\n"
            << "triple points: " << s.triple_point_count << "\n"
            << "faces: " << s.face_count << "\n"
            << "components: " << s.component_count << " (genera:";
  for (int g : s.component_genera) std::cout << " " << g;
  std::cout << ")\n"
            << "marked points: " << s.marked_point_count << "\n";
  for (const auto& [curve, k] : s.self_intersections) {
    std::cout << "self-intersections of " << curve << ": " << k << "\n";
  }
  std::cout << "diametral: " << (s.diametral ? "yes" : "no") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Johansson diagram toolkit: validate, lift through branched coverings, render"};
  app.require_subcommand(1);
  bool json_out = false;
  app.add_flag("--json", json_out, "machine-readable report on stdout");

  std::string in_path, mono_path, out_path = "-", prov_path, layout_name = "tutte";
  std::string fixture_name;
  int cyclic_n = 2;
  int render_n = 0;

  auto* cmd_validate = app.add_subcommand("validate", "run all diagram checks");
  cmd_validate->add_option("file", in_path, "input .jd ('-' for stdin)")->required();

  auto* cmd_stats = app.add_subcommand("stats", "print diagram statistics");
  cmd_stats->add_option("file", in_path, "input .jd ('-' for stdin)")->required();

  auto* cmd_lift = app.add_subcommand("lift", "lift through a branched covering");
  cmd_lift->add_option("file", in_path, "input .jd ('-' for stdin)")->required();
  cmd_lift->add_option("--monodromy", mono_path, "monodromy .mono file")->required();
  cmd_lift->add_option("-o,--output", out_path, "output .jd ('-' for stdout)");
  cmd_lift->add_option("--provenance", prov_path, "provenance sidecar output");

  auto* cmd_cyclic = app.add_subcommand("cyclic-lift", "lift through the n-fold cyclic covering");
  cmd_cyclic->add_option("file", in_path, "input .jd ('-' for stdin)")->required();
  cmd_cyclic->add_option("-n,--sheets", cyclic_n, "number of sheets")->required();
  cmd_cyclic->add_option("-o,--output", out_path, "output .jd ('-' for stdout)");
  cmd_cyclic->add_option("--provenance", prov_path, "provenance sidecar output");

  auto* cmd_render = app.add_subcommand("render", "emit an SVG drawing");
  cmd_render->add_option("file", in_path, "input .jd ('-' for stdin)")->required();
  cmd_render->add_option("-o,--output", out_path, "output .svg ('-' for stdout)");
  cmd_render->add_option("--layout", layout_name, "tutte|fan (fan also needs -n)")
      ->check(CLI::IsMember({"tutte", "fan"}));
  cmd_render->add_option("-n,--sheets", render_n, "cyclic sheets for the fan layout");

  auto* cmd_fixture = app.add_subcommand("fixture", "print a built-in diagram");
  cmd_fixture->add_option("name", fixture_name, "fixture name")->required();

  for (auto* sub : {cmd_validate, cmd_stats, cmd_lift, cmd_cyclic}) {
    sub->add_flag("--json", json_out, "machine-readable report on stdout");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kParseError;
  }

  try {
    if (cmd_fixture->parsed()) {
      try {
        std::cout << dehnlift::builtin_fixture(fixture_name).text;
        return kOk;
      } catch (const dehnlift::ValidationFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationFailure;
      }
    }

    dehnlift::Diagram diagram;
    try {
      diagram = dehnlift::parse_diagram(read_input(in_path));
    } catch (const dehnlift::ParseError& e) {
      std::cerr << "parse error: " << e.what() << "\n";
      return kParseError;
    }

    if (cmd_validate->parsed()) {
      dehnlift::ValidationReport report = dehnlift::validate(diagram);
      if (json_out) {
        ordered_json j{{"checks", report_json(report)}, {"ok", report.ok}};
        if (report.ok) j["stats"] = stats_json(dehnlift::stats(diagram));
        std::cout << j.dump(2) << "\n";
      } else {
        print_report(report);
      }
      return report.ok ? kOk : kValidationFailure;
    }

    if (cmd_stats->parsed()) {
      dehnlift::ValidationReport report = dehnlift::validate(diagram);
      if (!report.ok) {
        if (json_out) {
          std::cout << ordered_json{{"checks", report_json(report)}, {"ok", false}}.dump(2)
                    << "\n";
        } else {
          print_report(report);
        }
        return kValidationFailure;
      }
      dehnlift::DiagramStats s = dehnlift::stats(diagram);
      if (json_out) {
        std::cout << ordered_json{{"stats", stats_json(s)}}.dump(2) << "\n";
      } else {
        print_stats(s);
      }
      return kOk;
    }

    if (cmd_lift->parsed() || cmd_cyclic->parsed()) {
      dehnlift::LiftResult lift;
      if (cmd_lift->parsed()) {
        dehnlift::MonodromySpec spec;
        try {
          spec = dehnlift::parse_monodromy(read_input(mono_path));
        } catch (const dehnlift::ParseError& e) {
          std::cerr << "parse error in monodromy: " << e.what() << "\n";
          return kParseError;
        }
        lift = dehnlift::branched_cover(diagram, spec);
      } else {
        lift = dehnlift::cyclic_cover(diagram, cyclic_n);
      }
      write_output(out_path, dehnlift::serialize_diagram(lift.lifted));
      if (!prov_path.empty()) write_output(prov_path, lift.provenance.text());
      if (json_out && out_path != "-") {
        std::cout << ordered_json{{"stats", stats_json(dehnlift::stats(lift.lifted))}}.dump(2)
                  << "\n";
      }
      return kOk;
    }

    if (cmd_render->parsed()) {
      std::string svg;
      if (layout_name == "fan") {
        if (render_n < 1) {
          std::cerr << "error: --layout fan needs -n <sheets>\n";
          return kValidationFailure;
        }
        dehnlift::LiftResult lift = dehnlift::cyclic_cover(diagram, render_n);
        svg = dehnlift::render_svg(dehnlift::fan_layout(lift), lift.lifted);
      } else {
        svg = dehnlift::render_diagram_svg(diagram);
      }
      write_output(out_path, svg);
      return kOk;
    }
  } catch (const dehnlift::MonodromyError& e) {
    std::cerr << "monodromy error: " << e.what() << "\n";
    return kMonodromyError;
  } catch (const dehnlift::ValidationFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const dehnlift::UnsupportedDiagramError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const dehnlift::InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kValidationFailure;
  }
  return kOk;
}
