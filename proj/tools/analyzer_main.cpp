// Command-line analyzer: `analyzer [flags] file.mpl` and
// `analyzer solve [--entail] file.slf`.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "shape/cfg/cfg.hpp"
#include "shape/engine/engine.hpp"
#include "shape/formula/ops.hpp"
#include "shape/frontend/frontend.hpp"
#include "shape/solver/solver.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kParseError = 2;
constexpr int kInternalError = 3;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  return static_cast<bool>(out);
}

std::string base_name(const std::string& path) {
  auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

void print_errors(const std::vector<shape::Property>& props) {
  for (auto p : props) std::cout << shape::to_string(p) << ": ERROR\n";
}

int run_solve(const std::string& path, bool entail) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "cannot read " << path << "\n";
    return kParseError;
  }
  try {
    if (entail) {
      auto e = shape::parse_entailment(*text);
      auto r = shape::check_entail(e.lhs, e.rhs);
      std::cout << (r.valid ? "valid" : "invalid") << "\n";
      if (r.counter_model) std::cout << shape::to_json_string(*r.counter_model) << "\n";
    } else {
      auto r = shape::check_sat(shape::parse_formula(*text));
      std::cout << (r.sat ? "sat" : "unsat") << "\n";
      if (r.model) std::cout << shape::to_json_string(*r.model) << "\n";
    }
  } catch (const shape::FormulaSyntaxError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return kParseError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shape analyzer for memory safety of list-manipulating programs"};
  app.require_subcommand(0, 1);

  std::string input;
  std::string property = "all";
  shape::Options opts;
  bool no_abstraction = false;
  std::string dump_states, dump_cfg;
  app.add_option("file", input, "Program to analyze");
  app.add_option("--property", property, "valid-deref, valid-free, valid-memtrack or all")
      ->check(CLI::IsMember({"valid-deref", "valid-free", "valid-memtrack", "all"}));
  app.add_option("--int-range", opts.int_range, "Integers are tracked exactly in [-K, K]")->check(CLI::NonNegativeNumber);
  app.add_option("--length-limit", opts.length_limit, "Largest tracked minimum list length")
      ->check(CLI::PositiveNumber);
  app.add_flag("--no-abstraction", no_abstraction, "Disable widening by list folding");
  app.add_option("--loop-ceiling", opts.loop_ceiling, "Loop-head iterations allowed before giving up")
      ->check(CLI::PositiveNumber);
  app.add_option("--dump-states", dump_states, "Write per-location states as JSON");
  app.add_option("--dump-cfg", dump_cfg, "Write the control-flow graphs in DOT format");

  auto* solve = app.add_subcommand("solve", "Decide a formula or an entailment");
  std::string solve_input;
  bool entail = false;
  solve->add_option("file", solve_input, "Formula file")->required();
  solve->add_flag("--entail", entail, "The file holds `lhs |- rhs`");

  CLI11_PARSE(app, argc, argv);

  if (*solve) return run_solve(solve_input, entail);
  if (input.empty()) {
    std::cerr << app.help();
    return kParseError;
  }

  std::vector<shape::Property> props =
      property == "all" ? shape::all_properties() : std::vector<shape::Property>{*shape::parse_property(property)};
  opts.abstraction = !no_abstraction;
  opts.record_states = !dump_states.empty();

  auto source = read_file(input);
  if (!source) {
    std::cerr << "cannot read " << input << "\n";
    print_errors(props);
    return kParseError;
  }

  try {
    shape::ast::Program program = shape::parse_program(*source);
    if (!dump_cfg.empty()) {
      std::string dot;
      for (const auto& f : program.functions) dot += shape::to_dot(shape::build_cfg(f));
      if (!write_file(dump_cfg, dot)) std::cerr << "cannot write " << dump_cfg << "\n";
    }
    shape::Report report = shape::analyze_program(program, opts);
    if (!dump_states.empty() && !write_file(dump_states, shape::states_to_json(report)))
      std::cerr << "cannot write " << dump_states << "\n";
    std::string file = base_name(input);
    for (auto p : props) {
      const auto& v = report.verdict(p);
      std::cout << shape::to_string(p) << ": " << shape::to_string(v.outcome) << "\n";
      if (v.outcome == shape::Outcome::False) {
        std::cout << "  reason: " << v.reason << "\n";
        for (const auto& s : v.trace) std::cout << "  " << file << ":" << s.loc.line << ": " << s.text << "\n";
      }
    }
    return kOk;
  } catch (const shape::ParseError& e) {
    std::cerr << input << ":" << e.what() << "\n";
    print_errors(props);
    return kParseError;
  } catch (const shape::UnsupportedFeature& e) {
    std::cerr << input << ":" << e.what() << "\n";
    print_errors(props);
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}
