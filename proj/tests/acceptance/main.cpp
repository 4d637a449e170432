// Runs the acceptance criteria and prints one PASS or FAIL line each.
// `--only N` runs a single criterion. The exit status is nonzero iff a run
// criterion failed.

#include <CLI11.hpp>
#include <exception>
#include <functional>
#include <iostream>

#include "criteria.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--only", only, "Run one criterion (1-8)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<acceptance::Outcome()>>> criteria = {
      {"solver-oracle agreement", acceptance::solver_oracle_agreement},
      {"paper fold example", acceptance::paper_fold_example},
      {"unbounded-list corpus", acceptance::unbounded_list_corpus},
      {"integer domain", acceptance::integer_domain},
      {"fixpoint termination", acceptance::fixpoint_termination},
      {"fold soundness", acceptance::fold_soundness},
      {"summary reuse", acceptance::summary_reuse},
      {"TSLL classification", acceptance::tsll_classification},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    acceptance::Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    all = all && r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": " << r.detail
              << std::endl;
  }
  return all ? 0 : 1;
}
