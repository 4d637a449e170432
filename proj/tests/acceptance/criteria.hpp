#pragma once

#include <string>

namespace acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome solver_oracle_agreement();
Outcome paper_fold_example();
Outcome unbounded_list_corpus();
Outcome integer_domain();
Outcome fixpoint_termination();
Outcome fold_soundness();
Outcome summary_reuse();
Outcome tsll_classification();

}  // namespace acceptance
