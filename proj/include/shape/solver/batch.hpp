#pragma once

// Batches of independent solver queries. The OpenMP kernels and the serial
// reference compute identical answers; the serial one exists for testing and
// for benchmarking the parallel one against.

#include <vector>

#include "shape/solver/solver.hpp"

namespace shape {

enum class Execution { Serial, Parallel };

/// Entry i is check_sat(hs[i]).sat.
std::vector<char> check_sat_all(const std::vector<SymbolicHeap>& hs, Execution exec = Execution::Parallel,
                                const SolverOptions& opts = {});

/// Row-major n x n matrix whose entry i * n + j is check_entail(hs[i], hs[j]).valid.
/// Models of each left-hand side are enumerated once and shared by its row.
std::vector<char> entailment_matrix(const std::vector<SymbolicHeap>& hs, Execution exec = Execution::Parallel,
                                    const SolverOptions& opts = {});

}  // namespace shape
