#pragma once

#include <vector>

namespace fresco {

struct LpResult {
    enum class Status { Optimal, Unbounded, IterationLimit };
    Status status = Status::Optimal;
    double objective = 0.0;
    std::vector<double> x;
};

// Dense primal simplex for  max c^T x  s.t.  A x <= b,  x >= 0,
// with b >= 0 (the slack basis is then feasible and no phase 1 is
// needed). Bland's rule guarantees termination on degenerate problems.
// Sized for small problems; the dispatch LPs here are ~100 x 50.
LpResult simplex_maximize(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                          const std::vector<double>& c, double tol = 1e-9);

}  // namespace fresco
