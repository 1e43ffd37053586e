#include "fresco/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace fresco {

LpResult simplex_maximize(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                          const std::vector<double>& c, double tol) {
    const int m = static_cast<int>(b.size());
    const int n = static_cast<int>(c.size());
    if (static_cast<int>(A.size()) != m) throw std::invalid_argument("simplex: A/b size mismatch");
    for (const auto& row : A)
        if (static_cast<int>(row.size()) != n) throw std::invalid_argument("simplex: A/c size mismatch");
    for (double bi : b)
        if (bi < 0.0) throw std::invalid_argument("simplex: requires b >= 0");

    // Tableau: m rows of [A | I | b], objective row below. Columns
    // 0..n-1 are structural, n..n+m-1 slacks, last column the rhs.
    const int cols = n + m + 1;
    std::vector<std::vector<double>> tab(m + 1, std::vector<double>(cols, 0.0));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) tab[i][j] = A[i][j];
        tab[i][n + i] = 1.0;
        tab[i][cols - 1] = b[i];
    }
    for (int j = 0; j < n; ++j) tab[m][j] = -c[j];

    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;

    LpResult res;
    const long max_iters = 10000L * (n + m);
    for (long iter = 0;; ++iter) {
        if (iter >= max_iters) {
            res.status = LpResult::Status::IterationLimit;
            return res;
        }
        // Bland: entering column = lowest index with negative reduced cost.
        int pivot_col = -1;
        for (int j = 0; j < n + m; ++j) {
            if (tab[m][j] < -tol) {
                pivot_col = j;
                break;
            }
        }
        if (pivot_col < 0) break;  // optimal

        // Ratio test; ties broken by lowest basis index (Bland).
        int pivot_row = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < m; ++i) {
            if (tab[i][pivot_col] > tol) {
                double ratio = tab[i][cols - 1] / tab[i][pivot_col];
                if (pivot_row < 0 || ratio < best_ratio - tol ||
                    (std::abs(ratio - best_ratio) <= tol && basis[i] < basis[pivot_row])) {
                    pivot_row = i;
                    best_ratio = ratio;
                }
            }
        }
        if (pivot_row < 0) {
            res.status = LpResult::Status::Unbounded;
            return res;
        }

        double piv = tab[pivot_row][pivot_col];
        for (int j = 0; j < cols; ++j) tab[pivot_row][j] /= piv;
        for (int i = 0; i <= m; ++i) {
            if (i == pivot_row) continue;
            double f = tab[i][pivot_col];
            if (f == 0.0) continue;
            for (int j = 0; j < cols; ++j) tab[i][j] -= f * tab[pivot_row][j];
        }
        basis[pivot_row] = pivot_col;
    }

    res.status = LpResult::Status::Optimal;
    res.x.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) res.x[basis[i]] = tab[i][cols - 1];
    res.objective = tab[m][cols - 1];
    return res;
}

}  // namespace fresco
