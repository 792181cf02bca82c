#include "simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ratl::detail {

SimplexResult phase1_feasible(std::vector<std::vector<double>> a,
                              std::vector<double> b, double eps) {
    const std::size_t rows = a.size();
    const std::size_t n = rows ? a[0].size() : 0;
    if (rows == 0) return {true, std::vector<double>(n, 0.0), 0.0};

    for (std::size_t r = 0; r < rows; ++r) {
        if (b[r] < 0.0) {
            b[r] = -b[r];
            for (double& v : a[r]) v = -v;
        }
    }

    // tableau columns: n structural, rows artificials, then rhs
    const std::size_t cols = n + rows;
    std::vector<std::vector<double>> t(rows, std::vector<double>(cols + 1, 0.0));
    std::vector<std::size_t> basis(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < n; ++c) t[r][c] = a[r][c];
        t[r][n + r] = 1.0;
        t[r][cols] = b[r];
        basis[r] = n + r;
    }

    // phase-1 cost: 1 on artificials, 0 on structurals
    auto reduced_cost = [&](std::size_t c) {
        double d = c >= n ? 1.0 : 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            if (basis[r] >= n) d -= t[r][c];
        }
        return d;
    };

    const std::size_t max_iters = 1000 + 60 * (rows + cols);
    for (std::size_t iter = 0;; ++iter) {
        if (iter >= max_iters) {
            throw std::runtime_error("simplex: iteration cap exceeded");
        }
        // Bland: entering = lowest-index column with negative reduced cost
        std::size_t enter = cols;
        for (std::size_t c = 0; c < cols; ++c) {
            if (reduced_cost(c) < -eps) {
                enter = c;
                break;
            }
        }
        if (enter == cols) break;  // optimal

        // ratio test; ties broken toward the lowest basis index (Bland)
        std::size_t leave = rows;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < rows; ++r) {
            if (t[r][enter] > eps) {
                double ratio = t[r][cols] / t[r][enter];
                if (ratio < best_ratio - eps ||
                    (ratio < best_ratio + eps &&
                     (leave == rows || basis[r] < basis[leave]))) {
                    best_ratio = ratio;
                    leave = r;
                }
            }
        }
        if (leave == rows) {
            // unbounded phase-1 objective cannot happen (bounded below by 0);
            // treat as numerical failure
            throw std::runtime_error("simplex: no pivot row");
        }

        double piv = t[leave][enter];
        for (double& v : t[leave]) v /= piv;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == leave) continue;
            double f = t[r][enter];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= cols; ++c) t[r][c] -= f * t[leave][c];
        }
        basis[leave] = enter;
    }

    SimplexResult res;
    res.artificial_sum = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        if (basis[r] >= n) res.artificial_sum += t[r][cols];
    }
    res.feasible = res.artificial_sum <= eps;
    if (res.feasible) {
        res.x.assign(n, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
            if (basis[r] < n) res.x[basis[r]] = t[r][cols];
        }
    }
    return res;
}

}  // namespace ratl::detail
