#ifndef RATL_SRC_SIMPLEX_HPP
#define RATL_SRC_SIMPLEX_HPP

#include <cstddef>
#include <vector>

namespace ratl::detail {

struct SimplexResult {
    bool feasible = false;
    std::vector<double> x;        // structural variables, valid when feasible
    double artificial_sum = 0.0;  // phase-1 optimum; > eps proves infeasibility
};

// Phase-1 simplex for the feasibility problem  A x = b, x >= 0  (dense).
// Rows with negative b are flipped; one artificial per row; Bland's rule.
SimplexResult phase1_feasible(std::vector<std::vector<double>> a,
                              std::vector<double> b, double eps = 1e-9);

}  // namespace ratl::detail

#endif
