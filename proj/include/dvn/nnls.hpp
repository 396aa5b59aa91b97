#pragma once

#include <span>
#include <vector>

#include "dvn/errors.hpp"
#include "dvn/matrix.hpp"

namespace dvn {

struct NnlsSolution {
    std::vector<double> activations;  // >= 0 elementwise
    double residual_norm = 0.0;
    int iterations = 0;
    bool kkt_satisfied = false;
    bool unique_solution = true;  // false when the passive-set system was rank-deficient
};

struct nnls_convergence_error : numeric_error {
    NnlsSolution best;
    nnls_convergence_error(const std::string& msg, NnlsSolution iterate)
        : numeric_error(msg), best(std::move(iterate)) {}
};

// Lawson-Hanson active-set NNLS: min ||design * a - target||^2 s.t. a >= 0.
// tol <= 0 selects 1e-10 * ||design^T target||_inf; max_iter <= 0 selects
// 3 * cols outer iterations.
NnlsSolution solve_nnls(const Matrix& design, std::span<const double> target, double tol = -1.0,
                        int max_iter = -1);

// One NNLS per target column against a shared design; column l of the result
// is the activation vector for frame l.
Matrix solve_nnls_batch(const Matrix& design, const Matrix& targets);

}  // namespace dvn
