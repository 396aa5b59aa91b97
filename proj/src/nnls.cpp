#include "dvn/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace dvn {

namespace {

// Gaussian elimination with partial pivoting. Returns false (and zeros the
// deficient unknowns) when the system is rank-deficient.
bool solve_linear(std::vector<double> mat, std::vector<double> rhs, std::size_t n,
                  std::vector<double>& out) {
    bool full_rank = true;
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(mat[i * n + i]));
    const double tiny = std::max(scale, 1.0) * 1e-13;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(mat[r * n + col]) > std::abs(mat[piv * n + col])) piv = r;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(mat[col * n + c], mat[piv * n + c]);
            std::swap(rhs[col], rhs[piv]);
            std::swap(perm[col], perm[piv]);
        }
        double d = mat[col * n + col];
        if (std::abs(d) < tiny) {
            full_rank = false;
            mat[col * n + col] = tiny;  // regularize, solution flagged non-unique
            d = tiny;
            rhs[col] = 0.0;
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = mat[r * n + col] / d;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) mat[r * n + c] -= f * mat[col * n + c];
            rhs[r] -= f * rhs[col];
        }
    }
    out.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double acc = rhs[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= mat[i * n + c] * out[c];
        out[i] = acc / mat[i * n + i];
    }
    return full_rank;
}

double residual_norm_for(const Matrix& design, std::span<const double> target,
                         const std::vector<double>& a) {
    double acc = 0.0;
    for (std::size_t r = 0; r < design.rows; ++r) {
        double v = -target[r];
        for (std::size_t c = 0; c < design.cols; ++c) v += design(r, c) * a[c];
        acc += v * v;
    }
    return std::sqrt(acc);
}

}  // namespace

NnlsSolution solve_nnls(const Matrix& design, std::span<const double> target, double tol,
                        int max_iter) {
    const std::size_t rows = design.rows;
    const std::size_t cols = design.cols;
    if (rows == 0 || cols == 0 || target.size() != rows)
        throw std::invalid_argument("solve_nnls: empty problem or size mismatch");
    for (double v : design.data)
        if (!std::isfinite(v)) throw std::invalid_argument("solve_nnls: non-finite design entry");
    for (double v : target)
        if (!std::isfinite(v)) throw std::invalid_argument("solve_nnls: non-finite target entry");

    // w = F^T (y - F a), the negative gradient of the objective.
    std::vector<double> a(cols, 0.0), w(cols, 0.0), resid(target.begin(), target.end());
    auto update_gradient = [&] {
        for (std::size_t c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (std::size_t r = 0; r < rows; ++r) acc += design(r, c) * resid[r];
            w[c] = acc;
        }
    };
    auto update_residual = [&] {
        for (std::size_t r = 0; r < rows; ++r) {
            double v = target[r];
            for (std::size_t c = 0; c < cols; ++c) v -= design(r, c) * a[c];
            resid[r] = v;
        }
    };
    update_gradient();

    if (tol <= 0.0) {
        double wmax = 0.0;
        for (double v : w) wmax = std::max(wmax, std::abs(v));
        tol = 1e-10 * wmax;
        if (tol <= 0.0) tol = 1e-30;
    }
    if (max_iter <= 0) max_iter = 3 * static_cast<int>(cols);

    std::vector<bool> passive(cols, false);
    NnlsSolution sol;
    bool unique = true;
    int outer = 0;

    while (true) {
        int j = -1;
        double wbest = tol;
        for (std::size_t c = 0; c < cols; ++c) {
            if (passive[c]) continue;
            if (w[c] > wbest) {
                wbest = w[c];
                j = static_cast<int>(c);
            }
        }
        if (j < 0) break;  // KKT satisfied

        if (outer >= max_iter) {
            sol.activations = a;
            sol.residual_norm = residual_norm_for(design, target, a);
            sol.iterations = outer;
            throw nnls_convergence_error(
                "solve_nnls: max outer iterations (" + std::to_string(max_iter) + ") exceeded", sol);
        }
        ++outer;
        passive[static_cast<std::size_t>(j)] = true;

        while (true) {
            std::vector<std::size_t> pidx;
            for (std::size_t c = 0; c < cols; ++c)
                if (passive[c]) pidx.push_back(c);
            const std::size_t np = pidx.size();

            // Normal equations restricted to the passive set.
            std::vector<double> gram(np * np), rhs(np), z;
            for (std::size_t i = 0; i < np; ++i) {
                for (std::size_t k = i; k < np; ++k) {
                    double acc = 0.0;
                    for (std::size_t r = 0; r < rows; ++r)
                        acc += design(r, pidx[i]) * design(r, pidx[k]);
                    gram[i * np + k] = acc;
                    gram[k * np + i] = acc;
                }
                double acc = 0.0;
                for (std::size_t r = 0; r < rows; ++r) acc += design(r, pidx[i]) * target[r];
                rhs[i] = acc;
            }
            if (!solve_linear(std::move(gram), std::move(rhs), np, z)) unique = false;

            bool all_positive = true;
            for (std::size_t i = 0; i < np; ++i)
                if (z[i] <= 0.0) all_positive = false;

            if (all_positive) {
                std::fill(a.begin(), a.end(), 0.0);
                for (std::size_t i = 0; i < np; ++i) a[pidx[i]] = z[i];
                break;
            }

            // Step back along a -> z to the first constraint hit, drop it.
            double alpha = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < np; ++i) {
                if (z[i] > 0.0) continue;
                double denom = a[pidx[i]] - z[i];
                if (denom <= 0.0) {
                    alpha = 0.0;
                    continue;
                }
                alpha = std::min(alpha, a[pidx[i]] / denom);
            }
            if (!std::isfinite(alpha)) alpha = 0.0;
            for (std::size_t i = 0; i < np; ++i) {
                std::size_t c = pidx[i];
                a[c] += alpha * (z[i] - a[c]);
                if (z[i] <= 0.0 && a[c] <= 1e-14 * (1.0 + std::abs(z[i]))) {
                    a[c] = 0.0;
                    passive[c] = false;
                }
            }
        }

        update_residual();
        update_gradient();
    }

    sol.activations = std::move(a);
    sol.residual_norm = std::sqrt(
        std::inner_product(resid.begin(), resid.end(), resid.begin(), 0.0));
    sol.iterations = outer;
    sol.kkt_satisfied = true;
    sol.unique_solution = unique;
    return sol;
}

Matrix solve_nnls_batch(const Matrix& design, const Matrix& targets) {
    if (targets.rows != design.rows)
        throw std::invalid_argument("solve_nnls_batch: row mismatch between design and targets");
    Matrix activations(design.cols, targets.cols);
    for (std::size_t f = 0; f < targets.cols; ++f) {
        try {
            NnlsSolution sol = solve_nnls(design, targets.col(f));
            auto col = activations.col(f);
            std::copy(sol.activations.begin(), sol.activations.end(), col.begin());
        } catch (const std::exception& e) {
            throw numeric_error("solve_nnls_batch: frame " + std::to_string(f) + ": " + e.what());
        }
    }
    return activations;
}

}  // namespace dvn
