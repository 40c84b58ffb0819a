#include "baropc/linsolve.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace baropc {

void SolverConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw std::invalid_argument("SolverConfig: tolerances must be positive");
    }
}

namespace {

std::vector<double> inverse_diagonal(const SparseMatrix& a, Preconditioner p) {
    std::vector<double> d(a.rows(), 1.0);
    if (p == Preconditioner::Diagonal) {
        const std::vector<double> diag = a.diagonal_entries();
        for (std::size_t i = 0; i < d.size(); ++i) {
            d[i] = diag[i] != 0.0 ? 1.0 / diag[i] : 1.0;
        }
    }
    return d;
}

// Remove the (unweighted) mean: the orthogonal projection onto range(A) when
// ker(A) = constants and A is symmetric.
void remove_mean(std::span<double> v) {
    if (v.empty()) {
        return;
    }
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double& x : v) {
        x -= mean;
    }
}

std::vector<double> residual(const SparseMatrix& a, std::span<const double> b, std::span<const double> x) {
    std::vector<double> r = a * x;
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = b[i] - r[i];
    }
    return r;
}

void check_dims(const SparseMatrix& a, std::span<const double> b, std::span<const double> x0, const char* who) {
    if (a.rows() != a.cols() || b.size() != a.rows() || (!x0.empty() && x0.size() != a.rows())) {
        throw std::invalid_argument(std::string(who) + ": dimension mismatch");
    }
}

SolveResult pcg(const SparseMatrix& a, std::span<const double> b, const SolverConfig& cfg,
                std::span<const double> x0, bool project, const char* who) {
    cfg.validate();
    const std::size_t n = b.size();
    const std::vector<double> minv = inverse_diagonal(a, cfg.preconditioner);
    SolveResult out;
    out.x.assign(n, 0.0);
    if (!x0.empty()) {
        out.x.assign(x0.begin(), x0.end());
    }
    out.report.rhs_norm = norm2(b);
    const double target = std::max(cfg.rel_tol * out.report.rhs_norm, cfg.abs_tol);
    const std::size_t cap = cfg.iteration_cap(n);

    std::vector<double> history;
    std::vector<double> z(n);
    std::vector<double> p(n);
    std::vector<double> ap(n);
    std::size_t it = 0;
    for (int restart = 0; restart < 4; ++restart) {
        std::vector<double> r = residual(a, b, out.x);
        if (project) {
            remove_mean(r);
        }
        double rnorm = norm2(r);
        if (rnorm <= target) {
            out.report.iterations = it;
            out.report.residual = rnorm;
            return out;
        }
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = minv[i] * r[i];
        }
        if (project) {
            remove_mean(z);
        }
        p = z;
        double rz = dot(r, z);
        while (it < cap) {
            ++it;
            a.multiply(p, ap);
            const double pap = dot(p, ap);
            if (!(pap > 0.0) || !std::isfinite(pap)) {
                throw SolverError(std::string(who) + ": operator is not positive definite on the search space",
                                  history);
            }
            const double alpha = rz / pap;
            for (std::size_t i = 0; i < n; ++i) {
                out.x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            if (project) {
                remove_mean(r);
            }
            rnorm = norm2(r);
            history.push_back(rnorm);
            if (rnorm <= target) {
                break;
            }
            for (std::size_t i = 0; i < n; ++i) {
                z[i] = minv[i] * r[i];
            }
            if (project) {
                remove_mean(z);
            }
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t i = 0; i < n; ++i) {
                p[i] = z[i] + beta * p[i];
            }
        }
        std::vector<double> rt = residual(a, b, out.x);
        if (project) {
            remove_mean(rt);
        }
        out.report.residual = norm2(rt);
        out.report.iterations = it;
        if (out.report.residual <= target) {
            return out;
        }
        if (it >= cap) {
            break;
        }
    }
    throw SolverError(std::string(who) + ": no convergence in " + std::to_string(it) +
                          " iterations (residual " + std::to_string(out.report.residual) + ")",
                      history);
}

} // namespace

SolveResult cg_solve(const SparseMatrix& a, std::span<const double> b, const SolverConfig& config,
                     std::span<const double> x0) {
    check_dims(a, b, x0, "cg_solve");
    return pcg(a, b, config, x0, false, "cg_solve");
}

SolveResult neumann_solve(const SparseMatrix& a, std::span<const double> b, std::span<const double> weights,
                          const SolverConfig& config) {
    check_dims(a, b, {}, "neumann_solve");
    if (weights.size() != b.size()) {
        throw std::invalid_argument("neumann_solve: weight count mismatch");
    }
    double sum = 0.0;
    double abs_sum = 0.0;
    for (double v : b) {
        sum += v;
        abs_sum += std::abs(v);
    }
    if (std::abs(sum) > std::max(config.rel_tol, 1e-10) * abs_sum + config.abs_tol) {
        throw SolverError("neumann_solve: right-hand side is not orthogonal to the constants (sum " +
                              std::to_string(sum) + ")",
                          {});
    }
    std::vector<double> bp(b.begin(), b.end());
    remove_mean(bp);
    SolveResult out = pcg(a, bp, config, {}, true, "neumann_solve");
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double mean = dot(out.x, weights) / wsum;
    for (double& x : out.x) {
        x -= mean;
    }
    out.report.residual = norm2(residual(a, bp, out.x));
    return out;
}

SolveResult bicgstab_solve(const SparseMatrix& a, std::span<const double> b, const SolverConfig& config,
                           std::span<const double> x0) {
    check_dims(a, b, x0, "bicgstab_solve");
    config.validate();
    const std::size_t n = b.size();
    const std::vector<double> minv = inverse_diagonal(a, config.preconditioner);
    SolveResult out;
    out.x.assign(n, 0.0);
    if (!x0.empty()) {
        out.x.assign(x0.begin(), x0.end());
    }
    out.report.rhs_norm = norm2(b);
    const double target = std::max(config.rel_tol * out.report.rhs_norm, config.abs_tol);
    const std::size_t cap = config.iteration_cap(n);
    constexpr double tiny = std::numeric_limits<double>::min() * 1e4;

    std::vector<double> history;
    std::vector<double> p(n), v(n), ph(n), s(n), sh(n), t(n);
    std::size_t it = 0;
    int breakdowns = 0;
    while (true) {
        std::vector<double> r = residual(a, b, out.x);
        double rnorm = norm2(r);
        out.report.residual = rnorm;
        out.report.iterations = it;
        if (rnorm <= target) {
            return out;
        }
        if (it >= cap || breakdowns > 8) {
            break;
        }
        const std::vector<double> rhat = r;
        double rho = 1.0, alpha = 1.0, omega = 1.0;
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        while (it < cap) {
            ++it;
            const double rho_new = dot(rhat, r);
            if (std::abs(rho_new) < tiny) {
                ++breakdowns;
                break;
            }
            const double beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for (std::size_t i = 0; i < n; ++i) {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
                ph[i] = minv[i] * p[i];
            }
            a.multiply(ph, v);
            const double rv = dot(rhat, v);
            if (std::abs(rv) < tiny) {
                ++breakdowns;
                break;
            }
            alpha = rho / rv;
            for (std::size_t i = 0; i < n; ++i) {
                s[i] = r[i] - alpha * v[i];
            }
            if (norm2(s) <= target) {
                for (std::size_t i = 0; i < n; ++i) {
                    out.x[i] += alpha * ph[i];
                }
                history.push_back(norm2(s));
                break;
            }
            for (std::size_t i = 0; i < n; ++i) {
                sh[i] = minv[i] * s[i];
            }
            a.multiply(sh, t);
            const double tt = dot(t, t);
            if (!(tt > tiny)) {
                ++breakdowns;
                break;
            }
            omega = dot(t, s) / tt;
            for (std::size_t i = 0; i < n; ++i) {
                out.x[i] += alpha * ph[i] + omega * sh[i];
                r[i] = s[i] - omega * t[i];
            }
            rnorm = norm2(r);
            history.push_back(rnorm);
            if (!std::isfinite(rnorm)) {
                throw SolverError("bicgstab_solve: iteration diverged", history);
            }
            if (rnorm <= target) {
                break;
            }
            if (omega == 0.0) {
                ++breakdowns;
                break;
            }
        }
    }
    throw SolverError("bicgstab_solve: no convergence in " + std::to_string(it) + " iterations (residual " +
                          std::to_string(out.report.residual) + ")",
                      history);
}

} // namespace baropc
