#pragma once

// Restarted GMRES on an abstract matvec closure. Protocol: zero initial
// guess, Givens-rotation least squares, restart cycle length `restart`,
// `maxit` as a cap on TOTAL inner iterations (so restart 10 and maxit N-1
// allow ceil((N-1)/10) cycles), stopping when ||b - A x||_2 <= tol ||b||_2.
// A convergence claim triggered by the rotation-updated estimate is always
// re-verified against the true residual before being reported.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fracconv::krylov {

using Vector = Eigen::VectorXd;
using ApplyFn = std::function<Vector(const Vector&)>;

struct GmresConfig {
    int restart = 10;
    int maxit = 1;
    double tol = 1e-8;
};

enum class GmresStatus { Converged, MaxIterations, Breakdown };

struct GmresOutcome {
    Vector solution;
    int iterations = 0;  ///< total inner (Arnoldi) iterations across cycles
    bool converged = false;
    double final_relres = 0.0;
    GmresStatus status = GmresStatus::MaxIterations;
    std::vector<double> residual_estimates;  ///< Givens estimates, one per inner iteration
};

namespace detail {

// Solve the (j+1)-dimensional triangular least-squares system accumulated by
// the Givens sweep and add the correction V y to x.
inline void gmres_update(Vector& x, int j, const Eigen::MatrixXd& H, const Vector& g,
                         const Eigen::MatrixXd& V) {
    Vector y(j + 1);
    for (int i = j; i >= 0; --i) {
        double acc = g[i];
        for (int k = i + 1; k <= j; ++k) acc -= H(i, k) * y[k];
        y[i] = acc / H(i, i);
    }
    x += V.leftCols(j + 1) * y;
}

}  // namespace detail

inline GmresOutcome gmres(const ApplyFn& apply, const Vector& b, const GmresConfig& config) {
    if (config.restart < 1 || config.maxit < 1 || !(config.tol > 0.0))
        throw std::invalid_argument("gmres: invalid configuration");
    constexpr double kBreakdownTol = 1e-14;  // happy-breakdown tolerance on the Arnoldi norm

    GmresOutcome outcome;
    const auto n = b.size();
    outcome.solution = Vector::Zero(n);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        outcome.converged = true;
        outcome.status = GmresStatus::Converged;
        return outcome;
    }

    Vector x = Vector::Zero(n);
    const int m = config.restart;
    Eigen::MatrixXd V(n, m + 1);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Vector cs(m), sn(m), g(m + 1);

    while (outcome.iterations < config.maxit) {
        Vector r = b - apply(x);
        double beta = r.norm();
        outcome.final_relres = beta / bnorm;
        if (outcome.final_relres <= config.tol) {
            outcome.converged = true;
            outcome.status = GmresStatus::Converged;
            outcome.solution = x;
            return outcome;
        }
        V.col(0) = r / beta;
        g.setZero();
        g[0] = beta;

        int j = 0;
        bool updated = false;
        for (; j < m && outcome.iterations < config.maxit; ++j) {
            Vector w = apply(V.col(j));
            ++outcome.iterations;
            for (int i = 0; i <= j; ++i) {  // modified Gram-Schmidt
                H(i, j) = V.col(i).dot(w);
                w -= H(i, j) * V.col(i);
            }
            H(j + 1, j) = w.norm();
            const bool breakdown = H(j + 1, j) < kBreakdownTol;
            if (!breakdown) V.col(j + 1) = w / H(j + 1, j);

            for (int i = 0; i < j; ++i) {  // apply stored rotations to the new column
                const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
                H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
                H(i, j) = t;
            }
            const double denom = std::hypot(H(j, j), H(j + 1, j));
            cs[j] = denom == 0.0 ? 1.0 : H(j, j) / denom;
            sn[j] = denom == 0.0 ? 0.0 : H(j + 1, j) / denom;
            H(j, j) = denom;
            H(j + 1, j) = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            outcome.residual_estimates.push_back(std::abs(g[j + 1]));

            if (breakdown || std::abs(g[j + 1]) <= config.tol * bnorm) {
                if (denom != 0.0) detail::gmres_update(x, j, H, g, V);
                updated = true;
                const double relres = (b - apply(x)).norm() / bnorm;
                outcome.final_relres = relres;
                outcome.solution = x;
                if (relres <= config.tol) {
                    outcome.converged = true;
                    outcome.status = GmresStatus::Converged;
                    return outcome;
                }
                if (breakdown) {
                    // Exact Krylov breakdown that still fails the residual
                    // test: report distinctly rather than spinning.
                    outcome.status = GmresStatus::Breakdown;
                    return outcome;
                }
                break;  // estimate lied (rare); restart from the true residual
            }
        }
        // End of cycle (or maxit hit mid-cycle): fold in the progress made.
        if (!updated && j > 0) detail::gmres_update(x, j - 1, H, g, V);
    }

    outcome.solution = x;
    outcome.final_relres = (b - apply(x)).norm() / bnorm;
    outcome.converged = outcome.final_relres <= config.tol;
    outcome.status = outcome.converged ? GmresStatus::Converged : GmresStatus::MaxIterations;
    return outcome;
}

}  // namespace fracconv::krylov
