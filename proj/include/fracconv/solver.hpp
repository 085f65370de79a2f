#pragma once

// Crank-Nicolson marching for the space-fractional convection equation
//
//     du/dt = -D ( (1+beta)/2 D_L^alpha + (1-beta)/2 D_R^alpha ) u + q
//
// on (x_L, x_R) with homogeneous exterior values. Interior nodes are
// x_i = x_L + i h, i = 1..N, h = (x_R - x_L)/(N+1), tau = T/M. One step reads
//
//     (I + mu/2 B) U^{n+1} = (I - mu/2 B) U^n + tau q(x, t_n + tau/2),
//
// with mu = mu_alpha = D tau / (2 Gamma(3-alpha) h^alpha) and B the two-sided
// Toeplitz operator of the chosen stencil (note the extra 1/2: B carries twice
// the prefactor-weighted lag weights, and Crank-Nicolson halves the operator
// on each side).

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>

#include "coeff.hpp"
#include "gmres.hpp"
#include "toeplitz.hpp"

namespace fracconv::solver {

using coeff::FracOrder;
using coeff::Scheme;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using SpaceFn = std::function<double(double)>;
using SpaceTimeFn = std::function<double(double, double)>;

/// Problem data. `q` and `exact` may be left empty (zero source / no error).
struct ProblemSpec {
    double alpha;
    double beta;
    double D;
    double x_left;
    double x_right;
    double T;
    SpaceFn u0;
    SpaceTimeFn q;
    SpaceTimeFn exact;

    void validate() const {
        FracOrder check(alpha);  // throws outside (0,1)
        (void)check;
        if (!(beta >= -1.0 && beta <= 1.0))
            throw std::invalid_argument("ProblemSpec: beta must lie in [-1, 1]");
        if (!(D > 0.0)) throw std::invalid_argument("ProblemSpec: D must be positive");
        if (!(x_left < x_right)) throw std::invalid_argument("ProblemSpec: empty domain");
        if (!(T > 0.0)) throw std::invalid_argument("ProblemSpec: horizon must be positive");
        if (!u0) throw std::invalid_argument("ProblemSpec: initial condition required");
    }
};

/// Uniform grid: M time steps, N interior spatial points.
struct GridSpec {
    int M;
    int N;
    double tau;
    double h;

    static GridSpec make(const ProblemSpec& problem, int M, int N) {
        if (M < 2 || N < 2) throw std::invalid_argument("GridSpec: M, N must be >= 2");
        return GridSpec{M, N, problem.T / M, (problem.x_right - problem.x_left) / (N + 1)};
    }

    [[nodiscard]] double x(const ProblemSpec& problem, int i) const {
        return problem.x_left + i * h;  // i = 1..N are interior
    }
};

/// mu_alpha = D tau / (2 Gamma(3-alpha) h^alpha).
inline double mu_alpha(const ProblemSpec& problem, const GridSpec& grid) {
    return problem.D * grid.tau /
           (2.0 * std::tgamma(3.0 - problem.alpha) * std::pow(grid.h, problem.alpha));
}

/// Assembled Crank-Nicolson system: v -> v +- (mu/2) B v.
struct SchemeSystem {
    toeplitz::ToeplitzOperator B;
    double mu;
    /// True when alpha sits outside the stencil's validated nonnegativity
    /// range (M2 beyond ~0.986, M3 beyond ~0.997). Advisory only: runs are
    /// allowed, this is exactly how the instability regime is reproduced.
    bool stability_advisory = false;

    [[nodiscard]] Vector apply_plus(const Vector& v) const {
        return v + 0.5 * mu * B.matvec_fft(v);
    }
    [[nodiscard]] Vector apply_minus(const Vector& v) const {
        return v - 0.5 * mu * B.matvec_fft(v);
    }
    [[nodiscard]] Matrix dense_plus() const {
        const auto n = static_cast<Eigen::Index>(B.size());
        return Matrix::Identity(n, n) + 0.5 * mu * B.to_dense();
    }
};

inline SchemeSystem assemble(Scheme scheme, const ProblemSpec& problem, const GridSpec& grid) {
    problem.validate();
    toeplitz::LowerToeplitz bhat =
        toeplitz::build_bhat(scheme, FracOrder(problem.alpha), static_cast<std::size_t>(grid.N));
    SchemeSystem system{toeplitz::combine_beta(bhat, problem.beta), mu_alpha(problem, grid)};
    system.stability_advisory = (scheme == Scheme::M2 && problem.alpha > 0.986) ||
                                (scheme == Scheme::M3 && problem.alpha > 0.997);
    return system;
}

enum class Method { Direct, Gmres };

/// Solution method. The direct path precomputes a dense LU factorization of
/// I + mu/2 B (or, with `explicit_inverse`, the literal inverse) and rejects
/// N beyond `dense_cap`. The GMRES path uses restart 10, maxit N-1, zero
/// initial guess, and the given relative-residual tolerance.
struct MethodSpec {
    Method kind = Method::Direct;
    double gmres_tol = 1e-10;
    bool explicit_inverse = false;
    int dense_cap = 8192;

    static MethodSpec direct() { return MethodSpec{}; }
    static MethodSpec gmres(double tol) { return MethodSpec{Method::Gmres, tol}; }
};

struct SolveReport {
    Vector final_solution;
    std::optional<double> error_h2;
    double cpu_seconds = 0.0;  ///< wall clock around the march only (assembly excluded)
    std::optional<double> avg_gmres_iters;
    bool gmres_all_converged = true;
    bool stability_advisory = false;  ///< copied from the assembled system
    int M = 0, N = 0;
    double tau = 0.0, h = 0.0;
};

/// h^(1/2) ||U - exact||_2.
inline double error_h2(const Vector& U, const Vector& exact_at_T, double h) {
    if (U.size() != exact_at_T.size())
        throw std::invalid_argument("error_h2: length mismatch");
    return std::sqrt(h) * (U - exact_at_T).norm();
}

/// March M steps from the sampled initial condition.
inline SolveReport run(Scheme scheme, const ProblemSpec& problem, const GridSpec& grid,
                       const MethodSpec& method) {
    const SchemeSystem system = assemble(scheme, problem, grid);
    const int N = grid.N, M = grid.M;

    Vector U(N), xs(N);
    for (int i = 0; i < N; ++i) {
        xs[i] = grid.x(problem, i + 1);
        U[i] = problem.u0(xs[i]);
    }

    // Precompute the solve kernel outside the timed march.
    std::function<Vector(const Vector&)> solve_plus;
    if (method.kind == Method::Direct) {
        if (N > method.dense_cap)
            throw std::invalid_argument("run: N exceeds the dense-path cap");
        if (method.explicit_inverse) {
            Matrix inverse = system.dense_plus().inverse();
            solve_plus = [inv = std::move(inverse)](const Vector& rhs) -> Vector {
                return inv * rhs;
            };
        } else {
            Eigen::PartialPivLU<Matrix> lu(system.dense_plus());
            solve_plus = [factor = std::move(lu)](const Vector& rhs) -> Vector {
                return factor.solve(rhs);
            };
        }
    }

    SolveReport report;
    report.M = M;
    report.N = N;
    report.tau = grid.tau;
    report.h = grid.h;
    report.stability_advisory = system.stability_advisory;

    long total_iters = 0;
    const krylov::GmresConfig gmres_config{10, N - 1, method.gmres_tol};
    const auto apply_plus = [&system](const Vector& v) { return system.apply_plus(v); };

    const auto t0 = std::chrono::steady_clock::now();
    for (int n = 0; n < M; ++n) {
        Vector rhs = system.apply_minus(U);
        if (problem.q) {
            const double t_half = (n + 0.5) * grid.tau;
            for (int i = 0; i < N; ++i) rhs[i] += grid.tau * problem.q(xs[i], t_half);
        }
        if (method.kind == Method::Direct) {
            U = solve_plus(rhs);
        } else {
            krylov::GmresOutcome outcome = krylov::gmres(apply_plus, rhs, gmres_config);
            total_iters += outcome.iterations;
            if (!outcome.converged) report.gmres_all_converged = false;
            U = std::move(outcome.solution);
        }
    }
    const auto t1 = std::chrono::steady_clock::now();
    report.cpu_seconds = std::chrono::duration<double>(t1 - t0).count();

    if (method.kind == Method::Gmres)
        report.avg_gmres_iters = static_cast<double>(total_iters) / M;
    if (problem.exact) {
        Vector exact_at_T(N);
        for (int i = 0; i < N; ++i) exact_at_T[i] = problem.exact(xs[i], problem.T);
        report.error_h2 = error_h2(U, exact_at_T, grid.h);
    }
    report.final_solution = std::move(U);
    return report;
}

/// Spectral norm of A_m = (I + mu B)^{-1} (I - mu B), computed densely.
/// Relative to the march, the argument is half a step's coupling: the
/// amplification matrix of a grid with mu_alpha = 2 mu. The norm bound
/// (<= 1 for M1, any mu > 0) is insensitive to that scaling.
inline double stability_norm_check(Scheme scheme, FracOrder alpha, double beta, double mu,
                                   int N, int dense_cap = 8192) {
    if (N > dense_cap) throw std::invalid_argument("stability_norm_check: N exceeds dense cap");
    const toeplitz::LowerToeplitz bhat =
        toeplitz::build_bhat(scheme, alpha, static_cast<std::size_t>(N));
    const Matrix B = toeplitz::combine_beta(bhat, beta).to_dense();
    const Matrix I = Matrix::Identity(N, N);
    const Matrix A = (I + mu * B).partialPivLu().solve(I - mu * B);
    // Largest singular value via the symmetric eigenproblem of A^T A.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(A.transpose() * A);
    return std::sqrt(eig.eigenvalues().maxCoeff());
}

}  // namespace fracconv::solver
