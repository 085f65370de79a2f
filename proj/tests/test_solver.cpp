#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include <fracconv/solver.hpp>
#include <fracconv/toeplitz.hpp>

using Catch::Approx;
using namespace fracconv;
using solver::GridSpec;
using solver::Matrix;
using solver::MethodSpec;
using solver::ProblemSpec;
using solver::Vector;
using coeff::FracOrder;
using coeff::Scheme;

namespace {

ProblemSpec smooth_problem(double alpha, double beta) {
    ProblemSpec problem;
    problem.alpha = alpha;
    problem.beta = beta;
    problem.D = 1.0;
    problem.x_left = 0.0;
    problem.x_right = 2.0;
    problem.T = 0.5;
    problem.u0 = [](double x) { return std::sin(1.5 * x) + 0.25 * x * x; };
    return problem;
}

}  // namespace

TEST_CASE("ProblemSpec::validate rejects malformed data", "[solver]") {
    ProblemSpec good = smooth_problem(0.5, 0.2);
    REQUIRE_NOTHROW(good.validate());

    auto broken = good;
    broken.alpha = 1.0;
    REQUIRE_THROWS_AS(broken.validate(), std::invalid_argument);
    broken = good;
    broken.alpha = 0.0;
    REQUIRE_THROWS_AS(broken.validate(), std::invalid_argument);
    broken = good;
    broken.beta = 1.5;
    REQUIRE_THROWS_AS(broken.validate(), std::invalid_argument);
    broken = good;
    broken.D = 0.0;
    REQUIRE_THROWS_AS(broken.validate(), std::invalid_argument);
    broken = good;
    broken.x_right = broken.x_left;
    REQUIRE_THROWS_AS(broken.validate(), std::invalid_argument);
    broken = good;
    broken.T = -1.0;
    REQUIRE_THROWS_AS(broken.validate(), std::invalid_argument);
    broken = good;
    broken.u0 = nullptr;
    REQUIRE_THROWS_AS(broken.validate(), std::invalid_argument);
}

TEST_CASE("GridSpec mapping and bounds", "[solver]") {
    const ProblemSpec problem = smooth_problem(0.5, 0.0);
    REQUIRE_THROWS_AS(GridSpec::make(problem, 1, 8), std::invalid_argument);
    REQUIRE_THROWS_AS(GridSpec::make(problem, 8, 1), std::invalid_argument);

    const GridSpec grid = GridSpec::make(problem, 10, 7);
    REQUIRE(grid.tau == Approx(0.05).margin(1e-16));
    REQUIRE(grid.h == Approx(0.25).margin(1e-16));
    REQUIRE(grid.x(problem, 0) == Approx(problem.x_left).margin(1e-16));
    REQUIRE(grid.x(problem, 8) == Approx(problem.x_right).margin(1e-15));
    REQUIRE(grid.x(problem, 1) == Approx(0.25).margin(1e-16));
}

TEST_CASE("mu_alpha matches frozen values and scales like h^-alpha", "[solver]") {
    ProblemSpec p1 = smooth_problem(0.5, 0.0);
    p1.D = 2.0;
    p1.x_left = 0.0;
    p1.x_right = 1.0;
    p1.T = 1.0;
    REQUIRE(solver::mu_alpha(p1, GridSpec::make(p1, 100, 9)) ==
            Approx(0.023788321548703614861).epsilon(1e-14));

    ProblemSpec p2 = smooth_problem(0.3, 0.0);
    p2.x_left = 0.0;
    p2.x_right = 1.0;
    p2.T = 1.0;
    REQUIRE(solver::mu_alpha(p2, GridSpec::make(p2, 64, 15)) ==
            Approx(0.011619457668394205902).epsilon(1e-14));

    // Halving h at fixed tau multiplies mu by 2^alpha.
    const double coarse = solver::mu_alpha(p2, GridSpec::make(p2, 64, 15));
    const double fine = solver::mu_alpha(p2, GridSpec::make(p2, 64, 31));
    REQUIRE(fine / coarse == Approx(std::pow(2.0, 0.3)).epsilon(1e-13));
}

TEST_CASE("assemble wires the dense Crank-Nicolson matrix", "[solver]") {
    const ProblemSpec problem = smooth_problem(0.4, 0.3);
    const GridSpec grid = GridSpec::make(problem, 8, 16);
    const auto system = solver::assemble(Scheme::M2, problem, grid);
    REQUIRE(!system.stability_advisory);

    const Matrix B = toeplitz::combine_beta(
                         toeplitz::build_bhat(Scheme::M2, FracOrder(0.4), 16), 0.3)
                         .to_dense();
    const double mu = solver::mu_alpha(problem, grid);
    REQUIRE(system.mu == Approx(mu).margin(1e-16));
    const Matrix expected = Matrix::Identity(16, 16) + 0.5 * mu * B;
    REQUIRE((system.dense_plus() - expected).cwiseAbs().maxCoeff() <= 1e-15);

    // apply_plus + apply_minus is exactly doubling.
    Vector v(16);
    for (int i = 0; i < 16; ++i) v[i] = std::cos(0.7 * i);
    REQUIRE((system.apply_plus(v) + system.apply_minus(v) - 2.0 * v)
                .cwiseAbs()
                .maxCoeff() <= 1e-13);

    // The advisory trips only past the validated nonnegativity edge.
    ProblemSpec hot = problem;
    hot.alpha = 0.99;
    REQUIRE(solver::assemble(Scheme::M2, hot, GridSpec::make(hot, 8, 16)).stability_advisory);
    REQUIRE(!solver::assemble(Scheme::M3, hot, GridSpec::make(hot, 8, 16)).stability_advisory);
    hot.alpha = 0.998;
    REQUIRE(solver::assemble(Scheme::M3, hot, GridSpec::make(hot, 8, 16)).stability_advisory);
}

TEST_CASE("two Crank-Nicolson steps match a dense hand march", "[solver]") {
    ProblemSpec problem = smooth_problem(0.6, -0.4);
    problem.q = [](double x, double t) { return std::exp(-t) * (1.0 + 0.5 * x); };
    const GridSpec grid = GridSpec::make(problem, 2, 12);

    const auto system = solver::assemble(Scheme::M1, problem, grid);
    const int N = grid.N;
    const Matrix B = toeplitz::combine_beta(
                         toeplitz::build_bhat(Scheme::M1, FracOrder(0.6), 12), -0.4)
                         .to_dense();
    const Matrix plus = Matrix::Identity(N, N) + 0.5 * system.mu * B;
    const Matrix minus = Matrix::Identity(N, N) - 0.5 * system.mu * B;

    Vector U(N), xs(N);
    for (int i = 0; i < N; ++i) {
        xs[i] = grid.x(problem, i + 1);
        U[i] = problem.u0(xs[i]);
    }
    const auto lu = plus.partialPivLu();
    for (int n = 0; n < 2; ++n) {
        Vector rhs = minus * U;
        for (int i = 0; i < N; ++i)
            rhs[i] += grid.tau * problem.q(xs[i], (n + 0.5) * grid.tau);
        U = lu.solve(rhs);
    }

    const auto report = solver::run(Scheme::M1, problem, grid, MethodSpec::direct());
    REQUIRE(report.M == 2);
    REQUIRE(report.N == 12);
    REQUIRE((report.final_solution - U).cwiseAbs().maxCoeff() <= 1e-12);
    REQUIRE(!report.error_h2.has_value());
    REQUIRE(!report.avg_gmres_iters.has_value());
}

TEST_CASE("zero data stays exactly zero", "[solver]") {
    ProblemSpec problem = smooth_problem(0.5, 0.0);
    problem.u0 = [](double) { return 0.0; };
    problem.exact = [](double, double) { return 0.0; };
    const GridSpec grid = GridSpec::make(problem, 6, 10);
    const auto report = solver::run(Scheme::M3, problem, grid, MethodSpec::direct());
    REQUIRE(report.final_solution.norm() == 0.0);
    REQUIRE(report.error_h2.has_value());
    REQUIRE(*report.error_h2 == 0.0);
}

TEST_CASE("direct, explicit-inverse, and GMRES paths agree", "[solver]") {
    const ProblemSpec problem = smooth_problem(0.5, 0.2);
    const GridSpec grid = GridSpec::make(problem, 32, 256);

    const auto direct = solver::run(Scheme::M2, problem, grid, MethodSpec::direct());

    MethodSpec inverse_path = MethodSpec::direct();
    inverse_path.explicit_inverse = true;
    const auto inverted = solver::run(Scheme::M2, problem, grid, inverse_path);
    REQUIRE((inverted.final_solution - direct.final_solution).cwiseAbs().maxCoeff() <=
            1e-11);

    const auto iterative = solver::run(Scheme::M2, problem, grid, MethodSpec::gmres(1e-13));
    REQUIRE(iterative.gmres_all_converged);
    REQUIRE(iterative.avg_gmres_iters.has_value());
    REQUIRE(*iterative.avg_gmres_iters >= 1.0);
    REQUIRE((iterative.final_solution - direct.final_solution).cwiseAbs().maxCoeff() <=
            1e-10);

    MethodSpec capped = MethodSpec::direct();
    capped.dense_cap = 100;
    REQUIRE_THROWS_AS(solver::run(Scheme::M2, problem, grid, capped),
                      std::invalid_argument);
}

TEST_CASE("error_h2 is the scaled Euclidean distance", "[solver]") {
    Vector U(4), exact(4);
    U << 1, 2, 3, 4;
    exact << 1.5, 2.5, 3.5, 4.5;
    REQUIRE(solver::error_h2(U, exact, 0.25) ==
            Approx(std::sqrt(0.25) * std::sqrt(4.0) * 0.5).margin(1e-15));
    Vector wrong(3);
    wrong << 1, 2, 3;
    REQUIRE_THROWS_AS(solver::error_h2(U, wrong, 0.25), std::invalid_argument);
}

TEST_CASE("amplification norms certify the first stencil and expose M2", "[solver]") {
    // mu = 0 collapses the amplification matrix to the identity.
    REQUIRE(solver::stability_norm_check(Scheme::M2, FracOrder(0.5), 0.2, 0.0, 32) ==
            Approx(1.0).margin(1e-12));

    for (double al : {0.1, 0.5, 0.9})
        for (double beta : {-1.0, 0.0, 1.0})
            for (double mu : {0.1, 1.0, 10.0})
                REQUIRE(solver::stability_norm_check(Scheme::M1, FracOrder(al), beta, mu,
                                                     64) <= 1.0 + 1e-10);

    // M2 at alpha = 0.99 loses the certificate.
    REQUIRE(solver::stability_norm_check(Scheme::M2, FracOrder(0.99), 0.2, 1.0, 64) >
            1.0);
    REQUIRE_THROWS_AS(solver::stability_norm_check(Scheme::M1, FracOrder(0.5), 0.0, 1.0,
                                                   64, 32),
                      std::invalid_argument);
}
