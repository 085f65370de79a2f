#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <fracconv/coeff.hpp>
#include <fracconv/toeplitz.hpp>

using Catch::Approx;
using namespace fracconv;
using toeplitz::LowerToeplitz;
using toeplitz::Matrix;
using toeplitz::ToeplitzOperator;
using toeplitz::Vector;
using coeff::FracOrder;
using coeff::Scheme;

TEST_CASE("LowerToeplitz::to_dense lays out constant diagonals", "[toeplitz]") {
    const LowerToeplitz t{{1.0, 2.0, 3.0}};
    const Matrix dense = t.to_dense();
    Matrix expected(3, 3);
    expected << 1, 0, 0, 2, 1, 0, 3, 2, 1;
    REQUIRE((dense - expected).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(t.size() == 3);
}

TEST_CASE("build_bhat leading entries are twice the prefactored weights", "[toeplitz]") {
    const FracOrder half(0.5);
    REQUIRE(toeplitz::build_bhat(Scheme::M1, half, 8).first_col[0] ==
            Approx(3.0).margin(1e-15));
    REQUIRE(toeplitz::build_bhat(Scheme::M2, half, 8).first_col[0] ==
            Approx(3.5).margin(1e-15));
    REQUIRE(toeplitz::build_bhat(Scheme::M3, half, 8).first_col[0] ==
            Approx(3.738).margin(1e-15));
    REQUIRE_THROWS_AS(toeplitz::build_bhat(Scheme::M1, half, 2), std::invalid_argument);

    // Second entries from the closed forms of the k = 1 sequence values:
    // a1 = 2^(2-alpha) - 2, b1 = a1 - 1, c1 = a1 - 2, d1 = a1 - 3, d0 = 1.
    for (double al : {0.2, 0.5, 0.8}) {
        const double a1 = std::pow(2.0, 2.0 - al) - 2.0;
        const auto m1 = toeplitz::build_bhat(Scheme::M1, FracOrder(al), 8);
        REQUIRE(m1.first_col[1] == Approx(2.0 * (a1 - 1.0) + (a1 - 2.0)).margin(1e-14));
        const auto m3 = toeplitz::build_bhat(Scheme::M3, FracOrder(al), 8);
        const double w1 =
            (a1 - 1.0) + 0.5 * (a1 - 2.0) + 0.369 * (a1 - 3.0) - 0.23 * 1.0;
        REQUIRE(m3.first_col[1] == Approx(2.0 * w1).margin(1e-14));
    }
}

TEST_CASE("M3 column equals the shift-matrix composition", "[toeplitz]") {
    const std::size_t N = 16;
    const FracOrder alpha(0.4);
    const auto n = static_cast<Eigen::Index>(N);

    auto lower = [&](double (*seq)(FracOrder, std::size_t)) {
        LowerToeplitz t{std::vector<double>(N)};
        for (std::size_t k = 0; k < N; ++k) t.first_col[k] = seq(alpha, k);
        return t.to_dense();
    };
    const Matrix Lb = lower(coeff::b_seq);
    const Matrix Lc = lower(coeff::c_seq);
    const Matrix Ld = lower(coeff::d_seq);
    Matrix J = Matrix::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) J(i, i - 1) = 1.0;

    const Matrix composed =
        2.0 * (Lb + 0.5 * Lc + 0.369 * Ld - 0.23 * J * Ld + 0.111 * J * J * Ld);
    const Matrix built = toeplitz::build_bhat(Scheme::M3, alpha, N).to_dense();
    REQUIRE((built - composed).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("ToeplitzOperator validates inputs and multiplies exactly", "[toeplitz]") {
    REQUIRE_THROWS_AS(ToeplitzOperator({1.0, 2.0}, {3.0, 4.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(ToeplitzOperator({1.0, 2.0}, {1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(ToeplitzOperator({}, {}), std::invalid_argument);

    const ToeplitzOperator op({2.0, 1.0, 0.0, 0.0}, {2.0, 3.0, 0.0, 0.0});
    Vector v(4);
    v << 1, 2, 3, 4;
    Vector expected(4);
    expected << 8, 14, 20, 11;
    REQUIRE((op.matvec_dense(v) - expected).cwiseAbs().maxCoeff() <= 1e-14);
    REQUIRE((op.matvec_fft(v) - expected).cwiseAbs().maxCoeff() <= 1e-12);

    Matrix dense_expected(4, 4);
    dense_expected << 2, 3, 0, 0, 1, 2, 3, 0, 0, 1, 2, 3, 0, 0, 1, 2;
    REQUIRE((op.to_dense() - dense_expected).cwiseAbs().maxCoeff() == 0.0);

    Vector wrong(3);
    wrong << 1, 2, 3;
    REQUIRE_THROWS_AS(op.matvec_dense(wrong), std::invalid_argument);
    REQUIRE_THROWS_AS(op.matvec_fft(wrong), std::invalid_argument);
}

TEST_CASE("combine_beta forms the beta-weighted two-sided matrix", "[toeplitz]") {
    const auto bhat = toeplitz::build_bhat(Scheme::M2, FracOrder(0.3), 12);
    const Matrix L = bhat.to_dense();
    for (double beta : {1.0, 0.0, 0.2, -1.0}) {
        const Matrix expected = 0.5 * (1.0 + beta) * L + 0.5 * (1.0 - beta) * L.transpose();
        const Matrix actual = toeplitz::combine_beta(bhat, beta).to_dense();
        REQUIRE((actual - expected).cwiseAbs().maxCoeff() <= 1e-15);
    }
    // beta = 1 keeps the operator lower triangular.
    const Matrix left = toeplitz::combine_beta(bhat, 1.0).to_dense();
    REQUIRE(left.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().cwiseAbs().maxCoeff() ==
            0.0);
    REQUIRE_THROWS_AS(toeplitz::combine_beta(bhat, 1.5), std::invalid_argument);
    REQUIRE_THROWS_AS(toeplitz::combine_beta(bhat, -1.0000001), std::invalid_argument);
}

TEST_CASE("FFT matvec agrees with the exact product", "[toeplitz]") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    const Scheme schemes[] = {Scheme::M1, Scheme::M2, Scheme::M3};
    for (std::size_t n : {3u, 4u, 17u, 100u, 256u}) {
        for (int trial = 0; trial < 20; ++trial) {
            const Scheme scheme = schemes[rng() % 3];
            const FracOrder alpha(0.05 + 0.9 * unit(rng));
            const double beta = -1.0 + 2.0 * unit(rng);
            const auto op =
                toeplitz::combine_beta(toeplitz::build_bhat(scheme, alpha, n), beta);
            Vector v(static_cast<Eigen::Index>(n));
            for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = entry(rng);
            const Vector exact = op.matvec_dense(v);
            const Vector fast = op.matvec_fft(v);
            REQUIRE((fast - exact).cwiseAbs().maxCoeff() <=
                    1e-12 * exact.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("symmetrized scheme matrices are positive semidefinite", "[toeplitz]") {
    auto min_eig = [](Scheme scheme, double alpha, std::size_t n) {
        const Matrix L = toeplitz::build_bhat(scheme, FracOrder(alpha), n).to_dense();
        const Matrix sym = L + L.transpose();
        Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
        return solver.eigenvalues().minCoeff();
    };
    for (std::size_t n : {16u, 64u, 256u}) {
        for (double al : {0.1, 0.3, 0.5, 0.7, 0.9})
            REQUIRE(min_eig(Scheme::M1, al, n) >= -1e-10);
        for (double al : {0.3, 0.7, 0.95})
            REQUIRE(min_eig(Scheme::M2, al, n) >= -1e-10);
        for (double al : {0.3, 0.7, 0.99})
            REQUIRE(min_eig(Scheme::M3, al, n) >= -1e-10);
    }
}
