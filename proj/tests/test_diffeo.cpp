#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <random>

#include "rdalab/diffeo.hpp"
#include "rdalab/sampling.hpp"

using namespace rdalab;

namespace {

// Dense Galerkin solve of xi' = phi P_K(psi xi) - <..> + h with
// sum_n (-1)^n xi_n = 0 replacing the mean row.
FourierField galerkin_aK(const FourierField& phi, const FourierField& psi, const FourierField& h, int K) {
    int N = h.n_max();
    int d = 2 * N + 1;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(d, d);
    Eigen::VectorXcd b(d);
    for (int n = -N; n <= N; ++n) {
        int row = n + N;
        b(row) = h(n);
        A(row, row) += cplx(0, n);
        for (int k = -N; k <= N; ++k) {
            // (phi P_K(psi e_k))_n = sum_{|j|<=K} phi_{n-j} psi_{j-k}
            cplx acc = 0;
            for (int j = -std::min(K, N); j <= std::min(K, N); ++j) acc += phi.get(n - j) * psi.get(j - k);
            A(row, k + N) -= acc;
        }
    }
    for (int k = -N; k <= N; ++k) A(N, k + N) = (k % 2 == 0) ? 1.0 : -1.0;
    b(N) = 0.0;
    Eigen::VectorXcd x = A.partialPivLu().solve(b);
    FourierField xi(N);
    for (int n = -N; n <= N; ++n) xi(n) = x(n + N);
    return xi;
}

ScalarMap sin_cut() { return with_cutoff(catalog_map("sin"), 4.0); }
ScalarMap tanh_cut() { return with_cutoff(catalog_map("tanh"), 4.0); }

}  // namespace

TEST(ForwardA, ZeroNonlinearityGivesUnitFactor) {
    auto u = from_trig(16, 0.3, {{1, 1.0}}, {{2, 0.5}});
    auto r = forward_a(u, 8, zero_map());
    for (double a : r.a_grid) EXPECT_NEAR(a, 1.0, 1e-15);
}

TEST(ForwardA, ConstantNonlinearityGivesUnitFactor) {
    auto u = from_trig(16, 0.3, {{1, 1.0}}, {{2, 0.5}});
    auto r = forward_a(u, 8, catalog_map("const", 2.5));
    for (double a : r.a_grid) EXPECT_NEAR(a, 1.0, 1e-14);
}

TEST(ForwardA, MatchesAdaptiveQuadrature) {
    auto f = sin_cut();
    auto u = from_trig(32, 0, {{1, 1.0}}, {});
    auto r = forward_a(u, 8, f);
    using boost::math::quadrature::gauss_kronrod;
    auto integrand = [&](double s) { return f(std::cos(s)); };
    double mean = gauss_kronrod<double, 61>::integrate(integrand, -pi, pi, 15, 1e-15) / two_pi;
    for (int j = 0; j < r.M; j += 7) {
        double x = grid_point(j, r.M);
        double expo = (j == 0) ? 0.0
                               : 0.5 * gauss_kronrod<double, 61>::integrate(
                                           [&](double s) { return integrand(s) - mean; }, -pi, x, 15, 1e-15);
        EXPECT_NEAR(r.a_grid[j], std::exp(expo), 1e-9) << "x=" << x;
    }
    EXPECT_NEAR(r.a_grid[0], 1.0, 1e-14);
}

TEST(ForwardA, PositiveAndPeriodic) {
    std::mt19937_64 rng(1);
    auto f = tanh_cut();
    for (int trial = 0; trial < 10; ++trial) {
        auto u = random_ball_field(32, rng, 5.0);
        auto r = forward_a(u, 16, f);
        for (double a : r.a_grid) EXPECT_GT(a, 0.0);
        EXPECT_NEAR(std::abs(evaluate(r.a, pi) - evaluate(r.a, -pi)), 0.0, 1e-12);
        EXPECT_NEAR(r.a_grid[0], 1.0, 1e-14);
    }
}

TEST(ForwardA, DerivativesMatchSpectralDifferentiation) {
    auto f = tanh_cut();
    auto u = from_trig(64, 0.2, {{1, 1.0}}, {{3, 0.4}});
    auto r = forward_a(u, 16, f);
    EXPECT_LT(l2_norm(derivative(r.a) - r.dx_a), 1e-10);
    EXPECT_LT(l2_norm(derivative(r.a, 2) - r.dxx_a), 1e-9);
}

TEST(WMap, IdentityCases) {
    auto u = from_trig(16, 0.3, {{1, 1.0}}, {});
    EXPECT_EQ(l2_norm(W_map(u, 8, zero_map()) - u), 0.0);
    EXPECT_EQ(l2_norm(W_map(FourierField(16), 8, tanh_cut())), 0.0);
}

TEST(WMap, NormEquivalenceBracket) {
    std::mt19937_64 rng(2);
    auto f = tanh_cut();
    double lo = 1e300, hi = 0;
    for (int s = 0; s < 100; ++s) {
        auto u = random_ball_field(64, rng, 5.0);
        double ratio = phi_norm(W_map(u, 16, f)) / phi_norm(u);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    double C = std::max(hi, 1.0 / lo);
    EXPECT_GT(lo, 0.0);
    EXPECT_LT(C, 10.0);
}

TEST(Upsilon, ZeroCoefficientSine) {
    auto h = from_trig(16, 0, {}, {{1, 1.0}});
    auto r = upsilon_detail(FourierField(16), h);
    EXPECT_NEAR(std::abs(r.D), 0.0, 1e-14);
    auto expect = from_trig(16, -1.0, {{1, -1.0}}, {});
    EXPECT_LT(l2_norm(r.xi - expect), 1e-12);
    EXPECT_NEAR(std::abs(evaluate(r.xi, -pi)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(evaluate(r.xi, pi)), 0.0, 1e-12);
}

TEST(Upsilon, ZeroSourceGivesZero) {
    EXPECT_EQ(l2_norm(upsilon(from_trig(16, 0, {{1, 1.0}}, {}), FourierField(16))), 0.0);
}

TEST(Upsilon, MeanPreconditionEnforced) {
    EXPECT_THROW(upsilon(FourierField(8), FourierField::mode(8, 0)), PreconditionError);
}

TEST(Upsilon, ResidualAndMeanIdentity) {
    int N = 64;
    auto phi = from_trig(N, 0, {{1, 1.0}}, {});
    auto h = from_trig(N, 0, {}, {{2, 1.0}});
    auto r = upsilon_detail(phi, h);
    auto phixi = multiply(phi, r.xi);
    EXPECT_NEAR(std::abs(mean_value(phixi) - r.D), 0.0, 1e-9);
    FourierField resid = derivative(r.xi) - phixi - h;
    resid(0) += mean_value(phixi);
    // L^1 bound through Cauchy-Schwarz on (-pi, pi).
    EXPECT_LT(std::sqrt(two_pi) * l2_norm(resid), 1e-8);
    EXPECT_NEAR(std::abs(evaluate(r.xi, -pi)), 0.0, 1e-12);
}

TEST(Upsilon, MatchesGalerkinSolve) {
    int N = 48;
    auto phi = from_trig(N, 0.7, {{1, 0.5}}, {{2, 0.3}});
    auto h = from_trig(N, 0, {{3, 1.0}}, {{1, -0.4}});
    auto xi = upsilon(phi, h);
    auto ref = galerkin_aK(phi, FourierField::mode(N, 0), h, N);
    EXPECT_LT(phi_norm(xi - ref), 1e-10);
}

TEST(UpsilonK, ZeroCouplingIsPlainAntiderivative) {
    int N = 32;
    auto h = from_trig(N, 0, {{2, 1.0}}, {{1, 0.5}});
    auto r = upsilon_K(from_trig(N, 0.4, {{1, 1.0}}, {}), FourierField(N), h, 4);
    auto expect = upsilon(FourierField(N), h);
    EXPECT_LT(phi_norm(r.xi - expect), 1e-13);
}

TEST(UpsilonK, FullBandMatchesGalerkin) {
    int N = 48;
    auto phi = from_trig(N, 0.3, {{1, 0.5}}, {});
    auto psi = from_trig(N, 1.0, {{1, 0.3}}, {{2, 0.2}});
    auto h = from_trig(N, 0, {}, {{1, 1.0}, {3, 0.2}});
    auto r = upsilon_K(phi, psi, h, N);
    EXPECT_LT(phi_norm(r.xi - galerkin_aK(phi, psi, h, N)), 1e-9);
}

TEST(UpsilonK, FiniteKMatchesGalerkin) {
    int N = 64;
    auto phi = from_trig(N, 0.3, {{1, 0.5}}, {{5, 0.2}});
    auto psi = from_trig(N, 1.0, {{1, 0.3}}, {{2, 0.2}});
    auto h = from_trig(N, 0, {{7, 0.3}}, {{1, 1.0}});
    for (int K : {4, 8}) {
        auto r = upsilon_K(phi, psi, h, K);
        EXPECT_LT(r.contraction_factor, 1.0);
        EXPECT_LT(phi_norm(r.xi - galerkin_aK(phi, psi, h, K)), 1e-9) << "K=" << K;
    }
}

TEST(UpsilonK, OperatorNormDecreasesWithK) {
    int N = 128;
    FourierField phi(N);
    for (int n = 1; n <= N; ++n) phi(n) = phi(-n) = 0.5 * std::pow(double(n), -0.6);
    auto psi = from_trig(N, 1.0, {{1, 0.3}}, {{2, 0.2}});
    auto probe = probe_K0(phi, psi, {4, 8, 16, 32});
    for (std::size_t i = 1; i < probe.factor.size(); ++i) EXPECT_LT(probe.factor[i], probe.factor[i - 1]);
    EXPECT_GT(probe.K0, 0);
}

TEST(InverseA, ZeroNonlinearityConvergesImmediately) {
    auto w = from_trig(16, 0.3, {{1, 1.0}}, {});
    auto r = inverse_a(w, 8, zero_map());
    EXPECT_EQ(r.iterations, 1);
    for (double a : r.a_grid) EXPECT_EQ(a, 1.0);
}

TEST(InverseA, InvertsForwardFactor) {
    std::mt19937_64 rng(3);
    auto f = tanh_cut();
    for (int s = 0; s < 10; ++s) {
        auto u = random_ball_field(64, rng, 5.0);
        auto fwd = forward_a(u, 32, f);
        auto w = W_map(u, 32, f);
        auto inv = inverse_a(w, 32, f);
        EXPECT_LT(detail::sup_diff(fwd.a_grid, inv.a_grid), 1e-8);
    }
}

TEST(UMap, RoundTripSmoothExample) {
    auto f = tanh_cut();
    auto u = from_trig(64, 0, {{1, 1.0}}, {{3, 0.2}});
    auto back = U_map(W_map(u, 32, f), 32, f);
    EXPECT_LT(phi_norm(back - u), 1e-7);
    EXPECT_EQ(l2_norm(U_map(FourierField(64), 32, f)), 0.0);
}

TEST(UMap, EmbeddingConstantOverKSweep) {
    std::mt19937_64 rng(4);
    auto f = tanh_cut();
    std::vector<FourierField> ws;
    for (int s = 0; s < 10; ++s) ws.push_back(random_ball_field(128, rng, 4.0));
    double cmax = 0, cmin = 1e300;
    for (int K : {8, 16, 32, 64, 128}) {
        double c = 0;
        for (const auto& w : ws) c = std::max(c, phi_norm(U_map(w, K, f)) / phi_norm(w));
        cmax = std::max(cmax, c);
        cmin = std::min(cmin, c);
    }
    EXPECT_LT(cmax / cmin, 1.1);
}

TEST(ATimeDerivative, ZeroForZeroNonlinearity) {
    auto sys = catalog_system("zero", 0, "cubic", 0.3, 3.0);
    EXPECT_EQ(l2_norm(a_time_derivative(from_trig(16, 0.1, {{1, 1.0}}, {}), 8, sys)), 0.0);
}

TEST(ATimeDerivative, FiniteDifferenceAlongTrajectory) {
    auto sys = catalog_system("tanh", 1.0, "cubic", 0.3, 4.0);
    int K = 16;
    auto u0 = from_trig(64, 0.2, {{1, 1.0}}, {{2, 0.5}});
    auto at = a_time_derivative(W_map(u0, K, sys.scalar_f), K, sys);
    auto a0 = forward_a(u0, K, sys.scalar_f).a;
    std::vector<double> err;
    for (double h : {1e-3, 1e-4}) {
        auto u1 = integrate(u0, 0, h, sys, h).final_state();
        auto fd = (forward_a(u1, K, sys.scalar_f).a - a0) * (1.0 / h);
        err.push_back(l2_norm(fd - at));
    }
    EXPECT_LT(err[0], 1e-2 * l2_norm(at));
    EXPECT_NEAR(err[0] / err[1], 10.0, 2.0);
}

TEST(ATimeDerivative, VanishesAtEquilibrium) {
    // Without the +u term constants are equilibria and the mean is conserved.
    auto sys = catalog_system("tanh", 1.0, "zero", 0, 4.0, false);
    auto u0 = from_trig(32, 0.5, {{1, 0.5}}, {{2, 0.3}});
    auto u = integrate(u0, 0, 20, sys, 1e-2).final_state();
    auto at = a_time_derivative(W_map(u, 8, sys.scalar_f), 8, sys);
    EXPECT_LT(l2_norm(at), 1e-6);
}
