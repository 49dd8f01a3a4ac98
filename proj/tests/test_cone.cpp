#include <gtest/gtest.h>

#include "rdalab/cone.hpp"

using namespace rdalab;

namespace {

TransformedSystem cone_system(int K, int N, double famp = 0.5, double gamp = 0.5) {
    TransformedSystem s;
    s.base = catalog_system("tanh", famp, "cubic", gamp, 4.0);
    s.K = K;
    s.N = N;
    s.theta = ball_cutoff(9.0);
    s.phi = HighModeCutoff{3.0};
    return s;
}

}  // namespace

TEST(VForm, LowSineMode) {
    auto xi = from_trig(16, 0.0, {}, {{1, 1.0}});
    for (int N : {1, 3, 8}) EXPECT_NEAR(V_form(xi, N), -two_pi, 1e-13);
}

TEST(VForm, FirstExcludedMode) {
    int N = 4;
    auto xi = FourierField::mode(16, N + 1, 0.7);
    double phi2 = std::pow(phi_norm(xi), 2);
    EXPECT_GT(V_form(xi, N), 0.0);
    EXPECT_NEAR(V_form(xi, N), phi2, 1e-13);
}

TEST(VForm, MatchesModeSum) {
    std::mt19937_64 rng(31);
    for (int s = 0; s < 20; ++s) {
        auto xi = random_ball_field(24, rng, 3.0, 0.1);
        int N = 1 + s % 10;
        double hi = 0.0, lo = 0.0;
        for (int n = -24; n <= 24; ++n) {
            double term = (n * n + 1.0) * std::norm(xi(n)) * two_pi;
            (std::abs(n) > N ? hi : lo) += term;
        }
        EXPECT_NEAR(V_form(xi, N), hi - lo, 1e-12 * (hi + lo));
        double q = std::pow(phi_norm(project_QK(xi, N)), 2), p = std::pow(phi_norm(project_PK(xi, N)), 2);
        EXPECT_NEAR(V_form(xi, N), q - p, 1e-12 * (hi + lo));
    }
}

TEST(AlphaOfW, Branches) {
    FourierField zero(16);
    EXPECT_DOUBLE_EQ(alpha_of_w(zero, 4, 1.0), 21.5);
    for (int N : {1, 2, 7}) EXPECT_DOUBLE_EQ(alpha_of_w(zero, N, 1.0), 0.5 * ((N + 1) * (N + 1) + 1 + N * N + 1));
    auto big = from_trig(16, 0.0, {{2, 100.0}}, {});
    EXPECT_DOUBLE_EQ(alpha_of_w(big, 4, 1.0), 21.5 - 17.0 / 4.0);
    // only the P_N part decides
    auto tail = from_trig(16, 0.0, {{9, 100.0}}, {});
    EXPECT_DOUBLE_EQ(alpha_of_w(tail, 4, 1.0), 21.5);
}

TEST(Mu, DefaultFromEigenvalues) {
    EXPECT_DOUBLE_EQ(default_mu(4), 9.0 / (16.0 * 26.0));
    for (int N = 1; N < 20; ++N) EXPECT_DOUBLE_EQ(default_mu(N), (2.0 * N + 1) / (16.0 * eigenvalue(2 * N + 1)));
}

TEST(ConeLinear, PerModeInequalityForAdmissibleRates) {
    std::mt19937_64 rng(32);
    int N = 5;
    double l0 = eigenvalue(2 * N), l1 = eigenvalue(2 * N + 1);
    for (int s = 0; s < 50; ++s) {
        auto xi = random_ball_field(32, rng, 1.0, 0.05);
        FourierField xi_t = apply_A(xi) * -1.0;
        for (double a : {l0, 0.5 * (l0 + l1), l1}) {
            double r = half_dV(xi, xi_t, N) + a * V_form(xi, N);
            EXPECT_LE(r, 1e-12 * h2_sq(xi));
        }
    }
}

TEST(ConeLinear, RunHasMachineMargin) {
    TransformedSystem sys;
    sys.base = scalar_system(zero_map(), zero_map());
    sys.N = 4;
    sys.enable_T = false;
    std::mt19937_64 rng(33);
    auto rep = cone_run(random_ball_field(32, rng, 2.0), random_sphere_field(32, rng, 1.0, 0.1), 0.1, sys);
    EXPECT_TRUE(rep.pass());
    EXPECT_LT(rep.max_residual, 0.0);
    EXPECT_LT(rep.max_integrated, 0.0);
    EXPECT_EQ(rep.times.size(), rep.residuals.size());
}

TEST(ConeFull, SmallCampaignPasses) {
    auto sys = cone_system(16, 6);
    std::mt19937_64 rng(34);
    std::vector<FourierField> ws, xs;
    for (int s = 0; s < 4; ++s) {
        ws.push_back(random_ball_field(32, rng, 3.0));
        xs.push_back(random_sphere_field(32, rng, 1.0, 0.1));
    }
    auto camp = cone_campaign(ws, xs, 0.05, sys);
    EXPECT_TRUE(camp.pass()) << camp.max_residual << " " << camp.max_integrated;
    std::ostringstream os;
    write_cone_csv(os, camp.runs[0]);
    EXPECT_EQ(os.str().rfind("t,V,alpha,residual,regime\n", 0), 0u);
}

TEST(ConeFull, DiscreteDerivativeConvergesSecondOrder) {
    auto sys = cone_system(16, 6);
    sys.inverse.tol = 1e-13;
    std::mt19937_64 rng(35);
    auto w = random_ball_field(32, rng, 2.0);
    auto xi = random_sphere_field(32, rng, 1.0, 0.4);
    TangentFlow flow{&sys, 1e-5, {}};
    FourierField z(32, 2);
    z.assign(0, w);
    z.assign(1, xi);
    double exact = 2.0 * half_dV(xi, flow.derivative_along(w, xi) - apply_A(xi), 6);
    std::vector<double> errs;
    for (double dt : {1e-4, 5e-5}) {
        Etdrk4<TangentFlow> stepper(flow, 32, dt);
        FourierField z1 = stepper.step(z, 0.0);
        FourierField z2 = stepper.step(z1, dt);
        double v0 = V_form(xi, 6), v1 = V_form(z1.extract(1), 6), v2 = V_form(z2.extract(1), 6);
        double fd = (-3.0 * v0 + 4.0 * v1 - v2) / (2.0 * dt);
        errs.push_back(std::abs(fd - exact));
    }
    EXPECT_GT(errs[0] / errs[1], 3.0);
    EXPECT_LT(errs[1], 1e-2 * std::abs(exact));
}

TEST(GapAudit, EigenvalueIdentities) {
    for (int N = 1; N <= 200; ++N) {
        double l0 = eigenvalue(2 * N), l1 = eigenvalue(2 * N + 1);
        EXPECT_DOUBLE_EQ(l1 - l0, 2.0 * N + 1);
        EXPECT_GE((l1 - l0) * (l1 - l0) / l1, 1.0);
    }
}

TEST(GapAudit, ThresholdOneSixtyFourthKeepsH2BracketPositive) {
    EmpiricalConstants c;
    int K = 64;
    c.C = std::sqrt(double(K) / 64.0);  // C^2 / K = 1/64
    for (int N = 1; N <= 200; ++N) {
        auto b = gap_brackets(N, K, c);
        double l1 = eigenvalue(2 * N + 1);
        EXPECT_NEAR(b[2], (2.0 * N + 1) / (16.0 * l1) - 2.0 / (64.0 * (2 * N + 1)), 1e-15);
        EXPECT_GE(b[2] * (2 * N + 1), 1.0 / 16.0 - 2.0 / 64.0);
        EXPECT_GT(b[2], 0.0);
    }
}

TEST(GapAudit, MinimalNAndNegativeControl) {
    EmpiricalConstants c{1.3, 0.45, 0.4, 0.11};
    auto a = gap_audit(6, 32, c);
    ASSERT_GT(a.minimal_N, 0);
    auto at_min = gap_audit(a.minimal_N, 32, c);
    EXPECT_TRUE(at_min.all_nonnegative);
    if (a.minimal_N > 1) {
        EXPECT_FALSE(gap_audit(a.minimal_N - 1, 32, c).all_nonnegative);
    }
    // shrinking K flips the H^2 brackets at the same N
    auto small = gap_audit(at_min.N, 1, c);
    EXPECT_FALSE(small.all_nonnegative);
    EXPECT_LT(small.brackets[4], 0.0);
    auto j = to_json(small);
    EXPECT_LT(j["brackets"]["h2_case2"].get<double>(), 0.0);
    EXPECT_EQ(j["K"].get<int>(), 1);
}

TEST(GapAudit, MeasuredConstantsAreFiniteAndKStable) {
    std::mt19937_64 rng(36);
    auto ps = probe_samples(128, 4.0, rng, 8);
    std::vector<double> Cs;
    for (int K : {8, 32}) {
        auto c = measure_constants(cone_system(K, 6), ps);
        EXPECT_TRUE(std::isfinite(c.C_K) && c.C_K > 0.0);
        EXPECT_GT(c.C_tilde, 0.0);
        EXPECT_GT(c.C_bar1, 0.0);
        Cs.push_back(c.C);
    }
    EXPECT_NEAR(Cs[1] / Cs[0], 1.0, 0.3);
}
