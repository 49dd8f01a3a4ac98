#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "rdalab/floquet.hpp"

using namespace rdalab;

namespace {

const CounterexampleConfig& config10() {
    static const CounterexampleConfig c = make_counterexample(10.0, 24);
    return c;
}

const PeriodMap& map10() {
    static const PeriodMap P = assemble_block_map(config10());
    return P;
}

}  // namespace

TEST(Profile, DefaultSatisfiesShapeConditions) {
    for (double T : {1.0, 10.0}) {
        auto y = default_y(T);
        EXPECT_NEAR(y(T / 2), 1.0, 1e-15);
        for (int k = 0; k <= 100; ++k) {
            double t = -2 * T + 4 * T * k / 100.0;
            EXPECT_NEAR(y(-t), -y(t), 1e-14);
            EXPECT_NEAR(y(T - t), y(t), 1e-14);
            EXPECT_NEAR(y(t + 2 * T), y(t), 1e-14);
        }
        double h = 1e-3 * T;
        for (int k = 1; k < 100; ++k) {
            double t = T * k / 100.0;
            EXPECT_LE(y(t + h) - 2 * y(t) + y(t - h), 1e-14);
            if (t < T / 2) {
                EXPECT_GT(y(t + h), y(t));
            }
        }
    }
    EXPECT_THROW(default_y(0.0), ConfigError);
}

TEST(Profile, T0ClosedForm) {
    for (double T : {0.3, 1.0, 10.0}) {
        auto c = make_counterexample(T, 4);
        EXPECT_NEAR(c.T0, T / pi * std::asin(0.25), 1e-13 * T);
        EXPECT_NEAR(c.y(c.T0), 0.25, 1e-14);
    }
}

TEST(Epsilon, SharpPlateauLimit) {
    double T = 10.0;
    auto c = make_counterexample(T, 4, Ramp{0.25, 0.25 + 1e-9});
    EXPECT_NEAR(c.epsilon, pi / (2.0 * (T - 2.0 * c.T0)), 1e-7 * c.epsilon);
}

TEST(Epsilon, QuarterTurnSelfCheck) {
    auto ph = phase_defects(config10());
    EXPECT_LT(std::abs(ph[0]), 1e-8);
    EXPECT_LT(std::abs(ph[1]), 1e-8);
    auto w = first_window(config10());
    EXPECT_LT(std::abs(w.defect), 1e-8);
}

TEST(Epsilon, SharperRampChangeBoundedByRampTime) {
    double T = 10.0;
    auto base = make_counterexample(T, 4);
    auto sharp = make_counterexample(T, 4, Ramp{0.25, 0.375});
    double ramp_time = 2.0 * (T / pi * std::asin(0.5) - base.T0);
    double d_base = pi / (2.0 * base.epsilon), d_sharp = pi / (2.0 * sharp.epsilon);
    EXPECT_GT(d_sharp, d_base);
    EXPECT_LT(d_sharp - d_base, ramp_time);
}

TEST(Epsilon, DegenerateProfileIsConfigError) {
    auto c = make_counterexample(1.0, 4);
    c.y = Profile{1.0, [](double t) { return 0.3 * std::sin(pi * t); }};
    EXPECT_THROW(epsilon_of(c), ConfigError);
}

TEST(FirstHalf, CapAndWindowFactors) {
    const auto& c = config10();
    for (int n : {-3, 0, 2, 5}) {
        auto cap = cap_logs(n, n, c, 0.0, c.T0);
        EXPECT_NEAR(cap[1], -c.T0 * n * n, 1e-10 * std::max(1.0, c.T0 * n * n));
        double I = cap_integral(c, 0.0, c.T0);
        EXPECT_NEAR(cap[0], -c.T0 * n * n - (2 * n + 1) * I, 1e-9 * std::max(1.0, std::abs(cap[0])));
    }
    // with trivial caps the block is the window factor times the rotation
    auto b = halfperiod_map_first(2, c);
    auto cap1 = cap_logs(2, 3, c, 0.0, c.T0), cap2 = cap_logs(2, 3, c, c.T - c.T0, c.T);
    double window = std::log(std::abs(b.m(1, 0))) + b.log_scale - cap1[0] - cap2[1];
    EXPECT_NEAR(window, -(c.T - 2.0 * c.T0) * 9.0, 1e-9);
}

TEST(FirstHalf, MatchesClosedFormAndDirectIntegration) {
    const auto& c = config10();
    for (int n = -6; n <= 6; ++n) {
        auto closed = halfperiod_closed_first(n, c);
        EXPECT_LT(block_distance(halfperiod_map_first(n, c), closed), 1e-8) << n;
        EXPECT_LT(block_distance(halfperiod_direct_first(n, c), closed), 1e-8) << n;
        auto b = halfperiod_map_first(n, c);
        EXPECT_GT(b.m(1, 0).real(), 0.0);
        EXPECT_LT(b.m(0, 1).real(), 0.0);
    }
}

TEST(SecondHalf, ZeroModeIsPureRotation) {
    auto v = halfperiod_map_second(0, config10()).value();
    Eigen::Matrix2cd r;
    r << 0.0, -1.0, 1.0, 0.0;
    EXPECT_LT((v - r).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SecondHalf, FirstModeFactor) {
    auto b = halfperiod_map_second(1, config10());
    EXPECT_NEAR(b.log_scale + std::log(std::abs(b.m(1, 0))), -10.0, 1e-12);
    EXPECT_NEAR(b.log_scale + std::log(std::abs(b.m(0, 1))), -10.0, 1e-12);
}

TEST(SecondHalf, IntegratedRotationMatchesClosedForm) {
    auto c = config10();
    c.exact_quarter_turn = false;
    for (int n = -6; n <= 6; ++n)
        EXPECT_LT(block_distance(halfperiod_map_second(n, c), halfperiod_closed_second(n, c)), 1e-8);
}

TEST(PeriodMap, StructureOnEveryInteriorColumn) {
    auto st = structure_check(map10());
    EXPECT_TRUE(st.pass()) << st.min_mass_fraction;
    EXPECT_EQ(st.columns, 2 * (2 * 22 + 1));
    EXPECT_LT(map10().max_leak, 1e-8);
}

TEST(PeriodMap, MultipliersAgainstClosedForms) {
    auto r = multiplier_report(map10(), config10(), -6, 6);
    EXPECT_LT(r.max_mu_rel, 1e-6);
    EXPECT_TRUE(r.mu_negative);
    EXPECT_TRUE(r.nu_negative);
    EXPECT_TRUE(r.nu_index_shift);
    for (const auto& row : r.rows) EXPECT_LT(row.nu_rel_prev, 1e-6);
}

TEST(PeriodMap, MultipliersBoundedByGaussianInN) {
    auto r = multiplier_report(map10(), config10(), -8, 8);
    EXPECT_GT(r.K_fit, 0.0);
    for (const auto& row : r.rows)
        if (row.n != 0) {
            double bound = -r.K_fit * 10.0 * row.n * row.n;
            EXPECT_LE(std::max(row.mu.log_abs, row.nu.log_abs), bound + 1e-12);
        }
}

TEST(PeriodMap, UnsnappedRotationStillWithinDefect) {
    auto c = make_counterexample(10.0, 8);
    c.exact_quarter_turn = false;
    auto P = assemble_block_map(c);
    EXPECT_LT(P.max_leak, 1e-8);
    EXPECT_GT(P.max_leak, 0.0);
}

TEST(PeriodMap, BlockAndPdeAgreeOnLowModes) {
    auto c = make_counterexample(1.0, 6);
    auto Pb = assemble_block_map(c);
    auto Pp = assemble_pde_map(c, 2.5e-4, 4);
    auto cmp = compare_maps(Pp, Pb, 4);
    EXPECT_LT(cmp.max_rel, 1e-6) << Pb.label(cmp.worst_row) << " <- " << Pb.label(cmp.worst_col);
}

TEST(Spectral, ChainNormsMatchClosedFormMultipliers) {
    const auto& c = config10();
    double J = cap_defect(c);
    auto r = spectral_analysis(map10(), 6);
    for (int k = 1; k <= 6; ++k) {
        double best = -1e300;
        for (int n = -22; n + k - 1 <= 22; ++n) {
            double sv = 0.0, su = 0.0;
            for (int i = 0; i < k; ++i) sv += closed_log_mu(n + i, c, J);
            for (int i = 0; i < k; ++i) su += closed_log_nu(-n - i - 1, c, J);
            best = std::max({best, sv, su});
        }
        EXPECT_NEAR(r.log_norms[k - 1], best, 1e-9 * std::abs(best) + 1e-12) << k;
    }
}

TEST(Spectral, DirectPowersOfSubmatrixAgree) {
    const auto& P = map10();
    auto w = detail::target_logs(P);
    for (int k = 1; k <= 6; ++k) {
        double chain = chain_log_norm(P, w, k, 3);
        EXPECT_NEAR(direct_power_log_norm(P, 3, k), chain, 1e-9 * std::abs(chain) + 1e-12);
    }
}

TEST(Spectral, RadiusGelfandAndSumOfSquaresShape) {
    auto m = multiplier_report(map10(), config10(), -8, 8);
    auto r = spectral_analysis(map10(), 6, m.K_fit);
    EXPECT_TRUE(r.balanced);
    EXPECT_LT(r.spectral_radius, 1e-8);
    EXPECT_LT(r.log_spectral_radius, std::log(1e-8));
    EXPECT_LT(r.gelfand_bound, 1.0);
    EXPECT_GT(r.fit.gamma, 0.0);
    for (std::size_t i = 0; i < r.log_norms.size(); ++i) EXPECT_LE(r.log_norms[i], r.sum_k2_bound[i] + 1e-9);
    for (std::size_t i = 1; i < r.log_norms.size(); ++i) EXPECT_LT(r.log_norms[i], r.log_norms[i - 1]);
}

TEST(Spectral, CubicFitRecoversExactLaw) {
    std::vector<double> x, y;
    for (int k = 1; k <= 6; ++k) {
        x.push_back(k);
        y.push_back(2.0 - 0.7 * k * k * k);
    }
    auto f = fit_cubic(x, y);
    EXPECT_NEAR(f.gamma, 0.7, 1e-12);
    EXPECT_NEAR(f.logC, 2.0, 1e-10);
    EXPECT_NEAR(f.r2, 1.0, 1e-14);
}

TEST(LinearDecay, ZeroStaysZero) {
    auto c = make_counterexample(1.0, 6);
    auto r = simulate_linear_decay(FourierField(6, 2), 1, c);
    for (double v : r.l2) EXPECT_EQ(v, 0.0);
}

TEST(LinearDecay, GroundModeMovesTwoStepsInTwoPeriods) {
    auto c = make_counterexample(1.0, 8);
    auto r = simulate_linear_decay(basis_state(8, 0, true), 2, c, 2.5e-4, 100);
    const auto& s = r.final_state;
    double total = std::pow(l2_norm(s), 2) / two_pi;
    EXPECT_GT(std::norm(s(2, 0)) / total, 1.0 - 1e-6);
    double J = cap_defect(c);
    double expected = closed_log_mu(0, c, J) + closed_log_mu(1, c, J);
    EXPECT_NEAR(std::log(std::abs(s(2, 0))), expected, 1e-6);
    EXPECT_GT(r.tail_fit.gamma, 0.0);
}

TEST(Extended, ExactOrbitsAreEquilibriaOfTheirEquations) {
    auto c = make_counterexample(0.3, 16);
    ExtendedFlow flow{&c};
    FourierField s = extended_initial(16, {});
    s(0, 0) = std::exp(cplx(0.0, 0.7));
    FourierField nl = flow.nonlinear(0.0, s);
    cplx y_rhs = flow.linear_symbol(0, 0) * s(0, 0) + nl(0, 0);
    EXPECT_LT(std::abs(y_rhs - cplx(0.0, pi / c.T) * s(0, 0)), 1e-13);
    cplx z_rhs = flow.linear_symbol(1, 1) * s(1, 1) + nl(1, 1);
    EXPECT_LT(std::abs(z_rhs), 1e-13);
    for (int n = -16; n <= 16; ++n) EXPECT_LT(std::abs(nl(n, 2)) + std::abs(nl(n, 3)), 1e-15);
}

TEST(Extended, ZeroPerturbationGivesIdenticalRuns) {
    auto c = make_counterexample(0.3, 16);
    ExtendedOptions o;
    o.N_max = 16;
    o.n_periods = 1;
    auto r = extended_nonlinear_run(c, FourierField(16, 2), o);
    for (double d : r.diff_norm) EXPECT_EQ(d, 0.0);
    EXPECT_FALSE(r.alarm);
}

TEST(Extended, SmallPerturbationDecaysSuperExponentially) {
    auto c = make_counterexample(0.3, 32);
    ExtendedOptions o;
    o.N_max = 32;
    o.n_periods = 3;
    auto r = extended_nonlinear_run(c, FourierField::mode(32, 0, 1e-3, 0, 2), o);
    EXPECT_LT(r.max_circle, 1e-6);
    EXPECT_EQ(r.circle_y.size(), 3u);
    EXPECT_GT(r.fit.gamma, 0.0);
    EXPECT_GT(r.fit.r2, 0.98);
    EXPECT_LT(r.diff_norm.back(), 1e-3 * r.diff_norm.front());
}

TEST(Symmetrize, ReflectionIsAnInvolution) {
    std::mt19937_64 rng(61);
    FourierField u(8, 4);
    std::normal_distribution<double> g;
    for (auto& c : u.data()) c = cplx(g(rng), g(rng));
    EXPECT_LT(phi_norm(reflect(reflect(u)) - u), 1e-15);
    EXPECT_LT(phi_norm(desymmetrize(symmetrize(u)) - u), 1e-14 * phi_norm(u));
    FourierField even = u + reflect(u);
    auto s = symmetrize(even);
    for (int c = 4; c < 8; ++c) EXPECT_LT(phi_norm(s.extract(c)), 1e-14);
    FourierField odd = u - reflect(u);
    s = symmetrize(odd);
    for (int c = 0; c < 4; ++c) EXPECT_LT(phi_norm(s.extract(c)), 1e-14);
}

TEST(Symmetrize, ReconstructsDirectRunWithDirichletTrace) {
    auto c = make_counterexample(0.3, 16);
    ExtendedOptions o;
    o.N_max = 16;
    o.n_periods = 1;
    auto r = symmetrize_mixed_bc(c, FourierField::mode(16, 0, 1e-3, 0, 2), o);
    EXPECT_LT(r.reconstruction, 1e-8);
    EXPECT_LT(r.dirichlet_trace, 1e-12);
    EXPECT_LT(r.neumann_flux, 1e-12);
    EXPECT_LT(r.projection, 1e-12);
    EXPECT_FALSE(r.alarm);
    EXPECT_LT(r.pair_diff.back(), r.pair_diff.front());
}

TEST(Output, PeriodMapCsvAndJson) {
    auto c = make_counterexample(10.0, 3);
    auto P = assemble_block_map(c);
    std::ostringstream os;
    write_period_map_csv(os, P);
    std::string s = os.str();
    EXPECT_EQ(s.rfind("row,col,row_mode,col_mode,log_abs,phase\n", 0), 0u);
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1 + P.dim() * P.dim());
    auto j = to_json(spectral_analysis(P, 2));
    EXPECT_EQ(j["log_norms"].size(), 2u);
    EXPECT_TRUE(j["fit"].contains("R2"));
}

TEST(Sweep, LargeTPassesStructuralChecks) {
    auto res = sweep_T({10.0}, 8);
    ASSERT_EQ(res.size(), 1u);
    EXPECT_TRUE(res[0].pass);
}
