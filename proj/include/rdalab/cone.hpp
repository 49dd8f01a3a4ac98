#pragma once

#include <array>

#include "json.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "sampling.hpp"
#include "transformed.hpp"

namespace rdalab {

// ||Q_N xi||_Phi^2 - ||P_N xi||_Phi^2 with P_N over |n| <= N.
inline double V_form(const FourierField& xi, int N) {
    double lo = 0.0, hi = 0.0;
    for (int n = -xi.n_max(); n <= xi.n_max(); ++n) {
        double w = symbol_A(n) * std::norm(xi(n));
        (std::abs(n) <= N ? lo : hi) += w;
    }
    return two_pi * (hi - lo);
}

inline double alpha_bar(int N) { return 0.5 * (eigenvalue(2 * N + 1) + eigenvalue(2 * N)); }

inline double alpha_of_w(const FourierField& w, int N, double R) {
    double a = alpha_bar(N);
    if (sobolev_norm(project_PK(w, std::min(N, w.n_max())), 2.0) <= 2.0 * R) return a;
    return a - 0.25 * eigenvalue(2 * N);
}

inline double default_mu(int N) {
    double l0 = eigenvalue(2 * N), l1 = eigenvalue(2 * N + 1);
    return (l1 - l0) / (16.0 * l1);
}

// ---------------------------------------------------------------------------
// Co-integration of w and xi; the derivative of the nonlinear part is a
// central difference in direction xi.

struct ConeOptions {
    double mu = -1.0;  // < 0: default_mu(N)
    double dt = 1e-3;
    double fd_h = 1e-5;
    double inverse_tol = 1e-13;
    double tol = 1e-6;
    double pre_run = 0.0;  // settle w before measuring
    int stride = 1;
};

struct TangentFlow {
    const TransformedSystem* sys;
    double h;
    mutable std::vector<double> warm;
    int n_components() const { return 2; }
    cplx linear_symbol(int n, int) const { return -symbol_A(n); }

    FourierField derivative_along(const FourierField& w, const FourierField& xi) const {
        double s = h / std::max(phi_norm(xi), 1e-300);
        std::vector<double> wp = warm, wm = warm;
        FourierField plus = transformed_nonlinear(w + s * xi, *sys, &wp);
        FourierField minus = transformed_nonlinear(w - s * xi, *sys, &wm);
        return (plus - minus) * (0.5 / s);
    }

    FourierField nonlinear(double, const FourierField& z) const {
        FourierField w = z.extract(0), xi = z.extract(1);
        FourierField out(z.n_max(), 2);
        out.assign(0, transformed_nonlinear(w, *sys, &warm));
        out.assign(1, derivative_along(w, xi));
        return out;
    }
};

struct ConeReport {
    std::vector<double> times;
    std::vector<double> V_values;
    std::vector<double> alpha_values;
    std::vector<double> residuals;             // 1/2 V' + alpha V + mu ||xi||_{H^2}^2, ||xi||_Phi = 1
    std::vector<double> integrated_residuals;  // per step, same normalization
    std::vector<int> regime;                   // 1: ||P_N w||_{H^2} > 2R
    double mu = 0.0;
    int N = 0;
    double tol = 1e-6;
    int violations = 0;
    double max_residual = -std::numeric_limits<double>::infinity();
    double max_integrated = -std::numeric_limits<double>::infinity();
    bool blowup = false;

    bool pass() const { return !blowup && violations == 0; }
};

// Exact 1/2 dV/dt at (w, xi) from the right-hand side of the tangent flow.
inline double half_dV(const FourierField& xi, const FourierField& xi_t, int N) {
    double s = 0.0;
    for (int n = -xi.n_max(); n <= xi.n_max(); ++n) {
        double w = symbol_A(n) * (std::conj(xi(n)) * xi_t(n)).real();
        s += std::abs(n) <= N ? -w : w;
    }
    return two_pi * s;
}

inline double h2_sq(const FourierField& xi) {
    double s = sobolev_norm(xi, 2.0);
    return s * s;
}

inline ConeReport cone_run(const FourierField& w0, const FourierField& xi0, double t_end, const TransformedSystem& sys_in,
                           const ConeOptions& opt = {}) {
    TransformedSystem sys = sys_in;
    sys.inverse.tol = std::min(sys.inverse.tol, opt.inverse_tol);
    int N = sys.N;
    ConeReport rep;
    rep.N = N;
    rep.mu = opt.mu < 0.0 ? default_mu(N) : opt.mu;
    rep.tol = opt.tol;
    double R = sys.R();

    FourierField w = w0;
    if (opt.pre_run > 0.0) w = integrate_system(TransformedFlow{&sys, {}}, w0, 0.0, opt.pre_run, opt.dt).final_state();

    TangentFlow flow{&sys, opt.fd_h, {}};
    long steps = std::max(1L, std::lround(t_end / opt.dt));
    double dt = t_end / double(steps);
    Etdrk4<TangentFlow> stepper(flow, w.n_max(), dt);
    FourierField z(w.n_max(), 2);
    z.assign(0, w);
    z.assign(1, xi0 * (1.0 / phi_norm(xi0)));

    auto record = [&](double t, const FourierField& zz) {
        FourierField ww = zz.extract(0), xi = zz.extract(1);
        FourierField xi_t = flow.derivative_along(ww, xi) - apply_A(xi);
        double a = alpha_of_w(ww, N, R);
        double V = V_form(xi, N);
        double r = half_dV(xi, xi_t, N) + a * V + rep.mu * h2_sq(xi);
        rep.times.push_back(t);
        rep.V_values.push_back(V);
        rep.alpha_values.push_back(a);
        rep.residuals.push_back(r);
        rep.regime.push_back(a < alpha_bar(N) ? 1 : 0);
        rep.max_residual = std::max(rep.max_residual, r);
        if (r > opt.tol) ++rep.violations;
    };

    record(0.0, z);
    for (long k = 1; k <= steps; ++k) {
        double t = double(k - 1) * dt;
        FourierField xi0k = z.extract(1);
        double a = alpha_of_w(z.extract(0), N, R);
        double V0 = V_form(xi0k, N), h0 = h2_sq(xi0k);
        try {
            z = stepper.step(z, t);
            check_finite(z, t + dt);
        } catch (const DivergenceError&) {
            rep.blowup = true;
            return rep;
        }
        FourierField xi1 = z.extract(1);
        double decay = std::exp(-2.0 * a * dt);
        double ir = V_form(xi1, N) - decay * V0 + rep.mu * dt * (decay * h0 + h2_sq(xi1));
        rep.integrated_residuals.push_back(ir);
        rep.max_integrated = std::max(rep.max_integrated, ir);
        if (ir > opt.tol) ++rep.violations;
        // renormalize the tangent vector; the inequality is quadratic in xi
        double nx = phi_norm(xi1);
        z.assign(1, xi1 * (1.0 / nx));
        if (k % opt.stride == 0 || k == steps) record(t + dt, z);
    }
    return rep;
}

inline void write_cone_csv(std::ostream& os, const ConeReport& r) {
    full_precision(os) << "t,V,alpha,residual,regime\n";
    for (std::size_t i = 0; i < r.times.size(); ++i)
        os << r.times[i] << ',' << r.V_values[i] << ',' << r.alpha_values[i] << ',' << r.residuals[i] << ','
           << r.regime[i] << '\n';
}


struct ConeCampaign {
    std::vector<ConeReport> runs;
    int violations = 0;
    int blowups = 0;
    double max_residual = -std::numeric_limits<double>::infinity();
    double max_integrated = -std::numeric_limits<double>::infinity();
    bool pass() const { return violations == 0 && blowups == 0; }
};

inline ConeCampaign cone_campaign(const std::vector<FourierField>& w0s, const std::vector<FourierField>& xi0s,
                                  double t_end, const TransformedSystem& sys, const ConeOptions& opt = {}) {
    ConeCampaign c;
    c.runs.resize(w0s.size());
    parallel_for(w0s.size(), [&](std::size_t i) { c.runs[i] = cone_run(w0s[i], xi0s[i], t_end, sys, opt); });
    for (const auto& r : c.runs) {
        c.violations += r.violations;
        c.blowups += r.blowup ? 1 : 0;
        c.max_residual = std::max(c.max_residual, r.max_residual);
        c.max_integrated = std::max(c.max_integrated, r.max_integrated);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Gap bookkeeping: the five bracketed coefficients must be non-negative.

struct EmpiricalConstants {
    double C_K = 0.0;      // Lipschitz constant of the smooth remainder, H^1 -> H^1
    double C = 0.0;        // Lip(F1) * sqrt(K)
    double C_tilde = 0.0;  // Lip(Theta) * sup ||w||_{H^{7/4}} on the invariant set
    double C_bar1 = 0.0;   // sup ||Theta'(w)|| ||w||_{H^1}
};

struct GapAudit {
    int N = 0;
    int K = 0;
    EmpiricalConstants constants;
    std::array<double, 5> brackets{};
    bool all_nonnegative = false;
    int minimal_N = -1;  // -1: none up to the scan limit
};

inline std::array<double, 5> gap_brackets(int N, int K, const EmpiricalConstants& c) {
    double l0 = eigenvalue(2 * N), l1 = eigenvalue(2 * N + 1), gap = l1 - l0;
    double k_term = 2.0 * c.C * c.C / (double(K) * gap);
    return {
        gap / 8.0 - c.C_K,
        (std::pow(l1, 0.75) - std::pow(l0, 0.75)) / 8.0 - c.C_tilde,
        gap / (16.0 * l1) - k_term,
        l0 / 4.0 - c.C_bar1 * c.C_bar1 * 8.0 * l1 / gap,
        gap / (32.0 * l1) - k_term,
    };
}

inline GapAudit gap_audit(int N, int K, const EmpiricalConstants& c, int scan_limit = 4096) {
    GapAudit a;
    a.N = N;
    a.K = K;
    a.constants = c;
    a.brackets = gap_brackets(N, K, c);
    a.all_nonnegative = std::all_of(a.brackets.begin(), a.brackets.end(), [](double b) { return b >= 0.0; });
    for (int n = 1; n <= scan_limit; ++n) {
        auto b = gap_brackets(n, K, c);
        if (std::all_of(b.begin(), b.end(), [](double v) { return v >= 0.0; })) {
            a.minimal_N = n;
            break;
        }
    }
    return a;
}

inline nlohmann::json to_json(const GapAudit& a) {
    static const char* names[5] = {"h1_remainder", "h54_advection", "h2_case1", "h1_case2", "h2_case2"};
    nlohmann::json j;
    j["N"] = a.N;
    j["K"] = a.K;
    j["constants"] = {{"C_K", a.constants.C_K},
                      {"C", a.constants.C},
                      {"C_tilde", a.constants.C_tilde},
                      {"C_bar1", a.constants.C_bar1}};
    for (int i = 0; i < 5; ++i) j["brackets"][names[i]] = a.brackets[i];
    j["all_nonnegative"] = a.all_nonnegative;
    j["minimal_N"] = a.minimal_N;
    return j;
}

struct ProbeSamples {
    std::vector<FourierField> ws, ds;
    std::size_t settled = 0;  // leading entries of ws that are smooth (invariant-set) samples
};

// Random ball fields plus band-limited extremals on (k, 2k] for k = 2, 4, ...
inline ProbeSamples probe_samples(int n_max, double radius, std::mt19937_64& rng, int random_count = 20) {
    ProbeSamples p;
    for (int i = 0; i < random_count; ++i) {
        p.ws.push_back(random_ball_field(n_max, rng, radius, 0.3));
        p.ds.push_back(random_sphere_field(n_max, rng, 1.0, 0.1));
    }
    p.settled = p.ws.size();
    for (int k = 2; 2 * k <= n_max; k *= 2) {
        p.ws.push_back(band_sample(n_max, k, 0.0, 0.75 * radius));
        p.ds.push_back(band_sample(n_max, k, 0.0, 1.0));
    }
    return p;
}

// Probes the transformed system on H^1 samples to fill EmpiricalConstants.
// The H^{7/4} supremum is taken over the first `settled` samples only.
inline EmpiricalConstants measure_constants(const TransformedSystem& sys, const std::vector<FourierField>& ws,
                                            const std::vector<FourierField>& ds, std::size_t settled, double h = 1e-4) {
    TransformedSystem s = sys;
    s.enable_T = false;
    EmpiricalConstants c;
    c.C_K = lipschitz_F2(ws, ds, s, h);
    c.C = lipschitz_F1(ws, ds, s, h) * std::sqrt(double(sys.K));
    double lip_theta = lipschitz_Theta(ws, ds, s, h);
    double sup74 = 0.0;
    for (std::size_t i = 0; i < std::min(settled, ws.size()); ++i) sup74 = std::max(sup74, sobolev_norm(ws[i], 1.75));
    c.C_tilde = lip_theta * sup74;
    c.C_bar1 = lip_theta * std::sqrt(sys.theta.hi);
    return c;
}

inline EmpiricalConstants measure_constants(const TransformedSystem& sys, const ProbeSamples& p, double h = 1e-4) {
    return measure_constants(sys, p.ws, p.ds, p.settled, h);
}

}  // namespace rdalab
