#pragma once

#include "diffeo.hpp"

namespace rdalab {

// Cut-off in z = ||(d_xx - 1) P_N w||^2: 0 below R^2, -1/2 above 4R^2.
struct HighModeCutoff {
    double R = 1.0;
    double operator()(double z) const { return -0.5 * smoothstep((z - R * R) / (3.0 * R * R)); }
    double derivative(double z) const { return -0.5 * smoothstep_derivative((z - R * R) / (3.0 * R * R)) / (3.0 * R * R); }
};

struct TransformedSystem {
    RDASystem base;
    int K = 32;
    Plateau theta{25.0, 50.0};  // in ||w||^2_{H^1}: 1 below C Rbar, 0 above 2 C Rbar
    HighModeCutoff phi{10.0};
    int N = 4;
    bool enable_nonlinear = true;  // Theta, F1, F2
    bool enable_T = true;
    InverseOptions inverse;

    double R() const { return phi.R; }
};

// Thresholds (C Rbar, 2 C Rbar) for the H^1 ball cut-off.
inline Plateau ball_cutoff(double c_rbar) { return Plateau{c_rbar, 2.0 * c_rbar}; }

struct TransformedTerms {
    FourierField F1, F2;  // cut-off versions
    double Theta = 0.0;
    double theta_value = 0.0;
    DiffeoResult diffeo;
};

namespace detail {

inline std::vector<double> real_grid(const FourierField& u, int M) { return real_part(grid_of(u, M)); }

}  // namespace detail

// All w-dependent nonlinear terms from one inverse_a solve.
inline TransformedTerms transformed_terms(const FourierField& w, const TransformedSystem& sys,
                                          std::vector<double>* warm = nullptr) {
    int n_max = w.n_max();
    TransformedTerms out;
    out.F1 = FourierField(n_max);
    out.F2 = FourierField(n_max);
    if (!sys.enable_nonlinear) return out;
    double nw = phi_norm(w);
    out.theta_value = sys.theta(nw * nw);
    if (out.theta_value == 0.0) return out;
    const ScalarMap& f = sys.base.scalar_f;
    const ScalarMap& g = sys.base.scalar_g;
    int M = dealiased_size(n_max);
    auto wg = detail::real_grid(w, M);
    auto wxg = detail::real_grid(derivative(w), M);
    std::vector<double> a(M, 1.0), ax(M, 0.0), axx(M, 0.0), at(M, 0.0);
    FourierField u = w;
    if (!f.is_zero()) {
        InverseOptions opt = sys.inverse;
        if (warm) opt.warm_start = warm;
        out.diffeo = inverse_a(w, std::min(sys.K, n_max), f, opt);
        if (warm) *warm = out.diffeo.y_grid;
        a = out.diffeo.a_grid;
        ax = out.diffeo.dx_a_grid;
        axx = out.diffeo.dxx_a_grid;
        std::vector<double> aw(M);
        for (int j = 0; j < M; ++j) aw[j] = a[j] * wg[j];
        u = detail::real_field_of(aw, n_max);
        at = detail::real_grid(a_time_derivative(out.diffeo, u, sys.base), M);
    }
    auto ug = detail::real_grid(u, M);
    auto ukg = detail::real_grid(project_PK(u, std::min(sys.K, n_max)), M);
    std::vector<double> f1(M), f2(M);
    double mean = 0.0;
    for (int j = 0; j < M; ++j) {
        double fk = f(ukg[j]), fu = f(ug[j]);
        mean += fk;
        f1[j] = (fk - fu) * wxg[j];
        f2[j] = ((axx[j] - at[j] - fu * ax[j]) * wg[j] - g(ug[j])) / a[j];
    }
    mean /= M;
    out.Theta = out.theta_value * mean;
    out.F1 = detail::real_field_of(f1, n_max) * out.theta_value;
    out.F2 = detail::real_field_of(f2, n_max) * out.theta_value;
    return out;
}

inline FourierField F1(const FourierField& w, const TransformedSystem& sys) { return transformed_terms(w, sys).F1; }
inline FourierField F2(const FourierField& w, const TransformedSystem& sys) { return transformed_terms(w, sys).F2; }
inline double Theta(const FourierField& w, const TransformedSystem& sys) { return transformed_terms(w, sys).Theta; }

inline double T_argument(const FourierField& w, int N) {
    double s = sobolev_norm(project_PK(w, std::min(N, w.n_max())), 2.0);
    return s * s;
}

// phi(||(d_xx - 1) P_N w||^2) (d_xx - 1) P_N w
inline FourierField T_op(const FourierField& w, const TransformedSystem& sys) {
    if (!sys.enable_T) return FourierField(w.n_max(), w.n_components());
    FourierField low = project_PK(w, std::min(sys.N, w.n_max()));
    double c = sys.phi(T_argument(w, sys.N));
    return apply_A(low) * (-c);
}

// Everything except -A w.
inline FourierField transformed_nonlinear(const FourierField& w, const TransformedSystem& sys,
                                          std::vector<double>* warm = nullptr) {
    TransformedTerms t = transformed_terms(w, sys, warm);
    FourierField out = T_op(w, sys);
    if (t.theta_value != 0.0) {
        out.axpy(-t.Theta, derivative(w));
        out += t.F1;
        out += t.F2;
    }
    return out;
}

inline FourierField transformed_rhs(const FourierField& w, const TransformedSystem& sys) {
    return transformed_nonlinear(w, sys) - apply_A(w);
}

// Integrator adapter; keeps the last inverse solve as a warm start.
struct TransformedFlow {
    const TransformedSystem* sys;
    mutable std::vector<double> warm;
    int n_components() const { return 1; }
    cplx linear_symbol(int n, int) const { return -symbol_A(n); }
    FourierField nonlinear(double, const FourierField& w) const { return transformed_nonlinear(w, *sys, &warm); }
};

// ||W(S(t) u0) - S_tr(t) W(u0)||_{H^1}
struct ConjugacyReport {
    std::vector<double> times;
    std::vector<double> residual;
    double max_residual = 0.0;
};

inline ConjugacyReport conjugacy_check(const FourierField& u0, double t_end, const TransformedSystem& sys, double dt,
                                       int stride = 10) {
    const ScalarMap& f = sys.base.scalar_f;
    int K = std::min(sys.K, u0.n_max());
    Trajectory orig, trans;
    FourierField w0 = W_map(u0, K, f);
    // Independent integrations; run side by side.
    auto run_orig = [&] { orig = integrate(u0, 0.0, t_end, sys.base, dt, {.stride = stride}); };
    auto run_trans = [&] {
        TransformedFlow flow{&sys, {}};
        trans = integrate_system(flow, w0, 0.0, t_end, dt, {.stride = stride});
    };
    run_orig();
    run_trans();
    ConjugacyReport rep;
    for (std::size_t i = 0; i < orig.times.size(); ++i) {
        double r = phi_norm(W_map(orig.states[i], K, f) - trans.states[i]);
        rep.times.push_back(orig.times[i]);
        rep.residual.push_back(r);
        rep.max_residual = std::max(rep.max_residual, r);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Q_N tail bound: q(t) <= (q(0) - R)_+ e^{-alpha t} + R with q = ||Q_N w||_{H^{2-kappa}}

struct TailReport {
    std::vector<double> times;
    std::vector<double> tail;
    double alpha = 1.0;
    double R_min = 0.0;  // minimal feasible R_kappa for this alpha
};

inline double tail_norm(const FourierField& w, int N, double kappa) {
    return sobolev_norm(project_QK(w, std::min(N, w.n_max())), 2.0 - kappa);
}

inline double tail_bound(double q0, double R, double alpha, double t) {
    return std::max(q0 - R, 0.0) * std::exp(-alpha * t) + R;
}

inline TailReport qn_tail_check(const Trajectory& tr, double kappa, int N, double alpha = 1.0) {
    TailReport rep;
    rep.alpha = alpha;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        rep.times.push_back(tr.times[i] - tr.times.front());
        rep.tail.push_back(tail_norm(tr.states[i], N, kappa));
    }
    double q0 = rep.tail.front();
    auto feasible = [&](double R) {
        for (std::size_t i = 0; i < rep.tail.size(); ++i)
            if (rep.tail[i] > tail_bound(q0, R, alpha, rep.times[i]) * (1.0 + 1e-12)) return false;
        return true;
    };
    double hi = *std::max_element(rep.tail.begin(), rep.tail.end());
    if (feasible(0.0)) {
        rep.R_min = 0.0;
        return rep;
    }
    double lo = 0.0;
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    rep.R_min = hi;
    return rep;
}

// ---------------------------------------------------------------------------
// Empirical Lipschitz probes by central differences

// Band-limited extremal samples: coefficients 1/|n| on k < |n| <= 2k with a
// common phase centre, normalized in H^1.
inline FourierField band_sample(int n_max, int k, double x0, double radius) {
    FourierField u(n_max);
    for (int n = k + 1; n <= std::min(2 * k, n_max); ++n) {
        cplx c = std::exp(cplx(0.0, -n * x0)) / double(n);
        u(n) = c;
        u(-n) = std::conj(c);
    }
    return u * (radius / phi_norm(u));
}

struct LipschitzProbe {
    double value = 0.0;
    std::size_t argmax = 0;
};

// max over pairs of ||G(w + h d) - G(w - h d)|| / (2h ||d||_{H^1})
template <class Map, class Norm>
LipschitzProbe lipschitz_probe(const std::vector<FourierField>& ws, const std::vector<FourierField>& ds, Map&& G,
                               Norm&& out_norm, double h = 1e-4) {
    LipschitzProbe p;
    for (std::size_t i = 0; i < ws.size(); ++i) {
        const auto& d = ds[i % ds.size()];
        double v = out_norm(G(ws[i] + h * d) - G(ws[i] - h * d)) / (2.0 * h * phi_norm(d));
        if (v > p.value) {
            p.value = v;
            p.argmax = i;
        }
    }
    return p;
}

inline double lipschitz_F1(const std::vector<FourierField>& ws, const std::vector<FourierField>& ds,
                           const TransformedSystem& sys, double h = 1e-4) {
    return lipschitz_probe(ws, ds, [&](const FourierField& w) { return F1(w, sys); },
                           [](const FourierField& v) { return l2_norm(v); }, h)
        .value;
}

inline double lipschitz_F2(const std::vector<FourierField>& ws, const std::vector<FourierField>& ds,
                           const TransformedSystem& sys, double h = 1e-4) {
    return lipschitz_probe(ws, ds, [&](const FourierField& w) { return F2(w, sys); },
                           [](const FourierField& v) { return phi_norm(v); }, h)
        .value;
}

inline double lipschitz_Theta(const std::vector<FourierField>& ws, const std::vector<FourierField>& ds,
                              const TransformedSystem& sys, double h = 1e-4) {
    double best = 0.0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
        const auto& d = ds[i % ds.size()];
        double v = std::abs(Theta(ws[i] + h * d, sys) - Theta(ws[i] - h * d, sys)) / (2.0 * h * phi_norm(d));
        best = std::max(best, v);
    }
    return best;
}

}  // namespace rdalab
