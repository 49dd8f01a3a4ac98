#pragma once

#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>

#include "etdrk4.hpp"
#include "nonlinearity.hpp"
#include "spectral.hpp"

namespace rdalab {

// u_t - u_xx + [u] + f(u) u_x + g(u) = 0 for a real m-vector u.
struct RDASystem {
    using MatrixFn = std::function<void(const double* u, double t, double x, double* out)>;
    using DirFn = std::function<void(const double* u, const double* d, double t, double x, double* out)>;

    int m = 1;
    bool include_linear_u = true;
    // m == 1: scalar maps; m > 1: row-major matrix f, vector g and their directional derivatives.
    ScalarMap scalar_f = zero_map();
    ScalarMap scalar_g = zero_map();
    MatrixFn f;
    MatrixFn g;
    DirFn df;
    DirFn dg;
    double support_radius = 0.0;  // 0: no compact support claimed

    bool scalar() const { return m == 1; }
};

inline RDASystem scalar_system(ScalarMap f, ScalarMap g, bool include_linear_u = true, double support_radius = 0.0) {
    RDASystem s;
    s.m = 1;
    s.include_linear_u = include_linear_u;
    s.scalar_f = std::move(f);
    s.scalar_g = std::move(g);
    s.support_radius = support_radius;
    return s;
}

// Named systems from the catalog, all with the same cut-off radius.
inline RDASystem catalog_system(const std::string& f_kind, double f_amp, const std::string& g_kind, double g_amp,
                                double cutoff_radius, bool include_linear_u = true, double scale = 1.0) {
    return scalar_system(with_cutoff(catalog_map(f_kind, f_amp, scale), cutoff_radius),
                         with_cutoff(catalog_map(g_kind, g_amp, scale), cutoff_radius), include_linear_u,
                         cutoff_radius > 0.0 ? 2.0 * cutoff_radius : 0.0);
}

// Samples f, g outside the support ball; true when both vanish there.
inline bool check_compact_support(const RDASystem& s, int samples = 200) {
    if (s.support_radius <= 0.0) return false;
    std::vector<double> u(s.m), fo(s.m * s.m), go(s.m);
    for (int k = 0; k < samples; ++k) {
        double r = s.support_radius * (1.0 + 0.05 * k);
        for (int sign : {-1, 1}) {
            for (int i = 0; i < s.m; ++i) u[i] = sign * r / std::sqrt(double(s.m));
            if (s.scalar()) {
                if (s.scalar_f(u[0]) != 0.0 || s.scalar_g(u[0]) != 0.0) return false;
            } else {
                s.f(u.data(), 0.0, 0.0, fo.data());
                s.g(u.data(), 0.0, 0.0, go.data());
                for (double v : fo)
                    if (v != 0.0) return false;
                for (double v : go)
                    if (v != 0.0) return false;
            }
        }
    }
    return true;
}

// -(f(u) u_x + g(u)) on the dealiased grid.
inline FourierField rda_nonlinear(const RDASystem& s, double t, const FourierField& u) {
    int m = s.m;
    if (u.n_components() != m) throw ConfigError("rda_nonlinear: component mismatch");
    FourierField ux = derivative(u);
    if (s.scalar()) {
        const auto& f = s.scalar_f;
        const auto& g = s.scalar_g;
        bool fz = f.is_zero(), gz = g.is_zero();
        if (fz && gz) return FourierField(u.n_max(), 1);
        return pointwise_apply({&u, &ux}, 1, [&](const cplx* in, cplx* out, double) {
            double v = in[0].real();
            double r = 0.0;
            if (!fz) r -= f(v) * in[1].real();
            if (!gz) r -= g(v);
            out[0] = r;
        });
    }
    std::vector<double> uv(m), fo(m * m), go(m);
    return pointwise_apply({&u, &ux}, m, [&](const cplx* in, cplx* out, double x) {
        for (int i = 0; i < m; ++i) uv[i] = in[i].real();
        s.f(uv.data(), t, x, fo.data());
        s.g(uv.data(), t, x, go.data());
        for (int i = 0; i < m; ++i) {
            double r = -go[i];
            for (int j = 0; j < m; ++j) r -= fo[i * m + j] * in[m + j].real();
            out[i] = r;
        }
    });
}

// Linearization about u applied to xi: -(f'(u)[xi] u_x + f(u) xi_x + g'(u) xi).
inline FourierField rda_nonlinear_derivative(const RDASystem& s, double t, const FourierField& u,
                                             const FourierField& xi) {
    int m = s.m;
    FourierField ux = derivative(u);
    FourierField xix = derivative(xi);
    if (s.scalar()) {
        const auto& f = s.scalar_f;
        const auto& g = s.scalar_g;
        return pointwise_apply({&u, &ux, &xi, &xix}, 1, [&](const cplx* in, cplx* out, double) {
            double v = in[0].real();
            out[0] = -(f.derivative(v) * in[2] * in[1].real() + f(v) * in[3] + g.derivative(v) * in[2]);
        });
    }
    std::vector<double> uv(m), dv(m), fo(m * m), dfo(m * m), dgo(m);
    return pointwise_apply({&u, &ux, &xi, &xix}, m, [&](const cplx* in, cplx* out, double x) {
        for (int i = 0; i < m; ++i) {
            uv[i] = in[i].real();
            dv[i] = in[2 * m + i].real();
        }
        s.f(uv.data(), t, x, fo.data());
        s.df(uv.data(), dv.data(), t, x, dfo.data());
        s.dg(uv.data(), dv.data(), t, x, dgo.data());
        for (int i = 0; i < m; ++i) {
            double r = -dgo[i];
            for (int j = 0; j < m; ++j) r -= dfo[i * m + j] * in[m + j].real() + fo[i * m + j] * in[3 * m + j].real();
            out[i] = r;
        }
    });
}

// Adapter for the integrator.
struct RdaFlow {
    const RDASystem* sys;
    int n_components() const { return sys->m; }
    cplx linear_symbol(int n, int) const { return -(double(n) * n + (sys->include_linear_u ? 1.0 : 0.0)); }
    FourierField nonlinear(double t, const FourierField& u) const { return rda_nonlinear(*sys, t, u); }
};

// State and tangent vector stacked as 2m components.
struct RdaVariationalFlow {
    const RDASystem* sys;
    int n_components() const { return 2 * sys->m; }
    cplx linear_symbol(int n, int) const { return -(double(n) * n + (sys->include_linear_u ? 1.0 : 0.0)); }
    FourierField nonlinear(double t, const FourierField& z) const {
        int m = sys->m;
        FourierField u(z.n_max(), m), xi(z.n_max(), m);
        for (int c = 0; c < m; ++c) {
            u.assign(c, z, c);
            xi.assign(c, z, m + c);
        }
        FourierField nu = rda_nonlinear(*sys, t, u);
        FourierField nxi = rda_nonlinear_derivative(*sys, t, u, xi);
        FourierField out(z.n_max(), 2 * m);
        for (int c = 0; c < m; ++c) {
            out.assign(c, nu, c);
            out.assign(m + c, nxi, c);
        }
        return out;
    }
};

inline void check_finite(const FourierField& u, double t, double blowup = 1e12) {
    if (!u.all_finite()) throw DivergenceError("non-finite state", t);
    for (const auto& c : u.data())
        if (std::abs(c) > blowup) throw DivergenceError("state exceeded blow-up threshold", t);
}

inline FourierField step(const FourierField& u, double t, double dt, const RDASystem& sys) {
    RdaFlow flow{&sys};
    Etdrk4<RdaFlow> stepper(flow, u.n_max(), dt);
    FourierField out = stepper.step(u, t);
    check_finite(out, t + dt);
    return out;
}

struct Trajectory {
    std::vector<double> times;
    std::vector<FourierField> states;
    double dt = 0.0;
    std::string dt_policy = "fixed";
    bool diverged = false;
    double divergence_time = 0.0;

    const FourierField& final_state() const { return states.back(); }
};

struct IntegrateOptions {
    int stride = 1;
    bool stop_on_divergence = false;  // return partial trajectory instead of throwing
    double blowup = 1e12;
};

// Fixed-step integration of any semilinear system; dt is adjusted so that
// an integer number of steps lands on t1.
template <SemilinearSystem System>
Trajectory integrate_system(const System& sys, const FourierField& u0, double t0, double t1, double dt,
                            const IntegrateOptions& opt = {}) {
    if (!(t1 > t0)) throw ConfigError("integrate: t1 must exceed t0");
    long steps = std::max(1L, std::lround((t1 - t0) / dt));
    double h = (t1 - t0) / double(steps);
    Etdrk4<System> stepper(sys, u0.n_max(), h);
    Trajectory tr;
    tr.dt = h;
    tr.times.push_back(t0);
    tr.states.push_back(u0);
    FourierField u = u0;
    for (long k = 1; k <= steps; ++k) {
        double t = t0 + double(k - 1) * h;
        u = stepper.step(u, t);
        try {
            check_finite(u, t + h, opt.blowup);
        } catch (const DivergenceError&) {
            if (!opt.stop_on_divergence) throw;
            tr.diverged = true;
            tr.divergence_time = t + h;
            return tr;
        }
        if (k % opt.stride == 0 || k == steps) {
            tr.times.push_back(k == steps ? t1 : t0 + double(k) * h);
            tr.states.push_back(u);
        }
    }
    return tr;
}

inline Trajectory integrate(const FourierField& u0, double t0, double t1, const RDASystem& sys, double dt,
                            const IntegrateOptions& opt = {}) {
    return integrate_system(RdaFlow{&sys}, u0, t0, t1, dt, opt);
}

// Advances (state, xi) jointly; returns the new xi and updates state in place.
inline FourierField variational_step(FourierField& state, const FourierField& xi, double t, double dt,
                                     const RDASystem& sys) {
    int m = sys.m;
    FourierField z(state.n_max(), 2 * m);
    for (int c = 0; c < m; ++c) {
        z.assign(c, state, c);
        z.assign(m + c, xi, c);
    }
    RdaVariationalFlow flow{&sys};
    Etdrk4<RdaVariationalFlow> stepper(flow, state.n_max(), dt);
    FourierField next = stepper.step(z, t);
    check_finite(next, t + dt);
    FourierField out(state.n_max(), m);
    for (int c = 0; c < m; ++c) {
        state.assign(c, next, c);
        out.assign(c, next, m + c);
    }
    return out;
}

inline Trajectory integrate_variational(const FourierField& u0, const FourierField& xi0, double t0, double t1,
                                        const RDASystem& sys, double dt, const IntegrateOptions& opt = {}) {
    int m = sys.m;
    FourierField z(u0.n_max(), 2 * m);
    for (int c = 0; c < m; ++c) {
        z.assign(c, u0, c);
        z.assign(m + c, xi0, c);
    }
    return integrate_system(RdaVariationalFlow{&sys}, z, t0, t1, dt, opt);
}

// ---------------------------------------------------------------------------
// Dissipativity and smoothing monitors

struct NormSample {
    double t, l2, h1, h2;
};

// ||u(t)||^2 <= C ||u(0)||^2 e^{-delta t} + C_star
struct BoundFit {
    double C = 1.0;
    double delta = 0.0;
    double C_star = 0.0;
    bool violated = false;
};

struct DissipativityReport {
    std::vector<NormSample> norms;
    BoundFit l2, h1, h2;
    double smoothing_Q = 0.0;  // sup of t^{1/2} ||u(t)||_{H^2} on (0, 1]
    bool smoothing_violated = false;
    bool diverged = false;
    double tolerance = 0.05;

    bool any_violation() const {
        return diverged || l2.violated || h1.violated || h2.violated || smoothing_violated;
    }
};

namespace detail {

inline double slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
    double n = double(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline BoundFit fit_bound(const std::vector<double>& t, const std::vector<double>& y, double tol) {
    BoundFit fit;
    std::size_t n = y.size();
    for (double v : y)
        if (!std::isfinite(v)) {
            fit.violated = true;
            return fit;
        }
    if (n < 4) return fit;
    std::size_t q = std::max<std::size_t>(1, n / 4);
    double head = *std::max_element(y.begin(), y.begin() + q);
    double tail = *std::max_element(y.end() - q, y.end());
    fit.C_star = tail * (1.0 + tol);
    std::vector<double> ts, ls;
    for (std::size_t i = 0; i < n; ++i)
        if (y[i] > 2.0 * fit.C_star && y[i] > 0.0) {
            ts.push_back(t[i] - t[0]);
            ls.push_back(std::log(y[i] - fit.C_star));
        }
    if (ts.size() >= 3) fit.delta = -slope_fit(ts, ls);
    double y0 = std::max(y[0], 1e-300);
    fit.C = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        double excess = y[i] - fit.C_star;
        if (excess > 0) fit.C = std::max(fit.C, excess / (y0 * std::exp(-fit.delta * (t[i] - t[0]))));
    }
    // Growth from the initial window into the tail is the failure mode.
    fit.violated = tail > (1.0 + tol) * head && tail > (1.0 + tol) * y[0];
    if (ts.size() >= 3 && fit.delta <= 0.0) fit.violated = true;
    return fit;
}

}  // namespace detail

inline std::vector<NormSample> norm_series(const Trajectory& tr) {
    std::vector<NormSample> out;
    out.reserve(tr.times.size());
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        out.push_back({tr.times[i], l2_norm(tr.states[i]), sobolev_norm(tr.states[i], 1.0),
                       sobolev_norm(tr.states[i], 2.0)});
    return out;
}

inline DissipativityReport dissipativity_report(const Trajectory& tr, double tol = 0.05) {
    DissipativityReport rep;
    rep.tolerance = tol;
    rep.diverged = tr.diverged;
    rep.norms = norm_series(tr);
    std::vector<double> t, a, b, c;
    for (const auto& s : rep.norms) {
        t.push_back(s.t);
        a.push_back(s.l2 * s.l2);
        b.push_back(s.h1 * s.h1);
        c.push_back(s.h2 * s.h2);
    }
    rep.l2 = detail::fit_bound(t, a, tol);
    rep.h1 = detail::fit_bound(t, b, tol);
    rep.h2 = detail::fit_bound(t, c, tol);
    if (tr.diverged) rep.l2.violated = rep.h1.violated = rep.h2.violated = true;

    // Smoothing: t^{1/2}||u||_{H^2} must stay bounded as t -> 0.
    double t0 = t.empty() ? 0.0 : t.front();
    std::vector<std::pair<double, double>> sm;
    for (const auto& s : rep.norms)
        if (s.t > t0 && s.t - t0 <= 1.0) sm.push_back({s.t - t0, std::sqrt(s.t - t0) * s.h2});
    for (auto [tt, v] : sm) {
        if (!std::isfinite(v)) rep.smoothing_violated = true;
        rep.smoothing_Q = std::max(rep.smoothing_Q, v);
    }
    // Judged only when early times are resolved: growth toward t -> 0 over the
    // first samples means t^{1/2} ||u||_{H^2} is not bounded there.
    if (sm.size() >= 3 && sm[0].first <= 1e-2 && sm[0].second > (1.0 + tol) * sm[1].second &&
        sm[1].second > (1.0 + tol) * sm[2].second)
        rep.smoothing_violated = true;
    return rep;
}

// Smallest C with d(t) <= e^{C t} d(0) along a difference series.
inline double fit_lipschitz_growth(const std::vector<double>& t, const std::vector<double>& d) {
    double c = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < t.size(); ++i)
        if (t[i] > t[0] && d[0] > 0.0) c = std::max(c, std::log(d[i] / d[0]) / (t[i] - t[0]));
    return c;
}

inline void write_norm_series_csv(std::ostream& os, const std::vector<NormSample>& s) {
    os << std::setprecision(17) << "t,L2,H1,H2\n";
    for (const auto& r : s) os << r.t << ',' << r.l2 << ',' << r.h1 << ',' << r.h2 << '\n';
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << std::setprecision(17) << "t,component,n,re,im\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const auto& u = tr.states[i];
        for (int c = 0; c < u.n_components(); ++c)
            for (int n = -u.n_max(); n <= u.n_max(); ++n)
                os << tr.times[i] << ',' << c << ',' << n << ',' << u(n, c).real() << ',' << u(n, c).imag() << '\n';
    }
}

}  // namespace rdalab
