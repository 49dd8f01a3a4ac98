#pragma once

#include <Eigen/Dense>

#include "rda.hpp"

namespace rdalab {

namespace detail {

// Spectral P_K of grid values (Nyquist slot dropped).
inline std::vector<cplx> grid_project(const std::vector<cplx>& values, int K) {
    int M = static_cast<int>(values.size());
    std::vector<cplx> spec = grid_spectrum(values.data(), M);
    for (int k = 0; k < M; ++k) {
        int n = slot_wavenumber(k, M);
        if (std::abs(n) > K || (M % 2 == 0 && k == M / 2)) spec[k] = 0.0;
    }
    return grid_values(spec);
}

// int_{-pi}^{x_j} (v - <v>) ds, exact for the trigonometric interpolant.
inline std::vector<cplx> grid_antiderivative(const std::vector<cplx>& values, cplx* mean = nullptr) {
    int M = static_cast<int>(values.size());
    std::vector<cplx> spec = grid_spectrum(values.data(), M);
    if (mean) *mean = spec[0];
    cplx at_left = 0.0;
    spec[0] = 0.0;
    for (int k = 1; k < M; ++k) {
        int n = slot_wavenumber(k, M);
        if (M % 2 == 0 && k == M / 2) {
            spec[k] = 0.0;
            continue;
        }
        spec[k] /= cplx(0.0, n);
        at_left += spec[k] * ((n % 2 == 0) ? 1.0 : -1.0);
    }
    std::vector<cplx> out = grid_values(spec);
    for (auto& v : out) v -= at_left;
    return out;
}

inline std::vector<cplx> grid_of(const FourierField& u, int M, int comp = 0) {
    std::vector<cplx> v(M);
    to_physical_component(u, comp, M, v.data());
    return v;
}

inline FourierField field_of(const std::vector<cplx>& v, int n_max) {
    FourierField out(n_max);
    from_physical_component(v.data(), static_cast<int>(v.size()), out, 0);
    return out;
}

inline FourierField real_field_of(const std::vector<double>& v, int n_max) {
    std::vector<cplx> c(v.begin(), v.end());
    FourierField out = field_of(c, n_max);
    out.make_real();
    return out;
}

inline double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// (1 - e^{-z}) / z, stable near 0.
inline cplx one_minus_exp_over(cplx z) {
    if (std::abs(z) < 1e-4) return 1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0;
    return (1.0 - std::exp(-z)) / z;
}

}  // namespace detail

struct DiffeoResult {
    FourierField a, a_inv, dx_a, dxx_a, dt_a;
    std::vector<double> a_grid, y_grid, dx_a_grid, dxx_a_grid;
    int K = 0;
    int M = 0;
    int iterations = 0;
    double residual = 0.0;
    bool newton_used = false;

    // ||a||_{W^{1,inf}} + ||a^{-1}||_{W^{1,inf}} on the grid
    double w1inf_bound() const {
        double a_sup = detail::sup_abs(a_grid), ax_sup = detail::sup_abs(dx_a_grid);
        double ai_sup = 0.0, aix_sup = 0.0;
        for (std::size_t j = 0; j < a_grid.size(); ++j) {
            ai_sup = std::max(ai_sup, 1.0 / a_grid[j]);
            aix_sup = std::max(aix_sup, std::abs(dx_a_grid[j]) / (a_grid[j] * a_grid[j]));
        }
        return a_sup + ax_sup + ai_sup + aix_sup;
    }
};

namespace detail {

// Fills a, a^{-1}, a_x, a_xx from y and the projected field P_K u on the grid.
inline void finish_diffeo(DiffeoResult& r, const std::vector<double>& y, const std::vector<double>& uK,
                          const std::vector<double>& uK_x, const ScalarMap& f, int n_max) {
    int M = static_cast<int>(y.size());
    r.M = M;
    r.y_grid = y;
    r.a_grid.resize(M);
    r.dx_a_grid.resize(M);
    r.dxx_a_grid.resize(M);
    std::vector<double> fv(M), ainv(M);
    double mean = 0.0;
    for (int j = 0; j < M; ++j) {
        fv[j] = f(uK[j]);
        mean += fv[j];
    }
    mean /= M;
    for (int j = 0; j < M; ++j) {
        double a = std::exp(y[j]);
        double s = 0.5 * (fv[j] - mean);
        r.a_grid[j] = a;
        ainv[j] = 1.0 / a;
        r.dx_a_grid[j] = s * a;
        r.dxx_a_grid[j] = s * s * a + 0.5 * a * f.derivative(uK[j]) * uK_x[j];
    }
    r.a = real_field_of(r.a_grid, n_max);
    r.a_inv = real_field_of(ainv, n_max);
    r.dx_a = real_field_of(r.dx_a_grid, n_max);
    r.dxx_a = real_field_of(r.dxx_a_grid, n_max);
}

inline std::vector<double> real_part(const std::vector<cplx>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
    return out;
}

}  // namespace detail

// a(u) = exp(1/2 int_{-pi}^x f(P_K u) - <f(P_K u)>).
inline DiffeoResult forward_a(const FourierField& u, int K, const ScalarMap& f) {
    if (u.n_components() != 1) throw ConfigError("forward_a: scalar field required");
    FourierField uK = project_PK(u, K);
    int M = dealiased_size(u.n_max());
    auto uK_grid = detail::real_part(detail::grid_of(uK, M));
    auto uKx_grid = detail::real_part(detail::grid_of(derivative(uK), M));
    std::vector<cplx> fv(M);
    for (int j = 0; j < M; ++j) fv[j] = f(uK_grid[j]);
    auto Y = detail::grid_antiderivative(fv);
    std::vector<double> y(M);
    for (int j = 0; j < M; ++j) {
        y[j] = 0.5 * Y[j].real();
        if (!std::isfinite(y[j])) throw ResolutionError("forward_a: non-finite exponent");
    }
    DiffeoResult r;
    r.K = K;
    detail::finish_diffeo(r, y, uK_grid, uKx_grid, f, u.n_max());
    return r;
}

// w = u / a(u)
inline FourierField W_map(const FourierField& u, int K, const ScalarMap& f) {
    if (f.is_zero()) return u;
    DiffeoResult r = forward_a(u, K, f);
    auto ug = detail::real_part(detail::grid_of(u, r.M));
    for (int j = 0; j < r.M; ++j) ug[j] /= r.a_grid[j];
    return detail::real_field_of(ug, u.n_max());
}

struct InverseOptions {
    int max_iter = 200;
    double tol = 1e-10;
    double damping = 0.8;
    bool newton_fallback = true;
    int newton_max_iter = 30;
    const std::vector<double>* warm_start = nullptr;
};

namespace detail {

// I(y) = 1/2 int (f(P_K(e^y w)) - mean); also returns P_K(e^y w) on the grid.
struct InverseMap {
    const std::vector<double>& w;
    int K;
    int n_max;
    const ScalarMap& f;

    // u = trunc_{N_max}(e^y w), then P_K. K >= N_max leaves the truncation.
    std::vector<double> projected(const std::vector<double>& y) const {
        int M = static_cast<int>(w.size());
        std::vector<cplx> p(M);
        for (int j = 0; j < M; ++j) p[j] = std::exp(y[j]) * w[j];
        return real_part(grid_project(p, std::min(K, n_max)));
    }

    std::vector<double> operator()(const std::vector<double>& y, std::vector<double>* uK = nullptr) const {
        int M = static_cast<int>(w.size());
        auto u = projected(y);
        std::vector<cplx> fv(M);
        for (int j = 0; j < M; ++j) fv[j] = f(u[j]);
        auto Y = grid_antiderivative(fv);
        std::vector<double> out(M);
        for (int j = 0; j < M; ++j) out[j] = 0.5 * Y[j].real();
        if (uK) *uK = std::move(u);
        return out;
    }

    // Derivative of I at y applied to d.
    std::vector<double> jacobian_apply(const std::vector<double>& y, const std::vector<double>& uK,
                                       const std::vector<double>& d) const {
        int M = static_cast<int>(w.size());
        std::vector<cplx> p(M);
        for (int j = 0; j < M; ++j) p[j] = std::exp(y[j]) * w[j] * d[j];
        auto pk = grid_project(p, std::min(K, n_max));
        std::vector<cplx> fv(M);
        for (int j = 0; j < M; ++j) fv[j] = f.derivative(uK[j]) * pk[j].real();
        auto Y = grid_antiderivative(fv);
        std::vector<double> out(M);
        for (int j = 0; j < M; ++j) out[j] = 0.5 * Y[j].real();
        return out;
    }
};

inline double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace detail

// Solves y = I(y) for a = e^y by damped fixed-point iteration, with a dense
// Newton fallback when the iteration stalls.
inline DiffeoResult inverse_a(const FourierField& w, int K, const ScalarMap& f, const InverseOptions& opt = {}) {
    if (w.n_components() != 1) throw ConfigError("inverse_a: scalar field required");
    if (K > w.n_max()) throw TruncationError("inverse_a: K exceeds N_max");
    int M = dealiased_size(w.n_max());
    auto wg = detail::real_part(detail::grid_of(w, M));
    detail::InverseMap I{wg, K, w.n_max(), f};
    std::vector<double> y(M, 0.0);
    if (opt.warm_start && static_cast<int>(opt.warm_start->size()) == M) y = *opt.warm_start;

    DiffeoResult r;
    r.K = K;
    std::vector<double> uK;
    double res = 0.0;
    bool done = false;
    int it = 0;
    double best = std::numeric_limits<double>::infinity();
    int stalls = 0;
    for (it = 1; it <= opt.max_iter; ++it) {
        auto Iy = I(y, &uK);
        res = detail::sup_diff(Iy, y);
        if (!std::isfinite(res)) break;
        if (res < opt.tol) {
            y = std::move(Iy);
            done = true;
            break;
        }
        if (res < 0.9 * best) {
            best = res;
            stalls = 0;
        } else if (++stalls > 20) {
            break;
        }
        for (int j = 0; j < M; ++j) y[j] += opt.damping * (Iy[j] - y[j]);
    }
    r.iterations = std::min(it, opt.max_iter);
    if (!done && opt.newton_fallback) {
        r.newton_used = true;
        if (!std::isfinite(res)) std::fill(y.begin(), y.end(), 0.0);
        Eigen::MatrixXd J(M, M);
        std::vector<double> e(M, 0.0);
        for (int k = 0; k < opt.newton_max_iter; ++k) {
            auto Iy = I(y, &uK);
            res = detail::sup_diff(Iy, y);
            if (res < opt.tol) {
                y = std::move(Iy);
                done = true;
                break;
            }
            for (int c = 0; c < M; ++c) {
                e[c] = 1.0;
                auto col = I.jacobian_apply(y, uK, e);
                e[c] = 0.0;
                for (int rr = 0; rr < M; ++rr) J(rr, c) = (rr == c ? 1.0 : 0.0) - col[rr];
            }
            Eigen::VectorXd rhs(M);
            for (int j = 0; j < M; ++j) rhs[j] = Iy[j] - y[j];
            Eigen::VectorXd delta = J.partialPivLu().solve(rhs);
            for (int j = 0; j < M; ++j) y[j] += delta[j];
            ++r.iterations;
        }
    }
    if (!done) throw DivergenceError("inverse_a: fixed point did not converge", 0.0, res);
    r.residual = res;
    // P_K(a w) at the converged y, and its derivative, for a_xx.
    auto uKv = I.projected(y);
    FourierField uKf = detail::real_field_of(uKv, w.n_max());
    auto uKx = detail::real_part(detail::grid_of(derivative(uKf), M));
    detail::finish_diffeo(r, y, uKv, uKx, f, w.n_max());
    return r;
}

// u = a(w) w, truncated to the state band.
inline FourierField U_map(const FourierField& w, int K, const ScalarMap& f, const InverseOptions& opt = {}) {
    if (f.is_zero()) return w;
    DiffeoResult r = inverse_a(w, K, f, opt);
    auto wg = detail::real_part(detail::grid_of(w, r.M));
    for (int j = 0; j < r.M; ++j) wg[j] *= r.a_grid[j];
    return detail::real_field_of(wg, w.n_max());
}

// d_t a from d_t P_K u = P_K[u_xx - u - f(u)u_x - g(u)], u = a(w) w.
inline FourierField a_time_derivative(const DiffeoResult& r, const FourierField& u, const RDASystem& sys) {
    const ScalarMap& f = sys.scalar_f;
    int K = r.K;
    FourierField ut = derivative(u, 2) + rda_nonlinear(sys, 0.0, u);
    if (sys.include_linear_u) ut -= u;
    FourierField uK = project_PK(u, std::min(K, u.n_max()));
    FourierField utK = project_PK(ut, std::min(K, u.n_max()));
    int M = r.M;
    auto ug = detail::real_part(detail::grid_of(uK, M));
    auto utg = detail::real_part(detail::grid_of(utK, M));
    std::vector<cplx> q(M);
    for (int j = 0; j < M; ++j) q[j] = f.derivative(ug[j]) * utg[j];
    auto Q = detail::grid_antiderivative(q);
    std::vector<double> at(M);
    for (int j = 0; j < M; ++j) at[j] = 0.5 * Q[j].real() * r.a_grid[j];
    return detail::real_field_of(at, u.n_max());
}

inline FourierField a_time_derivative(const FourierField& w, int K, const RDASystem& sys,
                                      const InverseOptions& opt = {}) {
    if (sys.scalar_f.is_zero()) return FourierField(w.n_max());
    DiffeoResult r = inverse_a(w, K, sys.scalar_f, opt);
    auto wg = detail::real_part(detail::grid_of(w, r.M));
    for (int j = 0; j < r.M; ++j) wg[j] *= r.a_grid[j];
    return a_time_derivative(r, detail::real_field_of(wg, w.n_max()), sys);
}

// ---------------------------------------------------------------------------
// Linear solvers

struct UpsilonResult {
    FourierField xi;
    cplx D = 0.0;
};

// xi' = phi xi - <phi xi> + h, xi(-pi) = 0, via exponential weights:
// xi = e^{Phi} (J1 - D J0) with Phi = m (x + pi) + periodic part.
inline UpsilonResult upsilon_detail(const FourierField& phi, const FourierField& h, double mean_tol = 1e-10) {
    if (std::abs(mean_value(h)) > mean_tol) throw PreconditionError("upsilon: <h> must vanish");
    int n_max = std::max(phi.n_max(), h.n_max());
    int M = dealiased_size(n_max);
    auto pg = detail::grid_of(phi.resized(n_max), M);
    auto hg = detail::grid_of(h.resized(n_max), M);
    cplx m;
    auto Pt = detail::grid_antiderivative(pg, &m);

    // J(p)(x_j) = int_{-pi}^{x_j} e^{-m(s+pi)} p(s) ds and its value at x = pi.
    auto weighted_integral = [&](const std::vector<cplx>& p, cplx& at_right) {
        std::vector<cplx> spec = grid_spectrum(p.data(), M);
        std::vector<cplx> osc(M, 0.0);
        cplx constant = 0.0;
        at_right = 0.0;
        cplx decay_full = std::exp(-two_pi * m);
        for (int k = 1; k < M; ++k) {
            if (M % 2 == 0 && k == M / 2) continue;
            int n = slot_wavenumber(k, M);
            cplx c = spec[k] / cplx(-m.real(), n - m.imag());
            double sgn = (n % 2 == 0) ? 1.0 : -1.0;
            osc[k] = c;
            constant += c * sgn;
            at_right += c * sgn * (decay_full - 1.0);
        }
        auto vals = grid_values(osc);
        std::vector<cplx> out(M);
        for (int j = 0; j < M; ++j) {
            double s = grid_point(j, M) + pi;
            out[j] = std::exp(-m * s) * vals[j] - constant + spec[0] * s * detail::one_minus_exp_over(m * s);
        }
        at_right += spec[0] * two_pi * detail::one_minus_exp_over(m * two_pi);
        return out;
    };

    std::vector<cplx> p0(M), p1(M);
    for (int j = 0; j < M; ++j) {
        p0[j] = std::exp(-Pt[j]);
        p1[j] = p0[j] * hg[j];
    }
    cplx J0r, J1r;
    auto J0 = weighted_integral(p0, J0r);
    auto J1 = weighted_integral(p1, J1r);
    cplx D = J1r / J0r;
    std::vector<cplx> xi(M);
    for (int j = 0; j < M; ++j) {
        double s = grid_point(j, M) + pi;
        xi[j] = std::exp(m * s + Pt[j]) * (J1[j] - D * J0[j]);
    }
    UpsilonResult r;
    r.D = D;
    r.xi = detail::field_of(xi, n_max);
    if (phi.is_real(1e-14) && h.is_real(1e-14)) r.xi.make_real();
    return r;
}

inline FourierField upsilon(const FourierField& phi, const FourierField& h) { return upsilon_detail(phi, h).xi; }

// R xi = Upsilon_{phi psi}(-phi (1 - P_K)(psi xi) + <phi (1 - P_K)(psi xi)>)
inline FourierField apply_R(const FourierField& phi, const FourierField& psi, const FourierField& phipsi, int K,
                            const FourierField& xi) {
    if (K >= xi.n_max()) return FourierField(xi.n_max());
    FourierField tail = project_QK(multiply(psi, xi), K);
    FourierField src = multiply(phi, tail) * -1.0;
    src(0) = 0.0;
    return upsilon(phipsi, src);
}

struct UpsilonKResult {
    FourierField xi;
    double contraction_factor = 0.0;  // observed per-iteration ratio in H^1
    int iterations = 0;
};

// Solves xi' = phi P_K(psi xi) - <phi P_K(psi xi)> + h, xi(-pi) = 0.
inline UpsilonKResult upsilon_K(const FourierField& phi, const FourierField& psi, const FourierField& h, int K,
                                double tol = 1e-13, int max_iter = 200) {
    FourierField phipsi = multiply(phi, psi);
    FourierField base = upsilon(phipsi, h);
    UpsilonKResult r;
    r.xi = base;
    if (K >= h.n_max()) return r;
    double prev_step = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        FourierField next = apply_R(phi, psi, phipsi, K, r.xi) + base;
        double stepn = phi_norm(next - r.xi);
        r.xi = std::move(next);
        r.iterations = it;
        if (it > 1 && prev_step > 0.0) {
            r.contraction_factor = stepn / prev_step;
            if (r.contraction_factor >= 1.0 && it > 3)
                throw ContractionError("upsilon_K: iteration is not contracting (K too small)", r.contraction_factor);
        }
        if (stepn <= tol * std::max(1.0, phi_norm(r.xi))) break;
        prev_step = stepn;
    }
    return r;
}

// Matrix of R on e^{inx}, |n| <= N, conjugated into H^1-orthonormal coordinates.
inline Eigen::MatrixXcd R_matrix_H1(const FourierField& phi, const FourierField& psi, int K) {
    int N = phi.n_max();
    FourierField phipsi = multiply(phi, psi);
    int d = 2 * N + 1;
    Eigen::MatrixXcd B(d, d);
    for (int col = 0; col < d; ++col) {
        int n = col - N;
        FourierField e = FourierField::mode(N, n, 1.0 / std::sqrt(two_pi * symbol_A(n)));
        FourierField r = apply_R(phi, psi, phipsi, K, e);
        for (int row = 0; row < d; ++row) {
            int k = row - N;
            B(row, col) = std::sqrt(two_pi * symbol_A(k)) * r(k);
        }
    }
    return B;
}

// H^1 operator norm of R: the contraction factor of the iteration.
inline double R_operator_norm(const FourierField& phi, const FourierField& psi, int K) {
    if (K >= phi.n_max()) return 0.0;
    Eigen::MatrixXcd B = R_matrix_H1(phi, psi, K);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(B);
    return svd.singularValues()(0);
}

struct K0Probe {
    std::vector<int> K;
    std::vector<double> factor;
    int K0 = -1;  // first K with factor < 1/2
};

inline K0Probe probe_K0(const FourierField& phi, const FourierField& psi, const std::vector<int>& Ks) {
    K0Probe p;
    for (int K : Ks) {
        double c = R_operator_norm(phi, psi, K);
        p.K.push_back(K);
        p.factor.push_back(c);
        if (p.K0 < 0 && c < 0.5) p.K0 = K;
    }
    return p;
}

}  // namespace rdalab
