#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>
#include <functional>
#include <limits>
#include <ostream>

#include "io.hpp"
#include "json.hpp"
#include "parallel.hpp"
#include "rda.hpp"
#include "smoothstep.hpp"

namespace rdalab {

// 2T-periodic time profile given by its values on [0, T]; extended by
// y(t + T) = -y(t).
struct Profile {
    double T = 1.0;
    std::function<double(double)> on_half;

    double operator()(double t) const {
        double p = 2.0 * T;
        double s = std::fmod(t, p);
        if (s < 0.0) s += p;
        return s <= T ? on_half(s) : -on_half(s - T);
    }
};

inline Profile default_y(double T) {
    if (!(T > 0.0)) throw ConfigError("default_y: T must be positive");
    return Profile{T, [T](double t) { return std::sin(pi * t / T); }};
}

struct CounterexampleConfig {
    double T = 10.0;
    int N_max = 24;
    Profile y;
    Ramp theta1{0.25, 0.5};
    Ramp theta2{0.0, 0.25};
    double T0 = 0.0;
    double epsilon = 0.0;
    double quad_tol = 1e-12;
    double ode_tol = 1e-13;
    // Replace the window rotation by an exact quarter turn once its defect is
    // below snap_tol; the defect is still reported.
    bool exact_quarter_turn = true;
    double snap_tol = 1e-8;
};

namespace detail {

template <class F>
double quad(F&& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, tol);
}

// First t in [0, T/2] with y(t) = level (y increasing there).
inline double level_time(const Profile& y, double level) {
    double lo = 0.0, hi = 0.5 * y.T;
    if (y(hi) < level) throw ConfigError("profile never reaches the requested level");
    for (int i = 0; i < 200 && hi - lo > 1e-16 * y.T; ++i) {
        double mid = 0.5 * (lo + hi);
        (y(mid) < level ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Integral of theta1(y(t)) over the active window, split at ramp ends.
inline double window_integral(const CounterexampleConfig& c) {
    double t_lo = level_time(c.y, c.theta1.start), t_hi = level_time(c.y, c.theta1.end);
    auto f = [&](double t) { return c.theta1(c.y(t)); };
    double a = t_lo, b = c.T - t_lo;
    double tol = c.quad_tol;
    return quad(f, a, t_hi, tol) + quad(f, t_hi, c.T - t_hi, tol) + quad(f, c.T - t_hi, b, tol);
}

}  // namespace detail

inline double T0_of(const CounterexampleConfig& c) { return detail::level_time(c.y, 0.25); }

// eps = pi / (2 int_{T0}^{T-T0} theta1(y) dt)
inline double epsilon_of(const CounterexampleConfig& c) {
    double d = detail::window_integral(c);
    if (!(d > 1e-12 * c.T)) throw ConfigError("epsilon_of: degenerate window integral (T too small)");
    return pi / (2.0 * d);
}

inline CounterexampleConfig make_counterexample(double T, int N_max, Ramp th1 = {0.25, 0.5}, Ramp th2 = {0.0, 0.25}) {
    if (N_max < 1) throw ConfigError("make_counterexample: N_max must be >= 1");
    CounterexampleConfig c;
    c.T = T;
    c.N_max = N_max;
    c.y = default_y(T);
    c.theta1 = th1;
    c.theta2 = th2;
    c.T0 = T0_of(c);
    c.epsilon = epsilon_of(c);
    return c;
}

// int_a^b theta2(y(t)) dt
inline double cap_integral(const CounterexampleConfig& c, double a, double b) {
    return detail::quad([&](double t) { return c.theta2(c.y(t)); }, a, b, c.quad_tol);
}

// int_0^{T0} (theta2(y) - 1) dt, as it enters the closed-form multipliers.
inline double cap_defect(const CounterexampleConfig& c) {
    return detail::quad([&](double t) { return c.theta2(c.y(t)) - 1.0; }, 0.0, c.T0, c.quad_tol);
}

namespace detail {

using State2 = std::array<double, 2>;

template <class State, class Rhs>
State ode_solve(Rhs&& rhs, State x, double t0, double t1, double tol) {
    using namespace boost::numeric::odeint;
    auto stepper = make_controlled(tol, tol, runge_kutta_dopri5<State>());
    integrate_adaptive(stepper, rhs, x, t0, t1, 1e-3 * (t1 - t0));
    return x;
}

}  // namespace detail

// Rotation angle accumulated by d(phi)/dt = eps theta1(sign y(t)) over [a, b].
inline double rotation_angle(const CounterexampleConfig& c, double a, double b, double sign = 1.0) {
    auto rhs = [&](const std::array<double, 1>& x, std::array<double, 1>& dx, double t) {
        (void)x;
        dx[0] = c.epsilon * c.theta1(sign * c.y(t));
    };
    return detail::ode_solve(rhs, std::array<double, 1>{0.0}, a, b, c.ode_tol)[0];
}

// Quarter-turn defect on the first and second active windows.
inline std::array<double, 2> phase_defects(const CounterexampleConfig& c) {
    return {rotation_angle(c, c.T0, c.T - c.T0) - 0.5 * pi,
            rotation_angle(c, c.T + c.T0, 2.0 * c.T - c.T0, -1.0) - 0.5 * pi};
}

// ---------------------------------------------------------------------------
// Half-period blocks. Actual map = e^{log_scale} * m.

struct LogBlock {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    double log_scale = 0.0;
    double leak = 0.0;  // |quarter-turn defect| of the window rotation

    Eigen::Matrix2cd value() const { return m * std::exp(log_scale); }
};

namespace detail {

inline LogBlock block_from_logs(double l00, double l10, double l01, double l11, const std::array<double, 4>& sgn) {
    double s = std::max({l00, l10, l01, l11});
    LogBlock b;
    b.log_scale = s;
    auto e = [&](double l, double sg) { return std::isfinite(l) ? cplx(sg * std::exp(l - s)) : cplx{}; };
    b.m(0, 0) = e(l00, sgn[0]);
    b.m(1, 0) = e(l10, sgn[1]);
    b.m(0, 1) = e(l01, sgn[2]);
    b.m(1, 1) = e(l11, sgn[3]);
    return b;
}

}  // namespace detail

// Closed-form factors on span{e_n^v, e_{n+1}^u} over [0, T].
inline LogBlock halfperiod_closed_first(int n, const CounterexampleConfig& c) {
    double n2 = double(n) * n, m2 = double(n + 1) * (n + 1);
    double I1 = cap_integral(c, 0.0, c.T0), I2 = cap_integral(c, c.T - c.T0, c.T);
    double lv1 = -c.T0 * n2 - (2 * n + 1) * I1, lv2 = -c.T0 * n2 - (2 * n + 1) * I2;
    double lu = -c.T0 * m2, lw = -(c.T - 2.0 * c.T0) * m2;
    double ninf = -std::numeric_limits<double>::infinity();
    return detail::block_from_logs(ninf, lv1 + lw + lu, lu + lw + lv2, ninf, {1.0, 1.0, -1.0, 1.0});
}

// Rotation of the scaled window dynamics x' = eps theta1(+-y) J x; it does not
// depend on the mode.
struct WindowRotation {
    Eigen::Matrix2d R = Eigen::Matrix2d::Identity();
    double defect = 0.0;  // angle - pi/2
};

inline WindowRotation window_rotation(const CounterexampleConfig& c, double a, double b, double sign) {
    using S = std::array<double, 2>;
    auto rhs = [&](const S& x, S& dx, double t) {
        double k = c.epsilon * c.theta1(sign * c.y(t));
        dx[0] = -k * x[1];
        dx[1] = k * x[0];
    };
    S e0 = detail::ode_solve(rhs, S{1.0, 0.0}, a, b, c.ode_tol);
    S e1 = detail::ode_solve(rhs, S{0.0, 1.0}, a, b, c.ode_tol);
    WindowRotation w;
    w.R << e0[0], e1[0], e0[1], e1[1];
    w.defect = std::atan2(e0[1], e0[0]) - 0.5 * pi;
    if (c.exact_quarter_turn && std::abs(w.defect) < c.snap_tol) w.R << 0.0, -1.0, 1.0, 0.0;
    return w;
}

inline WindowRotation first_window(const CounterexampleConfig& c) { return window_rotation(c, c.T0, c.T - c.T0, 1.0); }
inline WindowRotation second_window(const CounterexampleConfig& c) {
    return window_rotation(c, c.T + c.T0, 2.0 * c.T - c.T0, -1.0);
}

// Log-amplitudes of (e_n^v, e_m^u) over a decoupled cap [a, b].
inline std::array<double, 2> cap_logs(int n, int m, const CounterexampleConfig& c, double a, double b) {
    using S = std::array<double, 2>;
    auto rhs = [&](const S&, S& dx, double t) {
        dx[0] = -(double(n) * n + (2 * n + 1) * c.theta2(c.y(t)));
        dx[1] = -double(m) * m;
    };
    return detail::ode_solve(rhs, S{0.0, 0.0}, a, b, c.ode_tol);
}

namespace detail {

// diag(e^{out}) * e^{mid} R * diag(e^{in}) in log-scaled form.
inline LogBlock compose_block(const std::array<double, 2>& in, double mid, const Eigen::Matrix2d& R,
                              const std::array<double, 2>& out, double defect) {
    double s = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (R(i, j) != 0.0) s = std::max(s, out[i] + in[j]);
    LogBlock b;
    b.log_scale = s + mid;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) b.m(i, j) = R(i, j) * std::exp(out[i] + in[j] - s);
    b.leak = std::abs(defect);
    return b;
}

}  // namespace detail

// Map on span{e_n^v, e_{n+1}^u} over [0, T]: decoupled caps on [0, T0] and
// [T - T0, T] around the common-rate rotation window.
inline LogBlock halfperiod_map_first(int n, const CounterexampleConfig& c, const WindowRotation& w) {
    if (n < -c.N_max || n + 1 > c.N_max) throw PreconditionError("halfperiod_map_first: n outside band");
    auto cap1 = cap_logs(n, n + 1, c, 0.0, c.T0), cap2 = cap_logs(n, n + 1, c, c.T - c.T0, c.T);
    double mid = -(c.T - 2.0 * c.T0) * double(n + 1) * (n + 1);
    return detail::compose_block(cap1, mid, w.R, cap2, w.defect);
}

inline LogBlock halfperiod_map_first(int n, const CounterexampleConfig& c) {
    return halfperiod_map_first(n, c, first_window(c));
}

// Map on span{e_n^v, e_n^u} over [T, 2T]; both modes decay at n^2 throughout.
inline LogBlock halfperiod_map_second(int n, const CounterexampleConfig& c, const WindowRotation& w) {
    if (std::abs(n) > c.N_max) throw PreconditionError("halfperiod_map_second: n outside band");
    double n2 = double(n) * n;
    return detail::compose_block({0.0, 0.0}, -c.T * n2, w.R, {0.0, 0.0}, w.defect);
}

inline LogBlock halfperiod_map_second(int n, const CounterexampleConfig& c) {
    return halfperiod_map_second(n, c, second_window(c));
}

// One dopri5 integration of the coupled mode pair over all of [0, T], in a
// frame scaled by the slower decay rate. Reference for the composed block.
inline LogBlock halfperiod_direct_first(int n, const CounterexampleConfig& c) {
    double n2 = double(n) * n, m2 = double(n + 1) * (n + 1);
    using S = std::array<double, 5>;  // Re v, Im v, Re u, Im u, log scale
    auto rhs = [&](const S& x, S& dx, double t) {
        double y = c.y(t);
        double rv = n2 + (2 * n + 1) * c.theta2(y), ru = m2;
        double k = c.epsilon * c.theta1(y);
        double r0 = std::min(rv, ru);
        dx[0] = -(rv - r0) * x[0] - k * x[2];
        dx[1] = -(rv - r0) * x[1] - k * x[3];
        dx[2] = -(ru - r0) * x[2] + k * x[0];
        dx[3] = -(ru - r0) * x[3] + k * x[1];
        dx[4] = -r0;
    };
    auto run = [&](S x0) {
        S x = x0;
        double marks[] = {0.0, c.T0, c.T - c.T0, c.T};
        for (int i = 0; i < 3; ++i) x = detail::ode_solve(rhs, x, marks[i], marks[i + 1], c.ode_tol);
        if (!std::isfinite(x[4])) throw DivergenceError("halfperiod_map_first: integration failed", c.T);
        return x;
    };
    S cv = run({1, 0, 0, 0, 0}), cu = run({0, 0, 1, 0, 0});
    LogBlock b;
    b.log_scale = cv[4];
    b.m(0, 0) = {cv[0], cv[1]};
    b.m(1, 0) = {cv[2], cv[3]};
    b.m(0, 1) = {cu[0], cu[1]};
    b.m(1, 1) = {cu[2], cu[3]};
    return b;
}

inline LogBlock halfperiod_closed_second(int n, const CounterexampleConfig& c) {
    double l = -c.T * double(n) * n;
    double ninf = -std::numeric_limits<double>::infinity();
    return detail::block_from_logs(ninf, l, l, ninf, {1.0, 1.0, -1.0, 1.0});
}

// Largest entrywise deviation relative to the block's largest entry.
inline double block_distance(const LogBlock& a, const LogBlock& b) {
    double s = std::max(a.log_scale, b.log_scale);
    Eigen::Matrix2cd da = a.m * std::exp(a.log_scale - s), db = b.m * std::exp(b.log_scale - s);
    return (da - db).cwiseAbs().maxCoeff() / std::max(db.cwiseAbs().maxCoeff(), 1e-300);
}

// ---------------------------------------------------------------------------
// Period map on {e_n^v, e_n^u : |n| <= N_max}; entry (i, j) equals
// scaled(i, j) * exp(col_log[j]).

enum class AssemblyMethod { block_ode, full_pde };

inline const char* to_string(AssemblyMethod m) { return m == AssemblyMethod::block_ode ? "block-ode" : "full-pde"; }

struct PeriodMap {
    int N_max = 0;
    double T = 0.0;
    AssemblyMethod method = AssemblyMethod::block_ode;
    Eigen::MatrixXcd scaled;
    std::vector<double> col_log;
    double max_leak = 0.0;

    int dim() const { return 2 * (2 * N_max + 1); }
    int iv(int n) const { return n + N_max; }
    int iu(int n) const { return 2 * N_max + 1 + n + N_max; }
    bool is_v(int i) const { return i <= 2 * N_max; }
    int wavenumber(int i) const { return is_v(i) ? i - N_max : i - (2 * N_max + 1) - N_max; }
    std::string label(int i) const { return (is_v(i) ? "v" : "u") + std::to_string(wavenumber(i)); }

    double log_abs(int i, int j) const {
        double a = std::abs(scaled(i, j));
        return a > 0.0 ? std::log(a) + col_log[j] : -std::numeric_limits<double>::infinity();
    }
    cplx entry(int i, int j) const { return scaled(i, j) * std::exp(col_log[j]); }
    Eigen::MatrixXcd dense() const {
        Eigen::MatrixXcd d = scaled;
        for (int j = 0; j < dim(); ++j) d.col(j) *= std::exp(col_log[j]);
        return d;
    }
};

namespace detail {

struct ColumnTerm {
    int row;
    cplx value;
    double log;
};

inline void store_column(PeriodMap& P, int j, const std::vector<ColumnTerm>& terms) {
    double s = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms)
        if (t.value != 0.0) s = std::max(s, t.log);
    if (!std::isfinite(s)) s = 0.0;
    P.col_log[j] = s;
    for (const auto& t : terms) P.scaled(t.row, j) += t.value * std::exp(t.log - s);
}

// Mode n of the v-component alone over [0, T] (partner mode outside the band).
inline double lone_v_log(int n, const CounterexampleConfig& c) {
    return -c.T * double(n) * n - (2 * n + 1) * cap_integral(c, 0.0, c.T);
}

}  // namespace detail

inline PeriodMap assemble_block_map(const CounterexampleConfig& c) {
    int N = c.N_max;
    PeriodMap P;
    P.N_max = N;
    P.T = c.T;
    P.method = AssemblyMethod::block_ode;
    P.scaled = Eigen::MatrixXcd::Zero(P.dim(), P.dim());
    P.col_log.assign(P.dim(), 0.0);
    auto w1 = first_window(c), w2 = second_window(c);
    std::vector<LogBlock> first(2 * N), second(2 * N + 1);
    parallel_for(2 * N, [&](std::size_t k) { first[k] = halfperiod_map_first(int(k) - N, c, w1); });
    for (int n = -N; n <= N; ++n) second[n + N] = halfperiod_map_second(n, c, w2);
    auto B1 = [&](int n) -> const LogBlock& { return first[n + N]; };
    auto B2 = [&](int n) -> const LogBlock& { return second[n + N]; };
    for (const auto& b : first) P.max_leak = std::max(P.max_leak, b.leak);
    for (const auto& b : second) P.max_leak = std::max(P.max_leak, b.leak);

    // push amplitude x on (v_n or u_n) through the second half
    auto second_half = [&](std::vector<detail::ColumnTerm>& out, int n, bool on_v, cplx x, double l) {
        const LogBlock& b = B2(n);
        int col = on_v ? 0 : 1;
        out.push_back({P.iv(n), x * b.m(0, col), l + b.log_scale});
        out.push_back({P.iu(n), x * b.m(1, col), l + b.log_scale});
    };
    for (int n = -N; n <= N; ++n) {
        std::vector<detail::ColumnTerm> tv, tu;
        if (n + 1 <= N) {
            const LogBlock& b = B1(n);
            second_half(tv, n, true, b.m(0, 0), b.log_scale);
            second_half(tv, n + 1, false, b.m(1, 0), b.log_scale);
        } else {
            second_half(tv, n, true, 1.0, detail::lone_v_log(n, c));
        }
        if (n - 1 >= -N) {
            const LogBlock& b = B1(n - 1);
            second_half(tu, n - 1, true, b.m(0, 1), b.log_scale);
            second_half(tu, n, false, b.m(1, 1), b.log_scale);
        } else {
            second_half(tu, n, false, 1.0, -c.T * double(n) * n);
        }
        detail::store_column(P, P.iv(n), tv);
        detail::store_column(P, P.iu(n), tu);
    }
    return P;
}

// ---------------------------------------------------------------------------
// The linear counterexample as a two-component complex PDE. Multiplication by
// e^{+-ix} is an exact index shift, so it is applied in coefficient space.

struct CounterexampleFlow {
    const CounterexampleConfig* cfg;
    int n_components() const { return 2; }
    cplx linear_symbol(int n, int) const { return -double(n) * n; }
    FourierField nonlinear(double t, const FourierField& s) const {
        const auto& c = *cfg;
        double y = c.y(t);
        double t1p = c.epsilon * c.theta1(y), t1m = c.epsilon * c.theta1(-y), t2 = c.theta2(y);
        FourierField out(s.n_max(), 2);
        for (int n = -s.n_max(); n <= s.n_max(); ++n) {
            cplx v = s(n, 0), u = s(n, 1);
            out(n, 0) = -(2.0 * n + 1.0) * t2 * v - t1p * s.get(n + 1, 1) - t1m * u;
            out(n, 1) = t1p * s.get(n - 1, 0) + t1m * v;
        }
        return out;
    }
};

inline FourierField basis_state(int N_max, int n, bool on_v) { return FourierField::mode(N_max, n, 1.0, on_v ? 0 : 1, 2); }

// Reads columns |n| <= col_band (default all) from unit initial data.
inline PeriodMap assemble_pde_map(const CounterexampleConfig& c, double dt, int col_band = -1) {
    int N = c.N_max;
    if (col_band < 0) col_band = N;
    PeriodMap P;
    P.N_max = N;
    P.T = c.T;
    P.method = AssemblyMethod::full_pde;
    P.scaled = Eigen::MatrixXcd::Zero(P.dim(), P.dim());
    P.col_log.assign(P.dim(), 0.0);
    CounterexampleFlow flow{&c};
    std::vector<int> cols;
    for (int n = -col_band; n <= col_band; ++n) {
        cols.push_back(P.iv(n));
        cols.push_back(P.iu(n));
    }
    parallel_for(cols.size(), [&](std::size_t k) {
        int j = cols[k];
        auto tr = integrate_system(flow, basis_state(N, P.wavenumber(j), P.is_v(j)), 0.0, 2.0 * c.T, dt,
                                   {.stride = 1 << 30});
        const auto& s = tr.final_state();
        for (int n = -N; n <= N; ++n) {
            P.scaled(P.iv(n), j) = s(n, 0);
            P.scaled(P.iu(n), j) = s(n, 1);
        }
    });
    return P;
}

inline PeriodMap assemble_period_map(const CounterexampleConfig& c, AssemblyMethod m, double pde_dt = 1e-3) {
    return m == AssemblyMethod::block_ode ? assemble_block_map(c) : assemble_pde_map(c, pde_dt);
}

struct MapComparison {
    double max_rel = 0.0;  // column-relative entrywise deviation
    int worst_row = -1, worst_col = -1;
};

// Entrywise agreement on |n| <= band, each entry measured against its
// column's largest entry in the reference map.
inline MapComparison compare_maps(const PeriodMap& a, const PeriodMap& ref, int band) {
    if (a.N_max != ref.N_max) throw ConfigError("compare_maps: different truncations");
    MapComparison out;
    for (int j = 0; j < ref.dim(); ++j) {
        if (std::abs(ref.wavenumber(j)) > band) continue;
        double colmax = ref.scaled.col(j).cwiseAbs().maxCoeff();
        double shift = std::exp(a.col_log[j] - ref.col_log[j]);
        for (int i = 0; i < ref.dim(); ++i) {
            if (std::abs(ref.wavenumber(i)) > band) continue;
            double r = std::abs(a.scaled(i, j) * shift - ref.scaled(i, j)) / std::max(colmax, 1e-300);
            if (r > out.max_rel) {
                out.max_rel = r;
                out.worst_row = i;
                out.worst_col = j;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Structure P e_n^v ~ e_{n+1}^v, P e_n^u ~ e_{n-1}^u.

struct StructureReport {
    double min_mass_fraction = 1.0;
    int worst_col = -1;
    int columns = 0;
    int failures = 0;
    double tol = 1e-6;
    bool pass() const { return failures == 0; }
};

inline int structural_target(const PeriodMap& P, int j) {
    int n = P.wavenumber(j);
    return P.is_v(j) ? P.iv(n + 1) : P.iu(n - 1);
}

inline StructureReport structure_check(const PeriodMap& P, double tol = 1e-6, int band = -1) {
    if (band < 0) band = P.N_max - 2;
    StructureReport r;
    r.tol = tol;
    for (int j = 0; j < P.dim(); ++j) {
        if (std::abs(P.wavenumber(j)) > band) continue;
        double total = P.scaled.col(j).squaredNorm();
        double frac = total > 0.0 ? std::norm(P.scaled(structural_target(P, j), j)) / total : 0.0;
        ++r.columns;
        if (frac < 1.0 - tol) ++r.failures;
        if (frac < r.min_mass_fraction) {
            r.min_mass_fraction = frac;
            r.worst_col = j;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Multipliers: measured entries against the closed forms.

struct LogValue {
    double log_abs = 0.0;
    double phase = 0.0;
};

inline LogValue log_entry(const PeriodMap& P, int i, int j) { return {P.log_abs(i, j), std::arg(P.scaled(i, j))}; }

inline double closed_log_mu(int n, const CounterexampleConfig& c, double defect) {
    return -2.0 * c.T * double(n + 1) * (n + 1) - (2 * n + 1) * defect;
}
inline double closed_log_nu(int n, const CounterexampleConfig& c, double defect) {
    return -2.0 * c.T * double(n) * n - (2 * n + 1) * c.T - (2 * n + 1) * defect;
}

struct MultiplierRow {
    int n = 0;
    LogValue mu, nu;           // coefficients of e_n^v -> e_{n+1}^v and e_n^u -> e_{n-1}^u
    double mu_rel = 0.0;       // vs closed-form mu_n
    double nu_rel_same = 0.0;  // vs closed-form nu_n
    double nu_rel_prev = 0.0;  // vs closed-form nu_{n-1}
};

struct MultiplierReport {
    std::vector<MultiplierRow> rows;
    double max_mu_rel = 0.0;
    bool mu_negative = true, nu_negative = true;
    bool nu_index_shift = false;  // measured nu matches closed-form nu_{n-1}, not nu_n
    double K_fit = 0.0;           // min over n != 0 of -log(|mu_n| + |nu_n|) / (T n^2)
};

inline MultiplierReport multiplier_report(const PeriodMap& P, const CounterexampleConfig& c, int n_lo, int n_hi,
                                          double tol = 1e-6) {
    MultiplierReport r;
    double J = cap_defect(c);
    int matches_prev = 0, matches_same = 0;
    r.K_fit = std::numeric_limits<double>::infinity();
    for (int n = n_lo; n <= n_hi; ++n) {
        if (n + 1 > P.N_max || n - 1 < -P.N_max) throw PreconditionError("multiplier_report: n outside band");
        MultiplierRow row;
        row.n = n;
        row.mu = log_entry(P, P.iv(n + 1), P.iv(n));
        row.nu = log_entry(P, P.iu(n - 1), P.iu(n));
        row.mu_rel = std::abs(std::expm1(row.mu.log_abs - closed_log_mu(n, c, J)));
        row.nu_rel_same = std::abs(std::expm1(row.nu.log_abs - closed_log_nu(n, c, J)));
        row.nu_rel_prev = std::abs(std::expm1(row.nu.log_abs - closed_log_nu(n - 1, c, J)));
        r.max_mu_rel = std::max(r.max_mu_rel, row.mu_rel);
        auto negative = [](const LogValue& v) { return std::abs(std::abs(v.phase) - pi) < 1e-6; };
        r.mu_negative = r.mu_negative && negative(row.mu);
        r.nu_negative = r.nu_negative && negative(row.nu);
        matches_prev += row.nu_rel_prev < tol;
        matches_same += row.nu_rel_same < tol;
        if (n != 0) {
            double s = std::max(row.mu.log_abs, row.nu.log_abs);
            double lsum = s + std::log(std::exp(row.mu.log_abs - s) + std::exp(row.nu.log_abs - s));
            r.K_fit = std::min(r.K_fit, -lsum / (c.T * double(n) * n));
        }
        r.rows.push_back(row);
    }
    int count = n_hi - n_lo + 1;
    r.nu_index_shift = matches_prev == count && matches_same < count;
    return r;
}

// ---------------------------------------------------------------------------
// Powers of P in log space.

struct CubicFit {
    double gamma = 0.0;  // log y ~ logC - gamma x^3
    double logC = 0.0;
    double r2 = 0.0;
};

inline CubicFit fit_cubic(const std::vector<double>& x, const std::vector<double>& logy) {
    std::vector<double> x3;
    for (double v : x) x3.push_back(v * v * v);
    double slope = detail::slope_fit(x3, logy);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x3.size(); ++i) {
        mx += x3[i];
        my += logy[i];
    }
    mx /= double(x3.size());
    my /= double(x3.size());
    double icpt = my - slope * mx, ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < x3.size(); ++i) {
        double e = logy[i] - (icpt + slope * x3[i]);
        ss_res += e * e;
        ss_tot += (logy[i] - my) * (logy[i] - my);
    }
    return {-slope, icpt, ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0};
}

struct SpectralReport {
    std::vector<int> powers;
    std::vector<double> log_norms;    // log ||P^N|| from target-chain products
    std::vector<int> argmax_column;
    CubicFit fit;
    double spectral_radius = 0.0;      // exp(log_spectral_radius), may underflow to 0
    double log_spectral_radius = 0.0;  // eigen-solve after exact diagonal balancing
    bool balanced = false;             // dominant entries formed a single cycle
    double log_cycle_radius = 0.0;     // mean log weight along that cycle
    double gelfand_bound = 0.0;       // ||P^N||^{1/N} at the largest N
    std::vector<double> sum_k2_bound;  // log of exp(-K T sum_{k<=N} k^2) with K = K_fit
};

namespace detail {

// log weights of P along its structural targets; -inf where absent.
inline std::vector<double> target_logs(const PeriodMap& P) {
    std::vector<double> w(P.dim(), -std::numeric_limits<double>::infinity());
    for (int j = 0; j < P.dim(); ++j) {
        int n = P.wavenumber(j);
        bool ok = P.is_v(j) ? n + 1 <= P.N_max : n - 1 >= -P.N_max;
        if (ok) w[j] = P.log_abs(structural_target(P, j), j);
    }
    return w;
}

}  // namespace detail

// ||P^k|| = max over starting columns of the chain product, restricted to
// chains inside |n| <= band where the structure holds.
inline double chain_log_norm(const PeriodMap& P, const std::vector<double>& w, int k, int band, int* argmax = nullptr) {
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < P.dim(); ++j) {
        if (std::abs(P.wavenumber(j)) > band) continue;
        double s = 0.0;
        int cur = j;
        bool inside = true;
        for (int step = 0; step < k; ++step) {
            if (std::abs(P.wavenumber(cur)) > band) {
                inside = false;
                break;
            }
            s += w[cur];
            cur = structural_target(P, cur);
        }
        if (inside && s > best) {
            best = s;
            if (argmax) *argmax = j;
        }
    }
    return best;
}

// Largest singular value of the k-th power of the sub-matrix |n| <= band.
inline double direct_power_log_norm(const PeriodMap& P, int band, int k) {
    std::vector<int> idx;
    for (int i = 0; i < P.dim(); ++i)
        if (std::abs(P.wavenumber(i)) <= band) idx.push_back(i);
    int d = int(idx.size());
    Eigen::MatrixXcd S(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) S(a, b) = P.entry(idx[a], idx[b]);
    Eigen::MatrixXcd Pk = Eigen::MatrixXcd::Identity(d, d);
    for (int i = 0; i < k; ++i) Pk = S * Pk;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Pk);
    double s = svd.singularValues()(0);
    return s > 0.0 ? std::log(s) : -std::numeric_limits<double>::infinity();
}

struct LogRadius {
    double log_radius = 0.0;
    double log_cycle_mean = 0.0;
    bool balanced = false;
};

// The truncation closes the shift chains into one cycle through the edge
// modes. Walking the dominant entries gives a potential phi with which
// D^{-1} P D has equal weights e^m along the cycle; the eigen-solve then runs
// on e^{-m} D^{-1} P D, whose entries are O(1).
inline LogRadius log_spectral_radius(const PeriodMap& P) {
    int d = P.dim();
    std::vector<int> succ(d);
    std::vector<double> w(d);
    for (int j = 0; j < d; ++j) {
        Eigen::Index i;
        P.scaled.col(j).cwiseAbs().maxCoeff(&i);
        succ[j] = int(i);
        w[j] = P.log_abs(int(i), j);
    }
    std::vector<double> phi(d, 0.0);
    std::vector<char> seen(d, 0);
    int j = 0, len = 0;
    double total = 0.0;
    while (!seen[j] && std::isfinite(w[j])) {
        seen[j] = 1;
        total += w[j];
        ++len;
        j = succ[j];
    }
    LogRadius out;
    Eigen::MatrixXcd B(d, d);
    if (j == 0 && len == d) {
        out.balanced = true;
        out.log_cycle_mean = total / d;
        double m = out.log_cycle_mean;
        for (int k = 0, cur = 0; k < d - 1; ++k, cur = succ[cur]) phi[succ[cur]] = phi[cur] + w[cur] - m;
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                double l = P.col_log[b] + phi[b] - phi[a] - m;
                B(a, b) = P.scaled(a, b) == 0.0 ? cplx{} : P.scaled(a, b) * std::exp(l);
            }
    } else {
        out.log_cycle_mean = std::numeric_limits<double>::quiet_NaN();
        B = P.dense();
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(B, false);
    if (es.info() != Eigen::Success) throw ResolutionError("spectral radius: eigen-solve did not converge");
    double rho = es.eigenvalues().cwiseAbs().maxCoeff();
    out.log_radius = (rho > 0.0 ? std::log(rho) : -std::numeric_limits<double>::infinity()) +
                     (out.balanced ? out.log_cycle_mean : 0.0);
    return out;
}

inline SpectralReport spectral_analysis(const PeriodMap& P, int N_powers, double K_fit = 0.0, int band = -1) {
    if (band < 0) band = P.N_max - 2;
    SpectralReport r;
    auto w = detail::target_logs(P);
    std::vector<double> xs;
    for (int k = 1; k <= N_powers; ++k) {
        int arg = -1;
        double l = chain_log_norm(P, w, k, band, &arg);
        r.powers.push_back(k);
        r.log_norms.push_back(l);
        r.argmax_column.push_back(arg);
        xs.push_back(k);
        r.sum_k2_bound.push_back(-K_fit * P.T * k * (k + 1.0) * (2.0 * k + 1.0) / 6.0);
    }
    r.fit = fit_cubic(xs, r.log_norms);
    r.gelfand_bound = std::exp(r.log_norms.back() / N_powers);

    auto lr = log_spectral_radius(P);
    r.log_spectral_radius = lr.log_radius;
    r.balanced = lr.balanced;
    r.log_cycle_radius = lr.log_cycle_mean;
    r.spectral_radius = std::exp(r.log_spectral_radius);
    return r;
}

// ---------------------------------------------------------------------------
// Direct simulation of the linear counterexample.

struct DecayReport {
    std::vector<double> times;
    std::vector<double> l2;
    FourierField final_state;
    CubicFit tail_fit;
};

inline DecayReport simulate_linear_decay(const FourierField& u0, int n_periods, const CounterexampleConfig& c,
                                         double dt = 1e-3, int stride = 10) {
    if (u0.n_components() != 2) throw ConfigError("simulate_linear_decay: need two components");
    CounterexampleFlow flow{&c};
    auto tr = integrate_system(flow, u0, 0.0, 2.0 * c.T * n_periods, dt, {.stride = stride});
    DecayReport r;
    r.times = tr.times;
    std::vector<double> ts, ls;
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
        double v = l2_norm(tr.states[i]);
        r.l2.push_back(v);
        if (tr.times[i] >= c.T && v > 0.0) {
            ts.push_back(tr.times[i]);
            ls.push_back(std::log(v));
        }
    }
    if (ts.size() >= 3) r.tail_fit = fit_cubic(ts, ls);
    r.final_state = tr.final_state();
    return r;
}

// ---------------------------------------------------------------------------
// Autonomous extended system: components (y, z, v, u), all complex.

struct ExtendedOptions {
    int N_max = 64;
    double dt = 1e-3;
    int n_periods = 4;
    int stride = 10;
    Plateau cutoff{0.25, 0.5};  // 1 for |U|^2 <= 1/4, 0 for |U|^2 >= 1/2
};

namespace detail {

// Nonlinear part of the (y, z, v, u) equations at one grid point; adv = -1
// gives the reflected equations.
inline void extended_point(const CounterexampleConfig& c, const Plateau& phi, const cplx* U, cplx vx, double adv,
                           cplx* out) {
    cplx y = U[0], z = U[1], v = U[2], u = U[3];
    out[0] = y * (1.0 - std::norm(y));
    out[1] = -z * std::norm(z);
    double s = y.imag();
    double t1p = c.epsilon * c.theta1(s), t1m = c.epsilon * c.theta1(-s), t2 = c.theta2(s);
    cplx lv = (adv * cplx(0.0, 2.0) * vx - v) * t2 - t1p * std::conj(z) * u - t1m * u;
    cplx lu = t1p * z * v + t1m * v;
    double r2 = std::norm(v) + std::norm(u);
    double p = phi(r2);
    out[2] = p * lv + (1.0 - p) * (v - v * r2);
    out[3] = p * lu + (1.0 - p) * (u - u * r2);
}

inline cplx extended_symbol(int n, int comp, double T) {
    double n2 = double(n) * n;
    switch (comp % 4) {
        case 0: return cplx(-n2, pi / T);
        case 1: return -n2 + 2.0;
        default: return -n2;
    }
}

}  // namespace detail

struct ExtendedFlow {
    const CounterexampleConfig* cfg;
    Plateau cutoff{0.25, 0.5};
    int n_components() const { return 4; }
    cplx linear_symbol(int n, int c) const { return detail::extended_symbol(n, c, cfg->T); }
    FourierField nonlinear(double, const FourierField& s) const { return evaluate(s, 1.0); }

    FourierField evaluate(const FourierField& s, double adv) const {
        FourierField vx = derivative(s.extract(2));
        return pointwise_apply({&s, &vx}, 4, [&](const cplx* in, cplx* out, double) {
            detail::extended_point(*cfg, cutoff, in, in[4], adv, out);
        });
    }
};

// y = 1, z = e^{ix}, (v, u) given.
inline FourierField extended_initial(int N_max, const FourierField& vu) {
    FourierField s(N_max, 4);
    s(0, 0) = 1.0;
    s(1, 1) = 1.0;
    if (!vu.empty()) {
        s.assign(2, vu, 0);
        s.assign(3, vu, 1);
    }
    return s;
}

inline double pair_part_norm(const FourierField& s, int off = 2) {
    double a = phi_norm(s.extract(off)), b = phi_norm(s.extract(off + 1));
    return std::sqrt(a * a + b * b);
}

struct ExtendedReport {
    std::vector<double> times;
    std::vector<double> diff_norm;           // ||U1 - U2||_Phi
    std::vector<double> circle_y, circle_z;  // max_x ||y| - 1|, max_x ||z| - 1| per period
    double max_circle = 0.0;
    double max_pair_u1 = 0.0;  // size of the (v, u) part of U1
    double identical_gap = 0.0;
    CubicFit fit;
    bool alarm = false;
};

namespace detail {

inline double circle_residual(const FourierField& s, int comp) {
    int M = dealiased_size(s.n_max());
    auto g = to_physical(s.extract(comp), M);
    double r = 0.0;
    for (int j = 0; j < M; ++j) r = std::max(r, std::abs(std::abs(g(j, 0)) - 1.0));
    return r;
}

}  // namespace detail

// Two runs: U1 with (v, u) = 0 and U2 with (v, u) = perturbation.
inline ExtendedReport extended_nonlinear_run(const CounterexampleConfig& c, const FourierField& perturbation,
                                             const ExtendedOptions& opt = {}, double circle_tol = 1e-6) {
    FourierField pert = perturbation.empty() ? FourierField(opt.N_max, 2) : perturbation.resized(opt.N_max);
    ExtendedFlow flow{&c, opt.cutoff};
    double t_end = 2.0 * c.T * opt.n_periods;
    Trajectory a, b;
    parallel_for(2, [&](std::size_t i) {
        auto u0 = extended_initial(opt.N_max, i == 0 ? FourierField(opt.N_max, 2) : pert);
        (i == 0 ? a : b) = integrate_system(flow, u0, 0.0, t_end, opt.dt, {.stride = opt.stride});
    });
    ExtendedReport r;
    std::vector<double> ts, ls;
    double period = 2.0 * c.T;
    int next_period = 1;
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        FourierField d = b.states[i] - a.states[i];
        double dn = phi_norm(d);
        r.times.push_back(a.times[i]);
        r.diff_norm.push_back(dn);
        r.identical_gap = std::max(r.identical_gap, std::max(phi_norm(d.extract(0)), phi_norm(d.extract(1))));
        r.max_pair_u1 = std::max(r.max_pair_u1, pair_part_norm(a.states[i]));
        if (dn > 0.0) {
            ts.push_back(a.times[i]);
            ls.push_back(std::log(dn));
        }
        if (a.times[i] >= next_period * period - 1e-9) {
            double cy = std::max(detail::circle_residual(a.states[i], 0), detail::circle_residual(b.states[i], 0));
            double cz = std::max(detail::circle_residual(a.states[i], 1), detail::circle_residual(b.states[i], 1));
            r.circle_y.push_back(cy);
            r.circle_z.push_back(cz);
            r.max_circle = std::max({r.max_circle, cy, cz});
            ++next_period;
        }
    }
    if (ts.size() >= 3) r.fit = fit_cubic(ts, ls);
    r.alarm = r.max_circle > circle_tol;
    return r;
}

// ---------------------------------------------------------------------------
// Mixed boundary conditions through the reflection x -> 2 pi - x, which acts
// on coefficients as n -> -n. Components: sym(y, z, v, u), alt(y, z, v, u).

inline FourierField reflect(const FourierField& s) {
    FourierField r(s.n_max(), s.n_components());
    for (int c = 0; c < s.n_components(); ++c)
        for (int n = -s.n_max(); n <= s.n_max(); ++n) r(n, c) = s(-n, c);
    return r;
}

struct SymmetrizedFlow {
    const CounterexampleConfig* cfg;
    Plateau cutoff{0.25, 0.5};
    int n_components() const { return 8; }
    cplx linear_symbol(int n, int c) const { return detail::extended_symbol(n, c, cfg->T); }
    FourierField nonlinear(double, const FourierField& s) const {
        int N = s.n_max();
        FourierField U(N, 4), Ur(N, 4);
        for (int c = 0; c < 4; ++c)
            for (int n = -N; n <= N; ++n) {
                U(n, c) = 0.5 * (s(n, 4 + c) + s(n, c));
                Ur(n, c) = 0.5 * (s(n, c) - s(n, 4 + c));
            }
        ExtendedFlow ext{cfg, cutoff};
        FourierField a = ext.evaluate(U, 1.0), b = ext.evaluate(Ur, -1.0);
        FourierField out(N, 8);
        for (int c = 0; c < 4; ++c)
            for (int n = -N; n <= N; ++n) {
                out(n, c) = a(n, c) + b(n, c);
                out(n, 4 + c) = a(n, c) - b(n, c);
            }
        return out;
    }
};

inline FourierField symmetrize(const FourierField& U) {
    FourierField R = reflect(U), s(U.n_max(), 2 * U.n_components());
    int m = U.n_components();
    for (int c = 0; c < m; ++c)
        for (int n = -U.n_max(); n <= U.n_max(); ++n) {
            s(n, c) = U(n, c) + R(n, c);
            s(n, m + c) = U(n, c) - R(n, c);
        }
    return s;
}

inline FourierField desymmetrize(const FourierField& s) {
    int m = s.n_components() / 2;
    FourierField U(s.n_max(), m);
    for (int c = 0; c < m; ++c)
        for (int n = -s.n_max(); n <= s.n_max(); ++n) U(n, c) = 0.5 * (s(n, c) + s(n, m + c));
    return U;
}

struct SymmetrizeReport {
    double reconstruction = 0.0;   // max ||(alt + sym)/2 - U_direct||_Phi
    double dirichlet_trace = 0.0;  // max |alt| at x = 0 and x = pi
    double neumann_flux = 0.0;     // max |d_x sym| at x = 0 and x = pi
    double projection = 0.0;       // reflection-parity residual of sym and alt
    std::vector<double> times, pair_diff;
    CubicFit fit;
    bool alarm = false;
};

inline SymmetrizeReport symmetrize_mixed_bc(const CounterexampleConfig& c, const FourierField& perturbation,
                                            const ExtendedOptions& opt = {}, double tol = 1e-8) {
    FourierField pert = perturbation.resized(opt.N_max);
    double t_end = 2.0 * c.T * opt.n_periods;
    SymmetrizedFlow sf{&c, opt.cutoff};
    ExtendedFlow ef{&c, opt.cutoff};
    FourierField U1 = extended_initial(opt.N_max, FourierField(opt.N_max, 2));
    FourierField U2 = extended_initial(opt.N_max, pert);
    Trajectory s1, s2, direct;
    parallel_for(3, [&](std::size_t i) {
        IntegrateOptions io{.stride = opt.stride};
        if (i == 0) s1 = integrate_system(sf, symmetrize(U1), 0.0, t_end, opt.dt, io);
        if (i == 1) s2 = integrate_system(sf, symmetrize(U2), 0.0, t_end, opt.dt, io);
        if (i == 2) direct = integrate_system(ef, U2, 0.0, t_end, opt.dt, io);
    });
    SymmetrizeReport r;
    std::vector<double> ts, ls;
    for (std::size_t i = 0; i < s2.times.size(); ++i) {
        const auto& s = s2.states[i];
        r.reconstruction = std::max(r.reconstruction, phi_norm(desymmetrize(s) - direct.states[i]));
        FourierField sx = derivative(s);
        for (int comp = 0; comp < 4; ++comp)
            for (double x : {0.0, pi}) {
                r.dirichlet_trace = std::max(r.dirichlet_trace, std::abs(evaluate(s, x, 4 + comp)));
                r.neumann_flux = std::max(r.neumann_flux, std::abs(evaluate(sx, x, comp)));
            }
        FourierField R = reflect(s);
        for (int comp = 0; comp < 4; ++comp) {
            r.projection = std::max(r.projection, phi_norm(R.extract(comp) - s.extract(comp)));
            r.projection = std::max(r.projection, phi_norm(R.extract(4 + comp) + s.extract(4 + comp)));
        }
        double d = phi_norm(desymmetrize(s) - desymmetrize(s1.states[i]));
        r.times.push_back(s2.times[i]);
        r.pair_diff.push_back(d);
        if (d > 0.0) {
            ts.push_back(s2.times[i]);
            ls.push_back(std::log(d));
        }
    }
    if (ts.size() >= 3) r.fit = fit_cubic(ts, ls);
    r.alarm = r.reconstruction > tol || r.dirichlet_trace > tol;
    return r;
}

// ---------------------------------------------------------------------------
// Checks that depend on T, and the smallest T in a grid at which they all hold.

struct TChecks {
    double T = 0.0;
    double phase_defect = 0.0;
    double max_leak = 0.0;
    double min_mass_fraction = 0.0;
    double max_mu_rel = 0.0;
    double spectral_radius = 0.0;
    bool pass = false;
};

inline TChecks structural_checks(double T, int N_max, int mu_band = 6, double tol = 1e-6) {
    TChecks r;
    r.T = T;
    auto c = make_counterexample(T, N_max);
    auto ph = phase_defects(c);
    r.phase_defect = std::max(std::abs(ph[0]), std::abs(ph[1]));
    auto P = assemble_block_map(c);
    r.max_leak = P.max_leak;
    r.min_mass_fraction = structure_check(P, tol).min_mass_fraction;
    int band = std::min(mu_band, N_max - 2);
    r.max_mu_rel = multiplier_report(P, c, -band, band, tol).max_mu_rel;
    r.spectral_radius = spectral_analysis(P, 1).spectral_radius;
    r.pass = r.phase_defect < 1e-8 && r.min_mass_fraction >= 1.0 - tol && r.max_mu_rel < tol &&
             r.spectral_radius < 1e-8;
    return r;
}

inline std::vector<TChecks> sweep_T(const std::vector<double>& Ts, int N_max) {
    std::vector<TChecks> out;
    for (double T : Ts) out.push_back(structural_checks(T, N_max));
    return out;
}

// ---------------------------------------------------------------------------
// Output

inline void write_period_map_csv(std::ostream& os, const PeriodMap& P) {
    full_precision(os);
    os << "row,col,row_mode,col_mode,log_abs,phase\n";
    for (int j = 0; j < P.dim(); ++j)
        for (int i = 0; i < P.dim(); ++i)
            os << i << ',' << j << ',' << P.label(i) << ',' << P.label(j) << ',' << P.log_abs(i, j) << ','
               << std::arg(P.scaled(i, j)) << '\n';
}

inline nlohmann::json to_json(const CubicFit& f) { return {{"gamma", f.gamma}, {"C", std::exp(f.logC)}, {"logC", f.logC}, {"R2", f.r2}}; }

inline nlohmann::json to_json(const SpectralReport& r) {
    return {{"powers", r.powers},          {"log_norms", r.log_norms},
            {"fit", to_json(r.fit)},       {"spectral_radius", r.spectral_radius},
            {"log_spectral_radius", r.log_spectral_radius}, {"balanced", r.balanced},
            {"gelfand_bound", r.gelfand_bound}};
}

inline void write_pair_csv(std::ostream& os, const std::vector<double>& t, const std::vector<double>& d) {
    full_precision(os);
    os << "t,diff_norm\n";
    for (std::size_t i = 0; i < t.size(); ++i) os << t[i] << ',' << d[i] << '\n';
}

}  // namespace rdalab
