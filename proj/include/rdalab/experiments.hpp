#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <sstream>

#include "config.hpp"
#include "cone.hpp"
#include "floquet.hpp"
#include "json.hpp"
#include "sampling.hpp"
#include "transformed.hpp"

// Verification campaigns shared by the command-line runner and the
// acceptance driver. Each returns a JSON summary plus named artifacts.
namespace rdalab::experiments {

struct Artifact {
    std::string name;  // file name including extension
    std::string content;
};

struct Alarm {
    AlarmCode code;
    std::string kind;
    std::string message;
};

struct Outcome {
    nlohmann::json summary = nlohmann::json::object();
    std::vector<Artifact> files;
    std::optional<Alarm> alarm;

    bool pass() const { return !alarm.has_value(); }
    void raise(AlarmCode code, const std::string& kind, const std::string& message) {
        if (!alarm) alarm = Alarm{code, kind, message};
    }
    void add_json(const std::string& name, const nlohmann::json& j) { files.push_back({name + ".json", j.dump(2) + "\n"}); }
    void add_csv(const std::string& name, const std::string& text) { files.push_back({name + ".csv", text}); }
};

namespace detail {

// Rows of doubles under a header, 17 significant digits.
inline std::string csv(const std::string& header, const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    full_precision(os) << header << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    }
    return os.str();
}

template <class F>
std::string to_text(F&& writer) {
    std::ostringstream os;
    writer(os);
    return os.str();
}

inline std::uint64_t seed_of(const ExperimentConfig& cfg, std::uint64_t fallback) {
    return std::uint64_t(cfg.get_int("seed", long(fallback)));
}

inline std::vector<int> ints(const std::vector<long>& v) { return {v.begin(), v.end()}; }

inline double log_slope(const std::vector<int>& K, const std::vector<double>& y) {
    std::vector<double> lk, ly;
    for (std::size_t i = 0; i < K.size(); ++i) {
        lk.push_back(std::log(double(K[i])));
        ly.push_back(std::log(y[i]));
    }
    return rdalab::detail::slope_fit(lk, ly);
}

inline RDASystem system_from(const ExperimentConfig& cfg, const std::string& f_def, double fa_def, const std::string& g_def,
                             double ga_def, double cut_def) {
    return catalog_system(cfg.get_string("f", f_def), cfg.get_double("f_amp", fa_def), cfg.get_string("g", g_def),
                          cfg.get_double("g_amp", ga_def), cfg.get_double("cutoff", cut_def));
}

}  // namespace detail

inline const std::set<std::string> common_keys = {"experiment", "seed", "out", "format"};

inline std::set<std::string> with_common(std::set<std::string> keys) {
    keys.insert(common_keys.begin(), common_keys.end());
    return keys;
}

// ---------------------------------------------------------------------------
// simulate

inline const std::set<std::string> simulate_keys =
    with_common({"system", "f", "f_amp", "g", "g_amp", "cutoff", "n_max", "t_end", "dt", "stride", "radius", "decay",
                 "tol"});

// system = linear-heat: u0 = 1, so ||u(t)|| / ||u0|| should equal e^{-t}.
inline Outcome simulate(const ExperimentConfig& cfg) {
    cfg.require_known(simulate_keys);
    Outcome out;
    std::string kind = cfg.get_string("system", "linear-heat");
    int n_max = int(cfg.get_int("n_max", 32));
    double t_end = cfg.get_double("t_end", 1.0), dt = cfg.get_double("dt", 1e-3);
    int stride = int(cfg.get_int("stride", 10));
    double tol = cfg.get_double("tol", 1e-9);
    if (n_max < 1 || t_end <= 0.0 || dt <= 0.0 || stride < 1) throw ConfigError("simulate: n_max, t_end, dt, stride must be positive");

    RDASystem sys;
    FourierField u0(n_max);
    if (kind == "linear-heat") {
        sys = catalog_system("zero", 0.0, "zero", 0.0, 0.0);
        u0(0) = 1.0;
    } else if (kind == "catalog") {
        sys = detail::system_from(cfg, "tanh", 1.0, "cubic", 1.0, 4.0);
        std::mt19937_64 rng(detail::seed_of(cfg, 1));
        u0 = random_ball_field(n_max, rng, cfg.get_double("radius", 2.0), cfg.get_double("decay", 0.3));
    } else {
        throw ConfigError("simulate: unknown system '" + kind + "' (linear-heat, catalog)");
    }
    auto tr = integrate(u0, 0.0, t_end, sys, dt, {.stride = stride, .stop_on_divergence = true});
    auto norms = norm_series(tr);
    out.add_csv("norms", detail::to_text([&](std::ostream& os) { write_norm_series_csv(os, norms); }));
    out.summary["system"] = kind;
    out.summary["samples"] = norms.size();
    out.summary["dt"] = tr.dt;
    if (tr.diverged) {
        out.summary["divergence_time"] = tr.divergence_time;
        out.raise(AlarmCode::numerical, "divergence", "simulate: blow-up at t = " + std::to_string(tr.divergence_time));
    }
    if (kind == "linear-heat") {
        double dev = 0.0;
        for (const auto& s : norms) dev = std::max(dev, std::abs(s.l2 / norms.front().l2 - std::exp(-s.t)));
        out.summary["max_deviation_from_exp"] = dev;
        if (dev > tol) out.raise(AlarmCode::numerical, "resolution", "simulate: heat norm deviates from e^{-t}");
    } else {
        auto rep = dissipativity_report(tr);
        out.summary["smoothing_Q"] = rep.smoothing_Q;
        out.summary["dissipativity_violation"] = rep.any_violation();
        if (rep.any_violation()) out.raise(AlarmCode::numerical, "dissipativity", "simulate: dissipativity bound violated");
    }
    return out;
}

// Heat-mode decay, step-halving order and variational agreement.
inline Outcome solver_fidelity() {
    Outcome out;
    auto heat = catalog_system("zero", 0, "zero", 0, 0);
    double heat_err = 0.0;
    for (int n : {0, 1, 2, 4, 9}) {
        auto u1 = integrate(FourierField::mode(16, n), 0, 1, heat, 1e-3).final_state();
        heat_err = std::max(heat_err, std::abs(u1(n) - std::exp(-(n * n + 1.0))));
    }
    auto sys = catalog_system("identity", 1.0, "cubic", 0.5, 10.0);
    auto u0 = from_trig(32, 0.2, {{1, 1.5}}, {{2, 0.8}});
    auto ref = integrate(u0, 0, 0.5, sys, 0.5 / 800).final_state();
    double e1 = l2_norm(integrate(u0, 0, 0.5, sys, 0.5 / 25).final_state() - ref);
    double e2 = l2_norm(integrate(u0, 0, 0.5, sys, 0.5 / 50).final_state() - ref);

    auto vsys = catalog_system("sin", 1.0, "cubic", 0.5, 3.0);
    auto v0 = from_trig(32, 0.2, {{1, 1.0}}, {{2, 0.5}});
    auto xi0 = from_trig(32, 0, {{1, 0.4}}, {{3, 0.3}});
    auto xi = integrate_variational(v0, xi0, 0, 0.5, vsys, 1e-3).final_state().extract(1);
    auto base = integrate(v0, 0, 0.5, vsys, 1e-3).final_state();
    std::vector<double> verr;
    for (double h : {1e-3, 1e-4}) {
        auto pert = integrate(v0 + h * xi0, 0, 0.5, vsys, 1e-3).final_state();
        verr.push_back(phi_norm(xi - (pert - base) * (1.0 / h)));
    }
    out.summary = {{"heat_mode_error", heat_err},
                   {"order_ratio", e1 / e2},
                   {"observed_order", std::log2(e1 / e2)},
                   {"variational_error", verr},
                   {"variational_ratio", verr[0] / verr[1]}};
    return out;
}

// ---------------------------------------------------------------------------
// diffeo-probe

inline const std::set<std::string> diffeo_keys =
    with_common({"K", "n_max_R", "samples", "radius", "n_max", "roundtrip_K", "w1inf_K", "w1inf_samples", "f",
                 "f_amp", "cutoff", "slope_tol", "roundtrip_tol", "w1inf_tol"});

inline Outcome diffeo_probe(const ExperimentConfig& cfg) {
    cfg.require_known(diffeo_keys);
    Outcome out;
    auto Ks = detail::ints(cfg.get_int_list("K", {8, 16, 32, 64}));
    int nR = int(cfg.get_int("n_max_R", 256));
    for (int K : Ks)
        if (K < 1 || K > nR) throw ConfigError("diffeo-probe: K must lie in [1, n_max_R]");

    // Contraction factor of the smoothing operator on a rough phi.
    FourierField phi(nR);
    for (int n = 1; n <= nR; ++n) phi(n) = phi(-n) = 0.5 * std::pow(double(n), -0.6);
    auto psi = from_trig(nR, 1.0, {{1, 0.3}}, {{2, 0.2}});
    std::vector<double> factor(Ks.size());
    parallel_for(Ks.size(), [&](std::size_t i) { factor[i] = R_operator_norm(phi, psi, Ks[i]); });
    double slope = detail::log_slope(Ks, factor);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < Ks.size(); ++i) rows.push_back({double(Ks[i]), factor[i]});
    out.add_csv("r_factor", detail::csv("K,factor", rows));

    auto f = with_cutoff(catalog_map(cfg.get_string("f", "tanh"), cfg.get_double("f_amp", 1.0)), cfg.get_double("cutoff", 4.0));
    std::mt19937_64 rng(detail::seed_of(cfg, 5));
    int samples = int(cfg.get_int("samples", 50)), n_max = int(cfg.get_int("n_max", 64));
    int K_rt = int(cfg.get_int("roundtrip_K", 32));
    double radius = cfg.get_double("radius", 5.0);
    std::vector<FourierField> us;
    for (int s = 0; s < samples; ++s) us.push_back(random_ball_field(n_max, rng, radius));
    std::vector<double> rt(samples);
    parallel_for(us.size(), [&](std::size_t i) { rt[i] = phi_norm(U_map(W_map(us[i], K_rt, f), K_rt, f) - us[i]); });
    rows.clear();
    for (int s = 0; s < samples; ++s) rows.push_back({double(s), rt[s]});
    out.add_csv("roundtrip", detail::csv("sample,h1_error", rows));
    double rt_max = samples ? *std::max_element(rt.begin(), rt.end()) : 0.0;

    // W^{1,inf} of a and 1/a over a K sweep on a common sample set.
    auto wK = detail::ints(cfg.get_int_list("w1inf_K", {8, 16, 32, 64, 128}));
    int wn = *std::max_element(wK.begin(), wK.end());
    std::vector<FourierField> ws;
    for (int s = 0; s < int(cfg.get_int("w1inf_samples", 10)); ++s) ws.push_back(random_ball_field(wn, rng, radius));
    std::vector<double> bound(wK.size(), 0.0);
    parallel_for(wK.size(), [&](std::size_t i) {
        for (const auto& u : ws) bound[i] = std::max(bound[i], forward_a(u, wK[i], f).w1inf_bound());
    });
    double bmax = *std::max_element(bound.begin(), bound.end()), bmin = *std::min_element(bound.begin(), bound.end());
    rows.clear();
    for (std::size_t i = 0; i < wK.size(); ++i) rows.push_back({double(wK[i]), bound[i]});
    out.add_csv("w1inf", detail::csv("K,w1inf_bound", rows));

    double variation = bmax / bmin - 1.0;
    out.summary = {{"K", Ks},
                   {"r_factor", factor},
                   {"r_slope", slope},
                   {"roundtrip_K", K_rt},
                   {"roundtrip_samples", samples},
                   {"roundtrip_max", rt_max},
                   {"w1inf_K", wK},
                   {"w1inf_bound", bound},
                   {"w1inf_variation", variation}};
    if (std::abs(slope + 0.5) > cfg.get_double("slope_tol", 0.2))
        out.raise(AlarmCode::numerical, "k_slope", "diffeo-probe: contraction slope outside -1/2 band");
    if (rt_max >= cfg.get_double("roundtrip_tol", 1e-7))
        out.raise(AlarmCode::numerical, "roundtrip", "diffeo-probe: round-trip error too large");
    if (variation >= cfg.get_double("w1inf_tol", 0.1))
        out.raise(AlarmCode::numerical, "w1inf", "diffeo-probe: W^{1,inf} bound not uniform in K");
    return out;
}

// ---------------------------------------------------------------------------
// transform-check

inline const std::set<std::string> transform_keys =
    with_common({"K", "conj_K", "conj_t_end", "conj_dt", "conj_radius", "conj_n_max", "lip_K", "lip_n_max", "tail_N",
                 "tail_K", "tail_kappa", "tail_t_end", "tail_dt", "tail_inflate", "conj_tol", "slope_tol",
                 "tail_tol"});

inline TransformedSystem transformed_system(RDASystem base, int K, double ball = 1e6, double R = 1e6, int N = 4) {
    TransformedSystem s;
    s.base = std::move(base);
    s.K = K;
    s.theta = ball_cutoff(ball);
    s.phi = HighModeCutoff{R};
    s.N = N;
    return s;
}

inline Outcome transform_check(const ExperimentConfig& cfg) {
    cfg.require_known(transform_keys);
    Outcome out;
    std::uint64_t seed = detail::seed_of(cfg, 23);
    auto tanh_cubic = catalog_system("tanh", 1.0, "cubic", 1.0, 4.0);

    // Conjugacy of the two flows.
    std::mt19937_64 rng(seed);
    int cK = int(cfg.get_int("conj_K", cfg.get_int("K", 32)));
    auto u0 = random_ball_field(int(cfg.get_int("conj_n_max", 64)), rng, cfg.get_double("conj_radius", 2.0), 0.3);
    auto conj = conjugacy_check(u0, cfg.get_double("conj_t_end", 5.0), transformed_system(tanh_cubic, cK),
                                cfg.get_double("conj_dt", 1e-2), 50);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < conj.times.size(); ++i) rows.push_back({conj.times[i], conj.residual[i]});
    out.add_csv("conjugacy", detail::csv("t,residual", rows));

    // Empirical Lipschitz constant of the averaged advection term.
    int ln = int(cfg.get_int("lip_n_max", 256));
    std::vector<FourierField> ws, ds;
    for (int k = 4; 2 * k <= ln; k *= 2)
        for (double x0 : {0.0, 1.3}) {
            ws.push_back(band_sample(ln, k, x0, 2.0));
            ds.push_back(band_sample(ln, k, x0, 1.0));
        }
    auto lK = detail::ints(cfg.get_int_list("lip_K", {8, 16, 32, 64}));
    std::vector<double> lip(lK.size());
    auto advect = catalog_system("tanh", 1.0, "zero", 0.0, 4.0);
    parallel_for(lK.size(), [&](std::size_t i) { lip[i] = lipschitz_F1(ws, ds, transformed_system(advect, lK[i])); });
    double lip_slope = detail::log_slope(lK, lip);
    rows.clear();
    for (std::size_t i = 0; i < lK.size(); ++i) rows.push_back({double(lK[i]), lip[i]});
    out.add_csv("f1_lipschitz", detail::csv("K,lipschitz", rows));

    // High-mode tail bound from inflated tails, per N.
    auto Ns = detail::ints(cfg.get_int_list("tail_N", {8, 16, 32}));
    double kappa = cfg.get_double("tail_kappa", 0.25), inflate = cfg.get_double("tail_inflate", 0.5);
    int tK = int(cfg.get_int("tail_K", 16));
    std::vector<TailReport> tails(Ns.size());
    std::vector<FourierField> w0s;
    for (int N : Ns) {
        auto w0 = random_ball_field(std::max(64, N + 4), rng, 1.0, 0.2);
        for (int n = N + 1; n <= N + 4; ++n) {
            w0(n) += inflate;
            w0(-n) += inflate;
        }
        w0s.push_back(w0);
    }
    parallel_for(Ns.size(), [&](std::size_t i) {
        auto sys = transformed_system(tanh_cubic, tK, 12.0, 3.0, Ns[i]);
        auto tr = integrate_system(TransformedFlow{&sys, {}}, w0s[i], 0.0, cfg.get_double("tail_t_end", 3.0),
                                   cfg.get_double("tail_dt", 1e-3), {.stride = 10});
        tails[i] = qn_tail_check(tr, kappa, Ns[i]);
    });
    rows.clear();
    nlohmann::json tail_json = nlohmann::json::array();
    double tail_tol = cfg.get_double("tail_tol", 1e-3);
    bool tails_ok = true;
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        const auto& t = tails[i];
        for (std::size_t k = 0; k < t.times.size(); ++k) rows.push_back({double(Ns[i]), t.times[k], t.tail[k]});
        bool ok = std::isfinite(t.R_min) && t.tail.back() < t.R_min + tail_tol;
        tails_ok = tails_ok && ok;
        tail_json.push_back({{"N", Ns[i]}, {"R_min", t.R_min}, {"initial", t.tail.front()}, {"final", t.tail.back()}, {"contracted", ok}});
    }
    out.add_csv("qn_tail", detail::csv("N,t,tail", rows));

    out.summary = {{"conjugacy_max", conj.max_residual},
                   {"conjugacy_K", cK},
                   {"lip_K", lK},
                   {"f1_lipschitz", lip},
                   {"f1_slope", lip_slope},
                   {"tail_kappa", kappa},
                   {"tails", tail_json}};
    if (conj.max_residual >= cfg.get_double("conj_tol", 1e-5))
        out.raise(AlarmCode::numerical, "conjugacy", "transform-check: flows are not conjugate to tolerance");
    if (std::abs(lip_slope + 0.5) > cfg.get_double("slope_tol", 0.2))
        out.raise(AlarmCode::numerical, "k_slope", "transform-check: Lipschitz slope outside -1/2 band");
    if (!tails_ok) out.raise(AlarmCode::structural, "tail", "transform-check: high-mode tail did not contract");
    return out;
}

// ---------------------------------------------------------------------------
// cone

inline const std::set<std::string> cone_keys =
    with_common({"K", "N", "neg_K", "samples", "n_max", "probe_n_max", "probe_radius", "radius", "t_end", "dt",
                 "pre_run", "tol", "f_amp", "g_amp", "ball", "R"});

inline TransformedSystem cone_system(const ExperimentConfig& cfg, int K, int N) {
    TransformedSystem s;
    s.base = catalog_system("tanh", cfg.get_double("f_amp", 0.5), "cubic", cfg.get_double("g_amp", 0.5), 4.0);
    s.K = K;
    s.N = N;
    s.theta = ball_cutoff(cfg.get_double("ball", 9.0));
    s.phi = HighModeCutoff{cfg.get_double("R", 3.0)};
    return s;
}

inline Outcome cone(const ExperimentConfig& cfg) {
    cfg.require_known(cone_keys);
    Outcome out;
    int K = int(cfg.get_int("K", 32)), neg_K = int(cfg.get_int("neg_K", 2));
    std::mt19937_64 rng(detail::seed_of(cfg, 7));

    // Constants are measured once, at a resolution above any K used.
    auto ps = probe_samples(int(cfg.get_int("probe_n_max", 128)), cfg.get_double("probe_radius", 4.0), rng, 8);
    auto consts = measure_constants(cone_system(cfg, K, 4), ps);
    auto scan = gap_audit(1, K, consts);
    int N = int(cfg.get_int("N", scan.minimal_N));
    if (N < 1) throw StructuralAlarm("cone: gap audit found no admissible N at K = " + std::to_string(K));
    auto audit = gap_audit(N, K, consts);
    auto neg = gap_audit(N, neg_K, consts);
    out.add_json("gap_audit", to_json(audit));
    out.add_json("negative_audit", to_json(neg));

    int samples = int(cfg.get_int("samples", 100)), n_max = int(cfg.get_int("n_max", 64));
    double radius = cfg.get_double("radius", 3.0);
    std::vector<FourierField> w0s, xi0s;
    for (int s = 0; s < samples; ++s) {
        w0s.push_back(random_ball_field(n_max, rng, radius));
        xi0s.push_back(random_sphere_field(n_max, rng, 1.0, 0.1));
    }
    ConeOptions opt;
    opt.dt = cfg.get_double("dt", 1e-3);
    opt.tol = cfg.get_double("tol", 1e-6);
    opt.pre_run = cfg.get_double("pre_run", 0.05);
    double t_end = cfg.get_double("t_end", 0.1);
    auto camp = cone_campaign(w0s, xi0s, t_end, cone_system(cfg, K, N), opt);
    std::vector<std::vector<double>> rows;
    for (int s = 0; s < samples; ++s) {
        const auto& r = camp.runs[s];
        rows.push_back({double(s), double(r.violations), r.max_residual, r.max_integrated, r.blowup ? 1.0 : 0.0});
    }
    out.add_csv("campaign", detail::csv("sample,violations,max_residual,max_integrated,blowup", rows));
    if (samples > 0) out.add_csv("run0", detail::to_text([&](std::ostream& os) { write_cone_csv(os, camp.runs[0]); }));

    int flips = 0;
    for (int i = 0; i < 5; ++i) flips += (audit.brackets[i] >= 0.0) != (neg.brackets[i] >= 0.0);
    out.summary = {{"K", K},
                   {"N", N},
                   {"minimal_N", scan.minimal_N},
                   {"audit_nonnegative", audit.all_nonnegative},
                   {"samples", samples},
                   {"violations", camp.violations},
                   {"blowups", camp.blowups},
                   {"max_residual", camp.max_residual},
                   {"max_integrated", camp.max_integrated},
                   {"neg_K", neg_K},
                   {"neg_audit_nonnegative", neg.all_nonnegative},
                   {"neg_bracket_flips", flips}};
    if (!audit.all_nonnegative) out.raise(AlarmCode::structural, "gap", "cone: gap audit fails at the chosen (K, N)");
    if (!camp.pass()) out.raise(AlarmCode::structural, "cone", "cone: residual violations in the campaign");
    return out;
}

// ---------------------------------------------------------------------------
// floquet

inline const std::set<std::string> floquet_keys =
    with_common({"T", "N_max", "nmax", "method", "powers", "tol", "mu_band", "pde_dt", "pde_band", "cross_T",
                 "cross_N_max", "extended", "extended_T", "extended_N_max", "extended_periods", "extended_dt",
                 "perturbation", "symmetrize", "symmetrize_N_max", "symmetrize_periods", "sweep_T", "theta1", "theta2",
                 "r2_threshold"});

inline Ramp ramp_from(const ExperimentConfig& cfg, const std::string& key, Ramp fallback) {
    auto v = cfg.get_double_list(key, {fallback.start, fallback.end});
    if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError("floquet: " + key + " needs two increasing levels");
    return {v[0], v[1]};
}

inline AssemblyMethod method_of(const std::string& m) {
    if (m == "block") return AssemblyMethod::block_ode;
    if (m == "pde") return AssemblyMethod::full_pde;
    throw ConfigError("floquet: unknown method '" + m + "' (block, pde, both)");
}

inline Outcome floquet(const ExperimentConfig& cfg) {
    cfg.require_known(floquet_keys);
    Outcome out;
    double T = cfg.get_double("T", 10.0);
    int N_max = int(cfg.get_int("N_max", cfg.get_int("nmax", 24)));
    std::string method = cfg.get_string("method", "block");
    double tol = cfg.get_double("tol", 1e-6);
    int powers = int(cfg.get_int("powers", 6));
    double pde_dt = cfg.get_double("pde_dt", 2.5e-4);
    int pde_band = int(cfg.get_int("pde_band", 4));
    if (N_max < 3) throw ConfigError("floquet: N_max must be at least 3");
    Ramp th1 = ramp_from(cfg, "theta1", {0.25, 0.5}), th2 = ramp_from(cfg, "theta2", {0.0, 0.25});
    auto c = make_counterexample(T, N_max, th1, th2);
    auto ph = phase_defects(c);
    out.summary["T"] = T;
    out.summary["N_max"] = N_max;
    out.summary["method"] = method;
    out.summary["T0"] = c.T0;
    out.summary["epsilon"] = c.epsilon;
    out.summary["phase_defects"] = ph;

    if (method == "pde") {
        // Full integration is only meaningful while the entries stay representable.
        auto P = assemble_pde_map(c, pde_dt, pde_band);
        out.add_csv("period_map", detail::to_text([&](std::ostream& os) { write_period_map_csv(os, P); }));
        out.summary["pde_band"] = pde_band;
        return out;
    }
    if (method != "block" && method != "both") method_of(method);

    auto P = assemble_block_map(c);
    out.add_csv("period_map", detail::to_text([&](std::ostream& os) { write_period_map_csv(os, P); }));
    out.summary["max_leak"] = P.max_leak;

    auto st = structure_check(P, tol);
    out.summary["structure"] = {{"pass", st.pass()},
                                {"min_mass_fraction", st.min_mass_fraction},
                                {"columns", st.columns},
                                {"failures", st.failures},
                                {"worst_col", st.worst_col >= 0 ? P.label(st.worst_col) : ""}};
    if (!st.pass()) out.raise(AlarmCode::structural, "structure", "floquet: period map leaves the shift structure");

    int band = std::min(int(cfg.get_int("mu_band", 6)), N_max - 2);
    auto mr = multiplier_report(P, c, -band, band, tol);
    auto wide = multiplier_report(P, c, -std::min(8, N_max - 2), std::min(8, N_max - 2), tol);
    std::vector<std::vector<double>> rows;
    for (const auto& r : mr.rows)
        rows.push_back({double(r.n), r.mu.log_abs, r.mu.phase, r.nu.log_abs, r.nu.phase, r.mu_rel, r.nu_rel_same, r.nu_rel_prev});
    out.add_csv("multipliers", detail::csv("n,log_mu,phase_mu,log_nu,phase_nu,mu_rel,nu_rel_same,nu_rel_prev", rows));
    out.summary["multipliers"] = {{"band", band},
                                  {"max_mu_rel", mr.max_mu_rel},
                                  {"mu_negative", mr.mu_negative},
                                  {"nu_negative", mr.nu_negative},
                                  {"nu_index_shift", mr.nu_index_shift},
                                  {"K_fit", wide.K_fit}};
    if (mr.max_mu_rel >= tol) out.raise(AlarmCode::structural, "multiplier", "floquet: mu differs from closed form");

    auto sp = spectral_analysis(P, powers, wide.K_fit);
    double r2_threshold = cfg.get_double("r2_threshold", 0.999);
    auto sj = to_json(sp);
    sj["sum_k2_bound"] = sp.sum_k2_bound;
    sj["meets_r2_threshold"] = sp.fit.r2 > r2_threshold;
    out.summary["spectral"] = sj;
    out.add_json("decay_fit", {{"source", "log_power_norms"}, {"r2_threshold", r2_threshold}, {"fit", to_json(sp.fit)},
                               {"powers", sp.powers}, {"log_norms", sp.log_norms}});
    if (!(sp.spectral_radius < 1e-8)) out.raise(AlarmCode::structural, "spectral_radius", "floquet: truncated spectral radius not small");

    if (method == "both") {
        // Cross-validation runs where both assemblies stay in double range.
        auto cc = make_counterexample(cfg.get_double("cross_T", 1.0), int(cfg.get_int("cross_N_max", 6)), th1, th2);
        PeriodMap Pb, Pp;
        parallel_for(2, [&](std::size_t i) {
            if (i == 0) Pb = assemble_block_map(cc);
            else Pp = assemble_pde_map(cc, pde_dt, pde_band);
        });
        auto cmp = compare_maps(Pp, Pb, pde_band);
        out.add_csv("period_map_pde", detail::to_text([&](std::ostream& os) { write_period_map_csv(os, Pp); }));
        out.summary["cross_check"] = {{"T", cc.T},
                                      {"N_max", cc.N_max},
                                      {"dt", pde_dt},
                                      {"band", pde_band},
                                      {"max_rel", cmp.max_rel},
                                      {"worst", Pb.label(cmp.worst_row) + " <- " + Pb.label(cmp.worst_col)}};
        if (!(cmp.max_rel < tol)) out.raise(AlarmCode::numerical, "cross_check", "floquet: block and PDE maps disagree");
    }

    if (cfg.get_bool("extended", false) || cfg.get_bool("symmetrize", false)) {
        double eT = cfg.get_double("extended_T", 0.3);
        double amp = cfg.get_double("perturbation", 1e-3);
        if (cfg.get_bool("extended", false)) {
            ExtendedOptions eo;
            eo.N_max = int(cfg.get_int("extended_N_max", 64));
            eo.n_periods = int(cfg.get_int("extended_periods", 4));
            eo.dt = cfg.get_double("extended_dt", 1e-3);
            auto ec = make_counterexample(eT, eo.N_max, th1, th2);
            auto er = extended_nonlinear_run(ec, FourierField::mode(eo.N_max, 0, amp, 0, 2), eo);
            out.add_csv("pair_norms", detail::to_text([&](std::ostream& os) { write_pair_csv(os, er.times, er.diff_norm); }));
            out.add_json("pair_decay_fit", {{"source", "trajectory_pair"}, {"T", eT}, {"fit", to_json(er.fit)}});
            out.summary["extended"] = {{"T", eT},
                                       {"N_max", eo.N_max},
                                       {"periods", eo.n_periods},
                                       {"fit", to_json(er.fit)},
                                       {"circle_y", er.circle_y},
                                       {"circle_z", er.circle_z},
                                       {"max_circle", er.max_circle},
                                       {"identical_gap", er.identical_gap}};
            if (er.alarm) out.raise(AlarmCode::numerical, "invariant_circle", "floquet: invariant circle drifted");
        }
        if (cfg.get_bool("symmetrize", false)) {
            ExtendedOptions so;
            so.N_max = int(cfg.get_int("symmetrize_N_max", 32));
            so.n_periods = int(cfg.get_int("symmetrize_periods", 4));
            auto sc = make_counterexample(eT, so.N_max, th1, th2);
            auto sr = symmetrize_mixed_bc(sc, FourierField::mode(so.N_max, 0, amp, 0, 2), so);
            nlohmann::json sj2 = {{"T", eT},
                                  {"N_max", so.N_max},
                                  {"reconstruction", sr.reconstruction},
                                  {"dirichlet_trace", sr.dirichlet_trace},
                                  {"neumann_flux", sr.neumann_flux},
                                  {"projection", sr.projection},
                                  {"fit", to_json(sr.fit)}};
            out.add_json("symmetrize", sj2);
            out.summary["symmetrize"] = sj2;
            if (sr.alarm) out.raise(AlarmCode::structural, "reflection", "floquet: reflection consistency violated");
        }
    }

    auto Ts = cfg.get_double_list("sweep_T", {});
    if (!Ts.empty()) {
        std::vector<TChecks> sw(Ts.size());
        parallel_for(Ts.size(), [&](std::size_t i) { sw[i] = structural_checks(Ts[i], N_max); });
        rows.clear();
        double smallest = std::numeric_limits<double>::quiet_NaN();
        for (const auto& s : sw) {
            rows.push_back({s.T, s.phase_defect, s.max_leak, s.min_mass_fraction, s.max_mu_rel, s.spectral_radius, s.pass ? 1.0 : 0.0});
            if (s.pass && !(s.T >= smallest)) smallest = s.T;
        }
        out.add_csv("sweep_T", detail::csv("T,phase_defect,max_leak,min_mass_fraction,max_mu_rel,spectral_radius,pass", rows));
        out.summary["smallest_passing_T"] = smallest;
    }
    return out;
}

// ---------------------------------------------------------------------------

inline Outcome run(const std::string& name, const ExperimentConfig& cfg) {
    if (name == "simulate") return simulate(cfg);
    if (name == "diffeo-probe") return diffeo_probe(cfg);
    if (name == "transform-check") return transform_check(cfg);
    if (name == "cone") return cone(cfg);
    if (name == "floquet") return floquet(cfg);
    throw ConfigError("unknown experiment '" + name + "'");
}

}  // namespace rdalab::experiments
