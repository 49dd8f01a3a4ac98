// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>

#include "rdalab/experiments.hpp"

using namespace rdalab;
using nlohmann::json;

namespace {

struct Timed {
    experiments::Outcome outcome;
    double seconds = 0.0;
};

Timed timed(const std::function<experiments::Outcome()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    Timed t;
    try {
        t.outcome = fn();
    } catch (const Error& e) {
        t.outcome.raise(e.code(), e.kind(), e.what());
    }
    t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return t;
}

ExperimentConfig config(const std::map<std::string, std::string>& kv) {
    ExperimentConfig c;
    for (const auto& [k, v] : kv) c.set(k, v, "<acceptance>");
    return c;
}

double num(const json& j, const json::json_pointer& p) {
    return j.contains(p) && j.at(p).is_number() ? j.at(p).get<double>() : std::numeric_limits<double>::quiet_NaN();
}

int failures = 0;

void verdict(int id, const std::string& title, bool ok, const std::string& detail) {
    std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    failures += ok ? 0 : 1;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

}  // namespace

int main() {
    using P = json::json_pointer;

    // 1, 3: block assembly at T = 10, N_max = 24
    auto block = timed([] { return experiments::floquet(config({{"T", "10"}, {"N_max", "24"}, {"method", "block"}})); });
    const auto& b = block.outcome.summary;
    {
        double mass = num(b, P("/structure/min_mass_fraction")), mu = num(b, P("/multipliers/max_mu_rel"));
        bool ok = b.contains("structure") && b["structure"]["pass"].get<bool>() && mass >= 1.0 - 1e-6 && mu < 1e-6 &&
                  block.seconds < 30.0;
        verdict(1, "period-map structure", ok,
                fmt("min target mass %.15f (>= 1-1e-6), max mu rel err %.2e on n=-6..6 (< 1e-6), %.2f s (< 30 s)", mass, mu,
                    block.seconds));
    }

    // 2: block vs full PDE
    auto both = timed([] { return experiments::floquet(config({{"T", "10"}, {"N_max", "24"}, {"method", "both"}})); });
    {
        const auto& s = both.outcome.summary;
        double rel = num(s, P("/cross_check/max_rel"));
        verdict(2, "block vs PDE period map", rel < 1e-6 && both.seconds < 300.0,
                fmt("max entrywise rel dev %.2e on |n| <= 4 at T=%g, N_max=%g, dt=%g (< 1e-6), %.2f s (< 300 s)", rel,
                    num(s, P("/cross_check/T")), num(s, P("/cross_check/N_max")), num(s, P("/cross_check/dt")), both.seconds));
    }

    // 3: super-exponential law of ||P^N||
    {
        double r2 = num(b, P("/spectral/fit/R2")), gamma = num(b, P("/spectral/fit/gamma"));
        double rho = num(b, P("/spectral/spectral_radius")), lrho = num(b, P("/spectral/log_spectral_radius"));
        verdict(3, "log||P^N|| cubic law", r2 > 0.999 && gamma > 0.0 && rho < 1e-8,
                fmt("R^2 %.5f over N=1..6 (> 0.999), gamma %.4f (> 0), spectral radius exp(%.1f) (< 1e-8)", r2, gamma, lrho));
    }

    // 4: nonlinear embedding over 4 periods at N_max = 64
    auto ext = timed([] {
        return experiments::floquet(config({{"T", "10"}, {"N_max", "6"}, {"extended", "true"}, {"extended_T", "0.3"},
                                            {"extended_N_max", "64"}, {"extended_periods", "4"}}));
    });
    {
        const auto& s = ext.outcome.summary;
        double r2 = num(s, P("/extended/fit/R2")), circ = num(s, P("/extended/max_circle"));
        verdict(4, "nonlinear pair decay", r2 > 0.99 && circ < 1e-6 && ext.seconds < 600.0,
                fmt("pair-difference fit R^2 %.5f (> 0.99), gamma %.4f, max circle residual per period %.2e (< 1e-6), %.2f s "
                    "(< 600 s)",
                    r2, num(s, P("/extended/fit/gamma")), circ, ext.seconds));
    }

    // 5, 6 (contraction slope): diffeomorphism probes
    auto dif = timed([] { return experiments::diffeo_probe(config({})); });
    const auto& d = dif.outcome.summary;
    {
        double rt = num(d, P("/roundtrip_max")), var = num(d, P("/w1inf_variation"));
        verdict(5, "diffeomorphism round-trip", rt < 1e-7 && var < 0.10,
                fmt("max H1 round-trip err %.2e over %g samples at K=32, radius 5 (< 1e-7); W1inf(a, 1/a) variation %.2f%% "
                    "over K=8..128 (< 10%%)",
                    rt, num(d, P("/roundtrip_samples")), 100.0 * var));
    }

    // 6, 8, 9: transformed system
    auto tra = timed([] { return experiments::transform_check(config({})); });
    const auto& t = tra.outcome.summary;
    {
        double rs = num(d, P("/r_slope")), fs = num(t, P("/f1_slope"));
        verdict(6, "K^(-1/2) laws", std::abs(rs + 0.5) <= 0.2 && std::abs(fs + 0.5) <= 0.2,
                fmt("contraction-factor slope %.3f, F1 Lipschitz slope %.3f over K=8..64 (-0.5 +- 0.2)", rs, fs));
    }

    // 7: cone campaign
    auto con = timed([] { return experiments::cone(config({{"samples", "100"}})); });
    {
        const auto& s = con.outcome.summary;
        bool ok = s.contains("violations") && s["audit_nonnegative"].get<bool>() && s["violations"].get<int>() == 0 &&
                  s["blowups"].get<int>() == 0 && !s["neg_audit_nonnegative"].get<bool>() &&
                  s["neg_bracket_flips"].get<int>() >= 1;
        verdict(7, "strong cone property", ok,
                fmt("audited (K,N)=(%g,%g): %g violations > 1e-6 in %g runs (max residual %.3g, max step residual %.3g); "
                    "control K=%g flips %g bracket(s); %.1f s",
                    num(s, P("/K")), num(s, P("/N")), num(s, P("/violations")), num(s, P("/samples")),
                    num(s, P("/max_residual")), num(s, P("/max_integrated")), num(s, P("/neg_K")),
                    num(s, P("/neg_bracket_flips")), con.seconds));
    }

    {
        bool ok = t.contains("tails") && !t["tails"].empty();
        std::string detail;
        for (const auto& r : t.value("tails", json::array())) {
            ok = ok && r["contracted"].get<bool>();
            detail += fmt("N=%d R=%.3g final %.2e; ", r["N"].get<int>(), r["R_min"].get<double>(), r["final"].get<double>());
        }
        verdict(8, "Q_N tail invariance (kappa = 1/4)", ok, detail + "(final < R + 1e-3 from inflated tails)");
    }

    {
        double c = num(t, P("/conjugacy_max"));
        verdict(9, "conjugacy", c < 1e-5, fmt("max H1 residual %.2e up to t=5 (< 1e-5)", c));
    }

    // 10: solver fidelity
    auto fid = timed([] { return experiments::solver_fidelity(); });
    {
        const auto& s = fid.outcome.summary;
        double heat = num(s, P("/heat_mode_error")), ratio = num(s, P("/order_ratio"));
        double vr = num(s, P("/variational_ratio")), ve = num(s, P("/variational_error/0"));
        bool ok = heat < 1e-9 && ratio >= 8.0 && std::abs(vr - 10.0) <= 1.5 && ve < 1e-2;
        verdict(10, "solver fidelity", ok,
                fmt("heat-mode err %.2e at t=1 (< 1e-9); halving ratio %.1f, order %.2f (>= 3); variational err ratio %.2f "
                    "for h=1e-3/1e-4 (10 +- 1.5)",
                    heat, ratio, std::log2(ratio), vr));
    }

    for (const auto* o : {&block, &both, &ext, &dif, &tra, &con, &fid})
        if (o->outcome.alarm) std::printf("  alarm[%s]: %s\n", o->outcome.alarm->kind.c_str(), o->outcome.alarm->message.c_str());
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
