#include <Eigen/Core>
#include <boost/version.hpp>
#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "rdalab/experiments.hpp"

namespace fs = std::filesystem;
using namespace rdalab;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Common {
    std::string config_path;
    std::vector<std::string> assignments;
    std::string out = "out";
    std::string format = "all";
    long seed = -1;
};

// Flags given on the subcommand line; they override the config file and --set.
struct Overrides {
    void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        auto* slot = &store.emplace_back();
        app->add_option(flag, *slot, help);
        keys.push_back({key, slot});
    }
    void add_flag(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        auto* slot = &flags.emplace_back(false);
        app->add_flag(flag, *slot, help);
        flag_keys.push_back({key, slot});
    }
    void apply(ExperimentConfig& cfg) const {
        for (const auto& [k, v] : keys)
            if (!v->empty()) cfg.set(k, *v, "<flag>");
        for (const auto& [k, v] : flag_keys)
            if (*v) cfg.set(k, "true", "<flag>");
    }

    std::deque<std::string> store;
    std::deque<bool> flags;
    std::vector<std::pair<std::string, std::string*>> keys;
    std::vector<std::pair<std::string, bool*>> flag_keys;
};

json environment() {
    return {{"rdalab", kVersion},
            {"compiler", __VERSION__},
            {"cxx_standard", long(__cplusplus)},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"boost", BOOST_LIB_VERSION}};
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError(p.string() + ": cannot write");
    os << text;
}

bool wanted(const std::string& format, const std::string& name) {
    if (format == "all") return true;
    return name.size() > format.size() && name.compare(name.size() - format.size(), format.size(), format) == 0;
}

int run_experiment(const std::string& name, const Common& common, const Overrides& ov) {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg;
    json manifest = {{"experiment", name}, {"versions", environment()}};
    int code = 0;
    fs::path dir = fs::path(common.out) / name;
    try {
        if (!common.config_path.empty()) cfg = ExperimentConfig::load(common.config_path);
        for (const auto& a : common.assignments) cfg.set_assignment(a);
        ov.apply(cfg);
        if (common.seed >= 0) cfg.set("seed", std::to_string(common.seed), "<flag>");
        if (common.format != "all" && common.format != "csv" && common.format != "json")
            throw ConfigError("--format: expected all, csv or json, got '" + common.format + "'");
        manifest["config_hash"] = cfg.hash();
        manifest["config"] = cfg.canonical();
        if (cfg.has("seed")) manifest["seed"] = cfg.get_int("seed", 0);

        auto outcome = experiments::run(name, cfg);
        fs::create_directories(dir);
        json files = json::array();
        for (const auto& f : outcome.files)
            if (wanted(common.format, f.name)) {
                write_file(dir / f.name, f.content);
                files.push_back(f.name);
            }
        write_file(dir / "summary.json", outcome.summary.dump(2) + "\n");
        files.push_back("summary.json");
        manifest["files"] = files;
        manifest["summary"] = outcome.summary;
        if (outcome.alarm) {
            code = int(outcome.alarm->code);
            manifest["alarm"] = {{"code", code}, {"kind", outcome.alarm->kind}, {"message", outcome.alarm->message}};
            std::cerr << "alarm[" << outcome.alarm->kind << "]: " << outcome.alarm->message << '\n';
        }
    } catch (const Error& e) {
        code = int(e.code());
        manifest["alarm"] = {{"code", code}, {"kind", e.kind()}, {"message", e.what()}};
        std::cerr << "error[" << e.kind() << "]: " << e.what() << '\n';
    }
    manifest["status"] = code == 0 ? "pass" : "alarm";
    manifest["exit_code"] = code;
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fs::create_directories(dir);
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    std::cout << name << ": " << manifest["status"].get<std::string>() << " (" << std::fixed << std::setprecision(2)
              << manifest["wall_time_s"].get<double>() << " s) -> " << dir.string() << '\n';
    return code;
}

// Numeric leaves of a summary, one level of nesting, as "key=value".
std::string headline(const json& s) {
    std::ostringstream os;
    os << std::setprecision(4);
    auto emit = [&](const std::string& k, const json& v) {
        if (v.is_number_float()) os << k << '=' << v.get<double>() << ' ';
        else if (v.is_number_integer()) os << k << '=' << v.get<long>() << ' ';
        else if (v.is_boolean()) os << k << '=' << (v.get<bool>() ? "yes" : "no") << ' ';
    };
    for (const auto& [k, v] : s.items()) {
        if (v.is_object())
            for (const auto& [k2, v2] : v.items()) emit(k + "." + k2, v2);
        else
            emit(k, v);
    }
    return os.str();
}

int report(const Common& common) {
    fs::path root(common.out);
    if (!fs::is_directory(root)) throw ConfigError(root.string() + ": no such output directory");
    std::vector<fs::path> manifests;
    for (const auto& e : fs::directory_iterator(root))
        if (fs::exists(e.path() / "manifest.json")) manifests.push_back(e.path() / "manifest.json");
    std::sort(manifests.begin(), manifests.end());
    std::ostringstream table;
    table << "| experiment | status | exit | wall [s] | config hash | results |\n|---|---|---|---|---|---|\n";
    int worst = 0;
    for (const auto& p : manifests) {
        std::ifstream is(p);
        json m = json::parse(is, nullptr, false);
        if (m.is_discarded()) throw ConfigError(p.string() + ": malformed manifest");
        int code = m.value("exit_code", 0);
        worst = std::max(worst, code);
        table << "| " << m.value("experiment", "?") << " | " << m.value("status", "?") << " | " << code << " | "
              << std::fixed << std::setprecision(2) << m.value("wall_time_s", 0.0) << " | "
              << m.value("config_hash", "-") << " | " << headline(m.value("summary", json::object()));
        if (m.contains("alarm")) table << "alarm: " << m["alarm"].value("message", "");
        table << " |\n";
    }
    std::cout << table.str();
    write_file(root / "report.md", table.str());
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rdalab experiment runner"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config_path, "key = value config file");
    app.add_option("--set", common.assignments, "override a config key (key=value), repeatable");
    app.add_option("--seed", common.seed, "RNG seed");
    app.add_option("--out", common.out, "output root directory");
    app.add_option("--format", common.format, "artifacts to write: all, csv, json");
    app.set_version_flag("--version", kVersion);

    Overrides ov;
    auto* sim = app.add_subcommand("simulate", "integrate the reaction-diffusion-advection flow");
    ov.add(sim, "--system", "system", "linear-heat or catalog");
    ov.add(sim, "--n-max", "n_max", "Fourier truncation");
    ov.add(sim, "--t-end", "t_end", "final time");
    ov.add(sim, "--dt", "dt", "time step");

    auto* dp = app.add_subcommand("diffeo-probe", "K sweeps of the smoothing contraction, round-trips, W^{1,inf} bounds");
    ov.add(dp, "--K", "K", "comma-separated K values");
    ov.add(dp, "--samples", "samples", "round-trip samples");

    auto* tc = app.add_subcommand("transform-check", "conjugacy, Lipschitz slope and high-mode tail checks");
    ov.add(tc, "--K", "conj_K", "averaging cut-off for the conjugacy run");
    ov.add(tc, "--t-end", "conj_t_end", "conjugacy horizon");

    auto* cn = app.add_subcommand("cone", "gap audit and cone-property campaign");
    ov.add(cn, "--K", "K", "averaging cut-off");
    ov.add(cn, "--N", "N", "split index (default: audited minimum)");
    ov.add(cn, "--samples", "samples", "campaign size");
    ov.add(cn, "--neg-K", "neg_K", "negative-control K");

    auto* fq = app.add_subcommand("floquet", "period map, decay law, extended and symmetrized systems");
    ov.add(fq, "--T", "T", "half period");
    ov.add(fq, "--nmax", "N_max", "Fourier truncation");
    ov.add(fq, "--method", "method", "block, pde or both");
    ov.add(fq, "--powers", "powers", "largest power of the period map");
    ov.add(fq, "--sweep-T", "sweep_T", "comma-separated T values for the structural sweep");
    ov.add_flag(fq, "--extended", "extended", "run the autonomous nonlinear system");
    ov.add_flag(fq, "--symmetrize", "symmetrize", "run the mixed boundary-condition system");

    auto* rp = app.add_subcommand("report", "summarize manifests under --out");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : int(AlarmCode::config);
    }
    try {
        if (rp->parsed()) return report(common);
        for (auto* sub : {sim, dp, tc, cn, fq})
            if (sub->parsed()) return run_experiment(sub->get_name(), common, ov);
    } catch (const Error& e) {
        std::cerr << "error[" << e.kind() << "]: " << e.what() << '\n';
        return int(e.code());
    }
    return 0;
}
