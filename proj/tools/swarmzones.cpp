// swarmzones: run scenarios, reproduce figure data, and run the oracle suites.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "swarmzones/error.hpp"
#include "swarmzones/reproduce.hpp"
#include "swarmzones/sim_engine.hpp"
#include "swarmzones/verify.hpp"

namespace fs = std::filesystem;
using namespace swarmzones;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitTolerance = 3;
constexpr int kExitOracle = 4;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

std::string fnv_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int thread_cap() {
    const char* env = std::getenv("SWARMZONES_THREADS");
    const int hw = std::max(1u, std::thread::hardware_concurrency());
    if (!env || !*env) return hw;
    try {
        return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
        std::cerr << "warning: ignoring SWARMZONES_THREADS=" << env << "\n";
        return hw;
    }
}

// The manifest goes out first so a crash mid-run still leaves a record of the
// files that were due.
void write_manifest(const fs::path& out, nlohmann::ordered_json manifest) {
    fs::create_directories(out);
    write_file(out / "manifest.json", manifest.dump(2) + "\n");
}

int cmd_run(const std::string& scenario_path, std::optional<std::uint64_t> seed, const std::string& out_dir,
            const std::string& format) {
    std::string text;
    try {
        text = read_file(scenario_path);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    Scenario s;
    try {
        s = scenario_from_json(text);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    if (seed) s.seed = *seed;
    if (const auto errs = validate(s); !errs.empty()) {
        for (const auto& e : errs) {
            std::cerr << "validation: " << e.path << ": " << to_string(e.code) << ": " << e.message << "\n";
        }
        return kExitValidation;
    }

    const std::string events = format == "json" ? "events.ndjson" : "events.csv";
    const std::vector<std::string> files{events, "metrics.csv", "density.csv", "zone_stats.csv"};
    nlohmann::ordered_json manifest{
        {"scenario", scenario_path},
        {"scenario_sha", fnv_hex(text)},
        {"scenario_hash", scenario_hash(s)},
        {"seed", s.seed},
        {"out", out_dir},
        {"formats", {format}},
        {"timestamps", {{"sim_start_tick", 0}, {"sim_end_tick", s.duration}}},
        {"files", files},
    };
    try {
        const fs::path out(out_dir);
        write_manifest(out, manifest);
        const RunResult r = run(s);
        write_file(out / events, format == "json" ? events_ndjson(r) : events_csv(r));
        write_file(out / "metrics.csv", metrics_csv(r));
        write_file(out / "density.csv", density_csv(r));
        write_file(out / "zone_stats.csv", zone_stats_csv(r));
        const auto& m = r.summary;
        std::cout << "scenario=" << s.name << " seed=" << s.seed << " events=" << r.log.size()
                  << " throughput_mbps=" << fmt_double(m.throughput_mean_bps / 1e6)
                  << " in_use=[" << m.in_use_min << "," << m.in_use_max << "]"
                  << " utilization_max=" << fmt_double(m.utilization_max)
                  << " checked=" << m.ped.checked << " served=" << m.ped.served << "\n";
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}

int cmd_reproduce(const std::string& figure, const std::string& out_dir, const std::string& scenario_dir) {
    const auto& ids = figure_ids();
    if (std::find(ids.begin(), ids.end(), figure) == ids.end()) {
        std::cerr << "error: unknown figure '" << figure << "'; valid ids:";
        for (const auto& id : ids) std::cerr << " " << id;
        std::cerr << "\n";
        return kExitValidation;
    }
    ReproduceOptions opts;
    opts.scenario_dir = scenario_dir;
    opts.threads = thread_cap();
    const std::string data = figure + ".csv";
    const std::string summary = figure + "_summary.csv";
    FigureResult f;
    try {
        const fs::path out(out_dir);
        write_manifest(out, {{"figure", figure},
                             {"scenario_dir", scenario_dir.empty() ? bundled_scenario_dir() : scenario_dir},
                             {"out", out_dir},
                             {"formats", {"csv"}},
                             {"files", {data, summary}}});
        f = reproduce_figure(figure, opts);
        write_file(out / data, figure_csv(f));
        write_file(out / summary, verdict_csv(f));
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    for (const auto& v : f.verdicts) {
        std::cout << figure << " " << v.check << " value=" << fmt_double(v.value) << " range=[" << fmt_double(v.lo)
                  << ", " << fmt_double(v.hi) << "] " << (v.pass ? "PASS" : "FAIL") << "\n";
    }
    return f.passed() ? 0 : kExitTolerance;
}

int cmd_verify() {
    bool ok = true;
    for (const auto& s : verify_all()) {
        std::cout << s.name << ": " << s.cases << " cases " << (s.passed ? "PASS" : "FAIL") << "\n";
        if (!s.passed) {
            std::cerr << s.name << " counterexample: " << s.counterexample << "\n";
            ok = false;
        }
    }
    return ok ? 0 : kExitOracle;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zone-based drone swarm simulator"};
    app.require_subcommand(1);

    std::string scenario;
    std::uint64_t seed = 0;
    std::string out = "out";
    std::string format = "csv";
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and export its event log and metrics");
    run_cmd->add_option("--scenario", scenario, "Scenario JSON file")->required();
    auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the scenario seed");
    run_cmd->add_option("--out", out, "Output directory")->capture_default_str();
    run_cmd->add_option("--format", format, "Event log format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    std::string figure;
    std::string scenario_dir;
    std::string fig_out = "out";
    auto* rep = app.add_subcommand("reproduce", "Regenerate the plot data of one figure with tolerance verdicts");
    rep->add_option("--figure", figure, "fig17 | fig21 | fig22 | fig26 | fig27 | fig28")->required();
    rep->add_option("--out", fig_out, "Output directory")->capture_default_str();
    rep->add_option("--scenario-dir", scenario_dir, "Directory with the bundled case JSON files")
        ->default_str(bundled_scenario_dir());
    rep->footer("SWARMZONES_THREADS caps concurrent scenario runs (default: hardware threads).");

    app.add_subcommand("verify", "Run the bijection, distance, violation and collision oracle suites");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("run")) {
            return cmd_run(scenario, seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt, out, format);
        }
        if (app.got_subcommand("reproduce")) return cmd_reproduce(figure, fig_out, scenario_dir);
        return cmd_verify();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
