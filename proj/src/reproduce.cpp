#include "swarmzones/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <sstream>

#include "swarmzones/error.hpp"
#include "swarmzones/rng.hpp"

#ifndef SWARMZONES_SCENARIO_DIR
#define SWARMZONES_SCENARIO_DIR "scenarios"
#endif

namespace swarmzones {

namespace {

constexpr double kCoverageKm = 1200.0;
constexpr double kCoverageAnchor = 18900.0;
constexpr std::int64_t kCheckedAnchor = 3389;

struct Target {
    int drones;
    double value;
};

// Runs every job on at most `threads` workers; results keep job order.
template <class T>
std::vector<T> run_ordered(std::vector<std::function<T()>> jobs, int threads) {
    std::vector<T> out(jobs.size());
    const std::size_t width = static_cast<std::size_t>(std::max(1, threads));
    for (std::size_t start = 0; start < jobs.size(); start += width) {
        std::vector<std::future<T>> batch;
        for (std::size_t i = start; i < std::min(jobs.size(), start + width); ++i) {
            batch.push_back(std::async(width == 1 ? std::launch::deferred : std::launch::async, jobs[i]));
        }
        for (std::size_t i = 0; i < batch.size(); ++i) out[start + i] = batch[i].get();
    }
    return out;
}

Verdict within(std::string check, double value, double lo, double hi) {
    return Verdict{std::move(check), value, lo, hi, value >= lo && value <= hi};
}

Verdict relative(std::string check, double value, double target, double tol) {
    return within(std::move(check), value, target * (1.0 - tol), target * (1.0 + tol));
}

std::string path_in(const ReproduceOptions& o, const char* file) {
    return (o.scenario_dir.empty() ? bundled_scenario_dir() : o.scenario_dir) + "/" + file;
}

FigureResult fig17() {
    FigureResult f{"fig17", {}, {}};
    const CoverageModel cm = calibrate_coverage(kCoverageKm, 3, kCoverageAnchor, CoverageModel{});
    const Target targets[] = {{3, 18900.0}, {10, 9390.0}, {20, 3680.0}, {30, 2293.0}};
    double prev = INFINITY;
    bool decreasing = true;
    for (const auto& t : targets) {
        const double v = coverage_time(kCoverageKm, t.drones, cm);
        f.rows.push_back({"makespan_min", static_cast<double>(t.drones), v});
        f.rows.push_back({"paper_min", static_cast<double>(t.drones), t.value});
        if (t.drones != 3) f.verdicts.push_back(relative("makespan_" + std::to_string(t.drones), v, t.value, 0.25));
        decreasing = decreasing && v < prev;
        prev = v;
    }
    f.verdicts.push_back(within("strictly_decreasing", decreasing ? 1.0 : 0.0, 1.0, 1.0));
    f.verdicts.push_back(within("calibrated_rate_km_per_min", cm.per_drone_rate, 0.0, INFINITY));
    return f;
}

FigureResult fig21_22(std::string id, const ReproduceOptions& o) {
    const bool served = id == "fig22";
    FigureResult f{std::move(id), {}, {}};
    Scenario base = load_scenario(path_in(o, "case4.json"));
    base.drones = 3;
    base.ped.arrival_rate_per_drone = calibrate_arrival_rate(base, kCheckedAnchor);

    const Target checked_t[] = {{3, 3389.0}, {10, 13398.0}, {20, 16298.0}, {30, 19697.0}};
    const Target served_t[] = {{3, 1612.0}, {10, 10073.0}, {20, 13129.0}, {30, 16166.0}};
    std::vector<std::function<PedFlowCounters()>> jobs;
    for (const auto& t : checked_t) {
        Scenario s = base;
        s.drones = t.drones;
        jobs.push_back([s] { return run(s).summary.ped; });
    }
    const auto counters = run_ordered(std::move(jobs), o.threads);

    bool subset = true;
    bool monotone = true;
    for (std::size_t i = 0; i < counters.size(); ++i) {
        const auto& c = counters[i];
        const double x = checked_t[i].drones;
        const Target& t = served ? served_t[i] : checked_t[i];
        const double v = static_cast<double>(served ? c.served : c.checked);
        f.rows.push_back({served ? "served" : "checked", x, v});
        f.rows.push_back({"paper", x, t.value});
        if (!(served && i == 0) && !(!served && i == 0)) {
            f.verdicts.push_back(relative((served ? "served_" : "checked_") + std::to_string(t.drones), v, t.value, 0.30));
        }
        subset = subset && c.served <= c.checked;
        if (i > 0) monotone = monotone && c.checked >= counters[i - 1].checked;
    }
    if (served) {
        f.verdicts.push_back(relative("served_3", static_cast<double>(counters[0].served), served_t[0].value, 0.30));
    } else {
        f.verdicts.push_back(relative("checked_3", static_cast<double>(counters[0].checked), checked_t[0].value, 0.30));
    }
    f.verdicts.push_back(within("served_le_checked", subset ? 1.0 : 0.0, 1.0, 1.0));
    f.verdicts.push_back(within("checked_monotone_in_drones", monotone ? 1.0 : 0.0, 1.0, 1.0));
    f.verdicts.push_back(within("arrival_rate_per_drone", base.ped.arrival_rate_per_drone, 0.0, INFINITY));
    return f;
}

FigureResult fig26(const ReproduceOptions& o) {
    FigureResult f{"fig26", {}, {}};
    const Scenario s = load_scenario(path_in(o, "case6.json"));
    Rng rng = Rng(s.seed).substream("fig26");
    constexpr int kDraws = 100000;
    std::vector<double> xs;
    xs.reserve(kDraws);
    double sum = 0.0;
    bool in_range = true;
    for (int i = 0; i < kDraws; ++i) {
        const double x = sample_signal_time(s.link.signal, rng);
        xs.push_back(x);
        sum += x;
        in_range = in_range && x >= s.link.signal.min && x < s.link.signal.max;
        f.rows.push_back({"signal_time_s", static_cast<double>(i), x});
    }
    f.verdicts.push_back(within("mean_s", sum / kDraws, 3.9, 4.3));
    f.verdicts.push_back(within("ks_statistic", ks_statistic(xs, s.link.signal), 0.0, 0.01));
    f.verdicts.push_back(within("samples_in_support", in_range ? 1.0 : 0.0, 1.0, 1.0));
    f.verdicts.push_back(within("model_stddev_s", s.link.signal.stddev(), 0.0, INFINITY));
    return f;
}

std::vector<RunResult> case6_runs(const ReproduceOptions& o) {
    std::vector<std::function<RunResult()>> jobs;
    for (const char* file : {"case6.json", "case6_parallel.json"}) {
        const Scenario s = load_scenario(path_in(o, file));
        jobs.push_back([s] { return run(s); });
    }
    return run_ordered(std::move(jobs), o.threads);
}

FigureResult fig27(const ReproduceOptions& o) {
    FigureResult f{"fig27", {}, {}};
    const Scenario s = load_scenario(path_in(o, "case6.json"));
    const RunResult r = run(s);
    const auto changes = state_changes(r.log);
    for (std::int64_t t = 60; t < s.duration; t += 60) {
        f.rows.push_back({"drones_in_use", static_cast<double>(t) / 60.0, static_cast<double>(drones_in_use(changes, t))});
    }
    for (const auto& w : r.utilization) {
        f.rows.push_back({"cumulative_dispatches", static_cast<double>(w.end) / 60.0,
                          static_cast<double>(w.cumulative_dispatches)});
    }
    f.verdicts.push_back(within("in_use_min", r.summary.in_use_min, 20, 60));
    f.verdicts.push_back(within("in_use_max", r.summary.in_use_max, 20, 60));
    f.verdicts.push_back(within("utilization_max", r.summary.utilization_max, 0.0, 0.85));
    return f;
}

FigureResult fig28(const ReproduceOptions& o) {
    FigureResult f{"fig28", {}, {}};
    const auto runs = case6_runs(o);
    const char* names[] = {"sequential", "parallel"};
    const double hi[] = {70.0, 80.0};
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (const auto& w : runs[i].windows) {
            f.rows.push_back({std::string(names[i]) + "_mbps", static_cast<double>(w.start) / 60.0,
                              w.throughput_mean_bps / 1e6});
        }
        f.verdicts.push_back(within(std::string(names[i]) + "_mean_mbps", runs[i].summary.throughput_mean_bps / 1e6,
                                    35.0, hi[i]));
    }
    return f;
}

std::string num(double v) { return fmt_double(v); }

}  // namespace

bool FigureResult::passed() const noexcept {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::string bundled_scenario_dir() { return SWARMZONES_SCENARIO_DIR; }

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids{"fig17", "fig21", "fig22", "fig26", "fig27", "fig28"};
    return ids;
}

FigureResult reproduce_figure(std::string_view id, const ReproduceOptions& opts) {
    if (id == "fig17") return fig17();
    if (id == "fig21" || id == "fig22") return fig21_22(std::string(id), opts);
    if (id == "fig26") return fig26(opts);
    if (id == "fig27") return fig27(opts);
    if (id == "fig28") return fig28(opts);
    std::string valid;
    for (const auto& f : figure_ids()) valid += (valid.empty() ? "" : ", ") + f;
    throw Error(ErrorCode::InvalidArgument, "unknown figure '" + std::string(id) + "'; valid ids: " + valid);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot read scenario " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return scenario_from_json(ss.str());
}

double calibrate_arrival_rate(Scenario s, std::int64_t target_checked) {
    s.ped.enabled = true;
    auto checked = [&](double rate) {
        s.ped.arrival_rate_per_drone = rate;
        return run(s).summary.ped.checked;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (checked(hi) < target_checked && hi < 1e4) hi *= 2.0;
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        (checked(mid) < target_checked ? lo : hi) = mid;
    }
    return hi;
}

double ks_statistic(std::vector<double> xs, const SignalTimeModel& m) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = triangular_cdf(m, xs[i]);
        d = std::max({d, std::abs((static_cast<double>(i) + 1.0) / n - f), std::abs(f - static_cast<double>(i) / n)});
    }
    return d;
}

std::string figure_csv(const FigureResult& f) {
    std::string out = "x,y,series\n";
    for (const auto& r : f.rows) out += num(r.x) + "," + num(r.y) + "," + r.series + "\n";
    return out;
}

std::string verdict_csv(const FigureResult& f) {
    std::string out = "figure,check,value,lo,hi,pass\n";
    for (const auto& v : f.verdicts) {
        out += f.id + "," + v.check + "," + num(v.value) + "," + num(v.lo) + "," + num(v.hi) + "," +
               (v.pass ? "pass" : "fail") + "\n";
    }
    return out;
}

}  // namespace swarmzones
