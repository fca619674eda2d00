#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "swarmzones/sim_engine.hpp"

namespace swarmzones {

/// One tidy plot-data row.
struct FigureRow {
    std::string series;
    double x = 0.0;
    double y = 0.0;
};

struct Verdict {
    std::string check;
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool pass = false;
};

struct FigureResult {
    std::string id;
    std::vector<FigureRow> rows;
    std::vector<Verdict> verdicts;

    bool passed() const noexcept;
};

struct ReproduceOptions {
    std::string scenario_dir;  // holds case4.json, case6.json, case6_parallel.json
    int threads = 1;           // cap on concurrent scenario runs
};

/// Directory of the bundled scenarios in the source tree.
std::string bundled_scenario_dir();

const std::vector<std::string>& figure_ids();

/// Throws Error{InvalidArgument} for an unknown id.
FigureResult reproduce_figure(std::string_view id, const ReproduceOptions& opts);

Scenario load_scenario(const std::string& path);

/// Bisects ped_flow.arrival_rate_per_drone so the scenario's checked count at
/// its own drone count hits `target_checked`.
double calibrate_arrival_rate(Scenario s, std::int64_t target_checked);

/// sup |F_n(x) - F(x)| for the triangular model.
double ks_statistic(std::vector<double> samples, const SignalTimeModel& m);

std::string figure_csv(const FigureResult& f);
std::string verdict_csv(const FigureResult& f);

}  // namespace swarmzones
