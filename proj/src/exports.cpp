#include "swarmzones/sim_engine.hpp"

#include <sstream>

#include "json.hpp"

namespace swarmzones {

// ---------------------------------------------------------------------------
// Exports

namespace {

using json = nlohmann::ordered_json;

// Every row carries the run identity so files stay tidy and self-describing.
std::string prefix(const RunResult& r) { return r.scenario_hash + "," + std::to_string(r.seed) + ","; }

std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string out = "\"";
    for (const char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string events_csv(const RunResult& r) {
    std::ostringstream os;
    os << "scenario_hash,seed,tick,seq,entity_kind,entity,kind,payload\n";
    for (const auto& e : r.log.events()) {
        std::string payload;
        for (const auto& [k, v] : e.payload) payload += (payload.empty() ? "" : ";") + k + "=" + v;
        os << prefix(r) << e.tick << ',' << e.seq << ',' << to_string(e.entity_kind) << ',' << e.entity << ',' << e.kind << ','
           << csv_field(payload) << '\n';
    }
    return os.str();
}

std::string events_ndjson(const RunResult& r) {
    std::ostringstream os;
    os << json{{"scenario_hash", r.scenario_hash}, {"seed", r.seed}}.dump() << '\n';
    for (const auto& e : r.log.events()) {
        json p = json::object();
        for (const auto& [k, v] : e.payload) p[k] = v;
        os << json{{"tick", e.tick},
                   {"seq", e.seq},
                   {"entity_kind", std::string(to_string(e.entity_kind))},
                   {"entity", e.entity},
                   {"kind", e.kind},
                   {"payload", p}}
                  .dump()
           << '\n';
    }
    return os.str();
}

std::string metrics_csv(const RunResult& r) {
    std::ostringstream os;
    os << "scenario_hash,seed,window_start,window_end,in_use_min,in_use_max,in_use_mean,utilization_mean,utilization_max,"
          "cumulative_dispatches,throughput_mean_bps,signal_mean_s,persons_checked,persons_served\n";
    for (const auto& w : r.windows) {
        os << prefix(r) << w.start << ',' << w.end << ',' << w.in_use_min << ',' << w.in_use_max << ',' << fmt_double(w.in_use_mean)
           << ',' << fmt_double(w.utilization_mean) << ',' << fmt_double(w.utilization_max) << ','
           << w.cumulative_dispatches << ',' << fmt_double(w.throughput_mean_bps) << ',' << fmt_double(w.signal_mean_s)
           << ',' << w.persons_checked << ',' << w.persons_served << '\n';
    }
    return os.str();
}

std::string density_csv(const RunResult& r) {
    std::ostringstream os;
    os << "scenario_hash,seed,row,col,layer,count\n";
    for (int row = 0; row < r.density.n; ++row) {
        for (int col = 0; col < r.density.n; ++col) {
            os << prefix(r) << row << ',' << col << ',' << r.density.layer << ',' << r.density.at(row, col) << '\n';
        }
    }
    return os.str();
}

std::string zone_stats_csv(const RunResult& r) {
    std::ostringstream os;
    os << "scenario_hash,seed,window_start,window_end,network,row,col,layer,mean_signal_time_s,throughput_bps,coverage_fraction,"
          "persons_scanned,fever_alarms,sanitizations,medications\n";
    for (const auto& z : r.zone_stats) {
        os << prefix(r) << z.window.start << ',' << z.window.end << ',' << z.network << ',' << z.zone.row << ',' << z.zone.col << ','
           << z.zone.layer << ',' << fmt_double(z.qos.mean_signal_time) << ',' << fmt_double(z.qos.throughput) << ','
           << fmt_double(z.qos.coverage_fraction) << ',' << z.experience.persons_scanned << ','
           << z.experience.fever_alarms << ',' << z.experience.sanitizations << ',' << z.experience.medications << '\n';
    }
    return os.str();
}

}  // namespace swarmzones
