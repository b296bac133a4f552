#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "msdhawkes/types.hpp"

namespace msdhawkes {

// One LOB event row: timestamp, event type, and the best-quote snapshot
// right after the event.
struct LobSnapshotRow {
    std::int64_t timestamp_ms = 0;
    int event_type = 0;  // 0-based
    double bid_price = 0.0;
    double ask_price = 0.0;
    double bid_size = 0.0;
    double ask_size = 0.0;

    double spread() const { return ask_price - bid_price; }
    double imbalance() const { return (bid_size - ask_size) / (bid_size + ask_size); }
};

// Time-weighted empirical distribution of the spread, in ticks.
struct SpreadDistribution {
    std::map<int, double> mass;  // spread (ticks) -> probability
    int median_ticks = 0;
    double min_mass = 0.0;
    double max_mass = 0.0;

    double p(int ticks) const {
        const auto it = mass.find(ticks);
        return it == mass.end() ? 0.0 : it->second;
    }
};

enum class Covariate { Imbalance, S1, S2, S3 };

struct CovariateOptions {
    std::vector<Covariate> spec;
    double tick_size = 0.01;
    // S3 default follows the prose reading (affine map of the spread's
    // probability mass onto [-1, 1]); the literal parenthetical variant maps
    // (s - min p) / (max p - min p) instead.
    bool s3_literal_formula = false;
};

// Expected header: timestamp_ms,event_type,bid_price,ask_price,bid_size,ask_size
std::vector<LobSnapshotRow> load_events(const std::string& path);

// Restricts rows to [start_ms, end_ms) and re-bases timestamps so the window
// start is 0. Horizon of the derived streams is (end_ms - start_ms) / 1000 s.
std::vector<LobSnapshotRow> window_session(const std::vector<LobSnapshotRow>& rows,
                                           std::int64_t start_ms, std::int64_t end_ms);

// Among any run of equal timestamps only the last row survives.
std::vector<LobSnapshotRow> dedup_same_timestamp(const std::vector<LobSnapshotRow>& rows);

SpreadDistribution spread_distribution(const std::vector<LobSnapshotRow>& rows, double tick_size,
                                       double horizon_s);

StateTrajectory build_covariates(const std::vector<LobSnapshotRow>& rows,
                                 const CovariateOptions& options, const SpreadDistribution& dist,
                                 double horizon_s);

EventStream events_from_rows(const std::vector<LobSnapshotRow>& rows, double horizon_s,
                             bool strict);

// Canonical CSV formats (header mandatory, '.' decimal separator).
//   events: time_s,type         (type is 1-based on disk)
//   state:  tau_s,x_1,...,x_dx  (last row carries tau = T)
void write_events_csv(const std::string& path, const EventStream& events);
EventStream read_events_csv(const std::string& path);
void write_state_csv(const std::string& path, const StateTrajectory& state);
StateTrajectory read_state_csv(const std::string& path);

}  // namespace msdhawkes
