#include "msdhawkes/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace msdhawkes {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const std::string& path, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(strip(s), &pos);
        if (pos != strip(s).size()) throw std::invalid_argument("trailing garbage");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": malformed numeric field '" + s + "'");
    }
}

std::int64_t parse_int64(const std::string& s, const std::string& path, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(strip(s), &pos);
        if (pos != strip(s).size()) throw std::invalid_argument("trailing garbage");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": malformed integer field '" + s + "'");
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::vector<LobSnapshotRow> load_events(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    const std::string expected = "timestamp_ms,event_type,bid_price,ask_price,bid_size,ask_size";
    if (strip(line) != expected)
        throw std::runtime_error(path + ":1: expected header '" + expected + "'");

    std::vector<LobSnapshotRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 6)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 6 fields, got " +
                                     std::to_string(fields.size()));
        LobSnapshotRow row;
        row.timestamp_ms = parse_int64(fields[0], path, line_no);
        row.event_type = static_cast<int>(parse_int64(fields[1], path, line_no)) - 1;
        row.bid_price = parse_double(fields[2], path, line_no);
        row.ask_price = parse_double(fields[3], path, line_no);
        row.bid_size = parse_double(fields[4], path, line_no);
        row.ask_size = parse_double(fields[5], path, line_no);
        if (row.event_type < 0)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": event_type must be >= 1");
        if (row.ask_price <= row.bid_price)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": crossed book (ask " +
                                     format_double(row.ask_price) + " <= bid " +
                                     format_double(row.bid_price) + ")");
        if (row.bid_size <= 0.0 || row.ask_size <= 0.0)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": sizes must be positive");
        if (!rows.empty() && row.timestamp_ms < rows.back().timestamp_ms)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": timestamps must be non-decreasing");
        rows.push_back(row);
    }
    return rows;
}

std::vector<LobSnapshotRow> window_session(const std::vector<LobSnapshotRow>& rows,
                                           std::int64_t start_ms, std::int64_t end_ms) {
    if (start_ms >= end_ms) throw std::invalid_argument("window_session: start must be < end");
    std::vector<LobSnapshotRow> out;
    for (const auto& row : rows) {
        if (row.timestamp_ms < start_ms || row.timestamp_ms >= end_ms) continue;
        LobSnapshotRow r = row;
        r.timestamp_ms -= start_ms;
        out.push_back(r);
    }
    return out;
}

std::vector<LobSnapshotRow> dedup_same_timestamp(const std::vector<LobSnapshotRow>& rows) {
    std::vector<LobSnapshotRow> out;
    for (const auto& row : rows) {
        if (!out.empty() && out.back().timestamp_ms == row.timestamp_ms)
            out.back() = row;  // last one in a run of equal timestamps wins
        else
            out.push_back(row);
    }
    return out;
}

namespace {

int spread_ticks(const LobSnapshotRow& row, double tick_size) {
    return static_cast<int>(std::lround(row.spread() / tick_size));
}

}  // namespace

SpreadDistribution spread_distribution(const std::vector<LobSnapshotRow>& rows, double tick_size,
                                       double horizon_s) {
    if (rows.empty()) throw std::invalid_argument("spread_distribution: empty input");
    if (tick_size <= 0.0) throw std::invalid_argument("spread_distribution: tick_size must be positive");

    // Occupation time of each spread value. The state before the first row is
    // unobserved; occupation starts at the first row.
    std::map<int, double> occupation;
    double total = 0.0;
    const double horizon_ms = horizon_s * 1000.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double t0 = static_cast<double>(rows[i].timestamp_ms);
        const double t1 =
            i + 1 < rows.size() ? static_cast<double>(rows[i + 1].timestamp_ms) : horizon_ms;
        const double dt = std::max(0.0, t1 - t0);
        occupation[spread_ticks(rows[i], tick_size)] += dt;
        total += dt;
    }

    SpreadDistribution dist;
    if (total <= 0.0) {
        // Degenerate window: all rows share one instant. Fall back to counts.
        for (const auto& row : rows) occupation[spread_ticks(row, tick_size)] += 1.0;
        total = static_cast<double>(rows.size());
    }
    dist.min_mass = std::numeric_limits<double>::infinity();
    dist.max_mass = 0.0;
    for (const auto& [ticks, occ] : occupation) {
        const double p = occ / total;
        dist.mass[ticks] = p;
        dist.min_mass = std::min(dist.min_mass, p);
        dist.max_mass = std::max(dist.max_mass, p);
    }

    double cum = 0.0;
    dist.median_ticks = dist.mass.rbegin()->first;
    for (const auto& [ticks, p] : dist.mass) {
        cum += p;
        if (cum >= 0.5) {
            dist.median_ticks = ticks;
            break;
        }
    }
    return dist;
}

namespace {

double covariate_value(Covariate c, const LobSnapshotRow& row, const CovariateOptions& options,
                       const SpreadDistribution& dist, bool* outside_support) {
    switch (c) {
        case Covariate::Imbalance:
            return std::clamp(row.imbalance(), -1.0, 1.0);
        case Covariate::S1:
            return spread_ticks(row, options.tick_size) <= dist.median_ticks ? -1.0 : 1.0;
        case Covariate::S2:
            return spread_ticks(row, options.tick_size) == 1 ? -1.0 : 1.0;
        case Covariate::S3: {
            const int s = spread_ticks(row, options.tick_size);
            if (dist.mass.find(s) == dist.mass.end() && outside_support) *outside_support = true;
            const double range = dist.max_mass - dist.min_mass;
            if (options.s3_literal_formula) {
                const double v = range > 0.0 ? (static_cast<double>(s) - dist.min_mass) / range
                                             : 0.0;
                return std::clamp(v, -1.0, 1.0);
            }
            const double v = range > 0.0 ? 2.0 * (dist.p(s) - dist.min_mass) / range - 1.0 : 0.0;
            return std::clamp(v, -1.0, 1.0);
        }
    }
    throw std::logic_error("covariate_value: unknown covariate");
}

}  // namespace

StateTrajectory build_covariates(const std::vector<LobSnapshotRow>& rows,
                                 const CovariateOptions& options, const SpreadDistribution& dist,
                                 double horizon_s) {
    if (options.spec.empty()) throw std::invalid_argument("build_covariates: empty covariate spec");
    if (rows.empty()) throw std::invalid_argument("build_covariates: empty input");
    if (horizon_s <= 0.0) throw std::invalid_argument("build_covariates: horizon must be positive");

    const int d_x = static_cast<int>(options.spec.size());
    StateTrajectory state;
    state.breakpoints.push_back(0.0);

    bool outside_support = false;
    std::vector<double> current;
    for (const auto& row : rows) {
        std::vector<double> value(d_x);
        for (int j = 0; j < d_x; ++j)
            value[j] = covariate_value(options.spec[j], row, options, dist, &outside_support);
        const double t_s = static_cast<double>(row.timestamp_ms) / 1000.0;
        if (t_s >= horizon_s) break;
        if (current.empty()) {
            // The value set by the first row is extended back to the window
            // start so the trajectory covers all of [0, T].
            current = value;
        } else if (value != current) {
            state.values.push_back(current);
            state.breakpoints.push_back(t_s);
            current = value;
        }
    }
    if (current.empty()) throw std::invalid_argument("build_covariates: no rows inside the horizon");
    state.values.push_back(current);
    state.breakpoints.push_back(horizon_s);
    state.validate();
    (void)outside_support;
    return state;
}

EventStream events_from_rows(const std::vector<LobSnapshotRow>& rows, double horizon_s,
                             bool strict) {
    EventStream events;
    events.horizon = horizon_s;
    events.strict = strict;
    for (const auto& row : rows) {
        const double t_s = static_cast<double>(row.timestamp_ms) / 1000.0;
        if (t_s <= 0.0 || t_s > horizon_s) continue;
        events.times.push_back(t_s);
        events.types.push_back(row.event_type);
    }
    return events;
}

void write_events_csv(const std::string& path, const EventStream& events) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "time_s,type\n";
    // First line after the header carries the horizon as a pseudo-row with
    // type 0 so the file is self-contained.
    out << format_double(events.horizon) << ",0\n";
    for (std::size_t i = 0; i < events.times.size(); ++i)
        out << format_double(events.times[i]) << "," << (events.types[i] + 1) << "\n";
    if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

EventStream read_events_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || strip(line) != "time_s,type")
        throw std::runtime_error(path + ":1: expected header 'time_s,type'");

    EventStream events;
    std::size_t line_no = 1;
    bool horizon_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 2 fields");
        const double t = parse_double(fields[0], path, line_no);
        const int type = static_cast<int>(parse_int64(fields[1], path, line_no));
        if (!horizon_seen) {
            if (type != 0)
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": first data row must carry the horizon with type 0");
            events.horizon = t;
            horizon_seen = true;
            continue;
        }
        if (type < 1)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": type must be >= 1");
        events.times.push_back(t);
        events.types.push_back(type - 1);
    }
    if (!horizon_seen) throw std::runtime_error(path + ": missing horizon row");
    events.strict = true;
    for (std::size_t i = 1; i < events.times.size(); ++i)
        if (events.times[i] <= events.times[i - 1]) events.strict = false;
    return events;
}

void write_state_csv(const std::string& path, const StateTrajectory& state) {
    state.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    const int d_x = state.d_x();
    out << "tau_s";
    for (int j = 0; j < d_x; ++j) out << ",x_" << (j + 1);
    out << "\n";
    for (std::size_t k = 0; k < state.n_segments(); ++k) {
        out << format_double(state.breakpoints[k]);
        for (int j = 0; j < d_x; ++j) out << "," << format_double(state.values[k][j]);
        out << "\n";
    }
    // Final row carries tau = T; its values repeat the last segment.
    out << format_double(state.breakpoints.back());
    for (int j = 0; j < d_x; ++j) out << "," << format_double(state.values.back()[j]);
    out << "\n";
    if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

StateTrajectory read_state_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    const auto header = split_csv_line(strip(line));
    if (header.empty() || header[0] != "tau_s")
        throw std::runtime_error(path + ":1: expected header 'tau_s,x_1,...'");
    const int d_x = static_cast<int>(header.size()) - 1;
    for (int j = 0; j < d_x; ++j)
        if (header[j + 1] != "x_" + std::to_string(j + 1))
            throw std::runtime_error(path + ":1: expected column 'x_" + std::to_string(j + 1) + "'");

    StateTrajectory state;
    std::size_t line_no = 1;
    std::vector<double> last_values;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != d_x + 1)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(d_x + 1) + " fields");
        state.breakpoints.push_back(parse_double(fields[0], path, line_no));
        last_values.assign(static_cast<std::size_t>(d_x), 0.0);
        for (int j = 0; j < d_x; ++j) last_values[j] = parse_double(fields[j + 1], path, line_no);
        state.values.push_back(last_values);
    }
    if (state.breakpoints.size() < 2)
        throw std::runtime_error(path + ": need at least an opening and a closing row");
    // Last row only closes the horizon; it does not open a segment.
    state.values.pop_back();
    state.validate();
    return state;
}

}  // namespace msdhawkes
