#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace msdhawkes {

// Dimensions of a msdHawkes model: d_e event types, d_n exponential terms per
// kernel, d_x state covariates (d_x = 0 recovers a standard Hawkes process).
struct ModelShape {
    int d_e = 1;
    int d_n = 1;
    int d_x = 0;

    void validate() const;
    int n_params() const { return d_e * (1 + 2 * d_e * d_n + d_x); }
};

// Full parameter set (nu, alpha, beta, theta). Event types and exponential
// terms are 0-indexed internally. alpha/beta are stored flat with layout
// (e, e', n); theta with layout (e, j).
struct HawkesParams {
    ModelShape shape;
    std::vector<double> nu;     // d_e
    std::vector<double> alpha;  // d_e * d_e * d_n
    std::vector<double> beta;   // d_e * d_e * d_n
    std::vector<double> theta;  // d_e * d_x

    static HawkesParams zeros(const ModelShape& shape);

    double& a(int e, int ep, int n) { return alpha[idx(e, ep, n)]; }
    double a(int e, int ep, int n) const { return alpha[idx(e, ep, n)]; }
    double& b(int e, int ep, int n) { return beta[idx(e, ep, n)]; }
    double b(int e, int ep, int n) const { return beta[idx(e, ep, n)]; }
    double& th(int e, int j) { return theta[e * shape.d_x + j]; }
    double th(int e, int j) const { return theta[e * shape.d_x + j]; }

    std::size_t idx(int e, int ep, int n) const {
        return (static_cast<std::size_t>(e) * shape.d_e + ep) * shape.d_n + n;
    }

    // Throws std::invalid_argument naming the offending index on any
    // positivity or beta-ordering violation.
    void validate() const;

    // Sorts the exponential terms of every (e, e') kernel jointly in
    // (alpha, beta) by decreasing beta, restoring the identifiability order.
    void canonicalize();
};

// Timestamped typed events on [0, T]. `strict` records that duplicate
// timestamps have been removed; estimation requires it.
struct EventStream {
    double horizon = 0.0;
    std::vector<double> times;
    std::vector<int> types;  // 0-based, in [0, d_e)
    bool strict = false;

    std::size_t size() const { return times.size(); }
    void validate(int d_e) const;
    std::vector<int> counts(int d_e) const;
};

// Piecewise-constant covariate path: values[j] holds on [breakpoints[j],
// breakpoints[j+1]). The value observed by an event at time t is the
// pre-event value X_{t-}: the segment whose right endpoint is >= t and
// whose left endpoint is < t.
struct StateTrajectory {
    std::vector<double> breakpoints;         // tau_0 = 0 < ... < tau_N = T
    std::vector<std::vector<double>> values; // N entries, each of size d_x

    static StateTrajectory constant(double horizon, int d_x);

    double horizon() const { return breakpoints.empty() ? 0.0 : breakpoints.back(); }
    int d_x() const { return values.empty() ? 0 : static_cast<int>(values[0].size()); }
    std::size_t n_segments() const { return values.size(); }

    // Index of the segment containing t from the left (pre-event value).
    std::size_t segment_before(double t) const;
    const std::vector<double>& value_before(double t) const { return values[segment_before(t)]; }

    void validate() const;
};

// Union of state breakpoints and event times. Segments partition [0, T];
// the state value is constant on every segment. event_at[k] is the index of
// the event opening the segment starting at times[k] (-1 if none).
struct MergedTimeline {
    std::vector<double> times;      // M + 1 breakpoints, first 0, last T
    std::vector<std::size_t> state_index;  // M entries, into state.values
    std::vector<int> event_at;      // M + 1 entries, event index or -1

    std::size_t n_segments() const { return state_index.size(); }
};

MergedTimeline build_merged_timeline(const EventStream& events, const StateTrajectory& state);

enum class FitMethod { MLE, EM };

struct FitResult {
    HawkesParams params;
    double log_likelihood = 0.0;
    double aic = 0.0;
    int n_params = 0;
    std::vector<double> per_coordinate_loglik;
    FitMethod method = FitMethod::MLE;
    int starts_used = 0;
    bool converged = false;
    // EM only: per coordinate, the observed log-likelihood after each sweep.
    std::vector<std::vector<double>> em_loglik_path;
    double elapsed_s = 0.0;
    std::vector<std::string> warnings;
};

}  // namespace msdhawkes
