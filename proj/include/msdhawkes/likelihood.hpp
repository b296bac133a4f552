#pragma once

#include <cstddef>
#include <vector>

#include "msdhawkes/types.hpp"

namespace msdhawkes {

struct LogLikValue {
    double total = 0.0;
    std::vector<double> per_coordinate;
};

// Gradient with the same layout as HawkesParams.
struct ParamGradient {
    std::vector<double> d_nu;
    std::vector<double> d_alpha;
    std::vector<double> d_beta;
    std::vector<double> d_theta;
};

// Immutable per-sample precomputation shared across likelihood evaluations:
// events grouped by type, the merged timeline, and the pre-event state of
// every event. Build once per fit, evaluate many times.
class LikelihoodContext {
public:
    LikelihoodContext(const EventStream& events, const StateTrajectory& state, int d_e);

    int d_e() const { return d_e_; }
    int d_x() const { return d_x_; }
    double horizon() const { return horizon_; }
    std::size_t n_events(int e) const { return type_times_[e].size(); }
    std::size_t n_segments() const { return seg_dt_.size(); }

    const std::vector<double>& event_times(int e) const { return type_times_[e]; }
    // Merged segment index whose left endpoint is the i-th type-e event.
    const std::vector<std::size_t>& event_segments(int e) const { return type_seg_[e]; }
    const std::vector<double>& segment_starts() const { return seg_t0_; }
    const std::vector<double>& segment_lengths() const { return seg_dt_; }
    const std::vector<double>& segment_value(std::size_t j) const { return *seg_x_[j]; }
    // Pre-event state X_{t-} of the i-th type-e event.
    const std::vector<double>& pre_event_value(int e, std::size_t i) const {
        return *seg_x_[type_seg_[e][i] - 1];
    }

private:
    int d_e_;
    int d_x_;
    double horizon_;
    std::vector<std::vector<double>> type_times_;
    std::vector<std::vector<std::size_t>> type_seg_;
    std::vector<double> seg_t0_;
    std::vector<double> seg_dt_;
    std::vector<const std::vector<double>*> seg_x_;
};

// One coordinate's parameters laid out for the per-coordinate optimization:
// alpha/beta rows are indexed (e', n).
struct CoordinateParams {
    double nu = 0.0;
    std::vector<double> alpha;  // d_e * d_n
    std::vector<double> beta;   // d_e * d_n
    std::vector<double> theta;  // d_x
};

struct CoordinateGradient {
    double d_nu = 0.0;
    std::vector<double> d_alpha;
    std::vector<double> d_beta;
    std::vector<double> d_theta;
};

CoordinateParams coordinate_slice(const HawkesParams& params, int e);
void coordinate_assign(HawkesParams& params, int e, const CoordinateParams& cp);

// Log-likelihood of coordinate e via the O(k + N) R/S recursions; fills the
// analytic gradient when grad is non-null.
double coordinate_loglik(const LikelihoodContext& ctx, int e, int d_n, const CoordinateParams& cp,
                         CoordinateGradient* grad = nullptr);

LogLikValue log_likelihood(const HawkesParams& params, const EventStream& events,
                           const StateTrajectory& state);

LogLikValue grad_log_likelihood(const HawkesParams& params, const EventStream& events,
                                const StateTrajectory& state, ParamGradient& grad);

struct BruteForceOptions {
    std::size_t max_events = 5000;
    // When set, events sharing a timestamp are ordered by index: event j is
    // in the past of event i whenever j < i, even at equal times. Used to
    // reproduce the unbounded-likelihood pathology of duplicated timestamps.
    bool index_ordered_ties = false;
};

// O(k^2) direct evaluation with exact piecewise-exponential integration of
// the compensator; the testing oracle for log_likelihood.
double brute_force_log_likelihood(const HawkesParams& params, const EventStream& events,
                                  const StateTrajectory& state,
                                  const BruteForceOptions& options = {});

}  // namespace msdhawkes
