#pragma once

#include <vector>

#include "msdhawkes/types.hpp"

namespace msdhawkes {

// Per-coordinate intensity at a point, split into the Hawkes part and the
// multiplicative state factor exp(<theta^e, X_{t-}>).
struct IntensityValue {
    std::vector<double> hawkes_part;   // lambda^{H,e}
    std::vector<double> state_factor;  // exp(<theta^e, X_{t-}>)

    double total(int e) const { return hawkes_part[e] * state_factor[e]; }
};

// Multi-exponential kernel value phi_{ee'}(dt) = sum_n alpha e^{-beta dt}.
double kernel_value(const HawkesParams& params, int e, int ep, double dt);

// Standard Hawkes intensity at t-, events strictly before t only.
std::vector<double> hawkes_intensity_left(const HawkesParams& params, const EventStream& events,
                                          double t);

IntensityValue msd_intensity_left(const HawkesParams& params, const EventStream& events,
                                  const StateTrajectory& state, double t);

// Incremental evaluator for sequential queries (simulation, prediction).
// Carries one decay accumulator per (e, e', n); single-owner, advance only
// forward in time. After advance_to(t), hawkes(e) is lambda^{H,e}(t) using
// every event added so far (events at exactly t count only once added).
class IntensityAccumulator {
public:
    explicit IntensityAccumulator(const HawkesParams& params);

    void advance_to(double t);
    void add_event(int type);       // event at the current time
    double time() const { return time_; }

    double hawkes(int e) const;
    // Total intensity across coordinates given a state value.
    double total(const StateTrajectory& state, std::size_t segment) const;
    double state_factor(int e, const std::vector<double>& x) const;

private:
    const HawkesParams& params_;
    double time_ = 0.0;
    std::vector<double> g_;  // (e, e', n) -> sum over past events of alpha e^{-beta dt}
};

}  // namespace msdhawkes
