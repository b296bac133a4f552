#pragma once

#include <vector>

#include "msdhawkes/types.hpp"

namespace msdhawkes {

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Time-change residuals and their per-coordinate KS verdicts against Exp(1).
struct ResidualSeries {
    std::vector<std::vector<double>> residuals;  // per coordinate
    std::vector<KsResult> ks;
    std::vector<bool> pass;       // p >= level, per coordinate
    std::vector<bool> low_power;  // fewer than 35 residuals
    double level = 0.05;
};

// Compensator increments between consecutive same-type events, integrated
// exactly segment by segment on the merged timeline. The stretch before the
// first event and after the last one are excluded.
ResidualSeries residuals(const HawkesParams& params, const EventStream& events,
                         const StateTrajectory& state, double level = 0.05);

// One-sample KS against the unit exponential; asymptotic Kolmogorov p-value
// (series truncated when terms drop below 1e-12).
KsResult ks_test_exp1(const std::vector<double>& sample);

struct FitReport {
    std::vector<KsResult> ks;
    std::vector<bool> pass;
    bool all_pass = false;
    double aic = 0.0;
    double log_likelihood = 0.0;
};

FitReport fit_report(const FitResult& fit, const EventStream& events,
                     const StateTrajectory& state, double level = 0.05);

}  // namespace msdhawkes
