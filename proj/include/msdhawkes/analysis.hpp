#pragma once

#include <vector>

#include "msdhawkes/types.hpp"

namespace msdhawkes {

// State-dependent branching matrix m_i * sum_n alpha/beta at a fixed state
// value, with its spectral radius and the theta = 0 baseline.
struct EndogeneityReport {
    std::vector<double> matrix;  // d_e * d_e, row-major
    double spectral_radius = 0.0;
    double baseline_radius = 0.0;  // same parameters with theta = 0
};

EndogeneityReport endogeneity(const HawkesParams& params, const std::vector<double>& x);

// Spectral radius of a nonnegative square matrix: closed form up to 2x2,
// power iteration (tolerance 1e-12) otherwise.
double spectral_radius(const std::vector<double>& matrix, int dim);

enum class PredictionMethod { Model, Last, Imbalance };

struct PredictionOutcome {
    std::vector<int> model_prediction;  // per event, predicted type
    double model_accuracy = 0.0;
    double last_accuracy = 0.0;
    double imbalance_accuracy = 0.0;
    bool has_imbalance = false;
    std::size_t n_events = 0;
    double excess_vs_last() const { return model_accuracy - last_accuracy; }
};

// Next-event-type exercise: at each event time t, the model predicts
// argmax_e lambda^e(t-) under params_prev_day (ties to the smallest index).
// Events may share timestamps; co-timed events see the same pre-time
// intensity. imbalance_index < 0 disables the Imbalance benchmark.
PredictionOutcome predict_next_type(const HawkesParams& params_prev_day,
                                    const EventStream& events, const StateTrajectory& state,
                                    int imbalance_index = -1);

struct EmpiricalIntensityBin {
    double lo = 0.0, hi = 0.0;
    double occupancy = 0.0;               // seconds the covariate spent in the bin
    std::vector<int> counts;              // events per type with pre-event value in bin
    std::vector<double> rate;             // events/second; NaN when occupancy is 0
};

std::vector<EmpiricalIntensityBin> empirical_intensity_by_state(const EventStream& events,
                                                                const StateTrajectory& state,
                                                                int covariate, int n_bins,
                                                                int d_e);

}  // namespace msdhawkes
