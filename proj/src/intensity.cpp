#include "msdhawkes/intensity.hpp"

#include <cmath>
#include <stdexcept>

namespace msdhawkes {

double kernel_value(const HawkesParams& params, int e, int ep, double dt) {
    if (dt < 0.0) throw std::invalid_argument("kernel_value: dt must be >= 0");
    double v = 0.0;
    for (int n = 0; n < params.shape.d_n; ++n) {
        v += params.a(e, ep, n) * std::exp(-params.b(e, ep, n) * dt);
    }
    return v;
}

std::vector<double> hawkes_intensity_left(const HawkesParams& params, const EventStream& events,
                                          double t) {
    if (t < 0.0 || t > events.horizon) {
        throw std::invalid_argument("hawkes_intensity_left: t outside [0, T]");
    }
    std::vector<double> lam(params.nu);
    for (std::size_t i = 0; i < events.size() && events.times[i] < t; ++i) {
        const double dt = t - events.times[i];
        for (int e = 0; e < params.shape.d_e; ++e) {
            lam[e] += kernel_value(params, e, events.types[i], dt);
        }
    }
    return lam;
}

IntensityValue msd_intensity_left(const HawkesParams& params, const EventStream& events,
                                  const StateTrajectory& state, double t) {
    if (state.horizon() != events.horizon) {
        throw std::invalid_argument("msd_intensity_left: state horizon differs from event horizon");
    }
    IntensityValue v;
    v.hawkes_part = hawkes_intensity_left(params, events, t);
    v.state_factor.resize(params.shape.d_e);
    const std::vector<double>& x = state.value_before(t);
    for (int e = 0; e < params.shape.d_e; ++e) {
        double dot = 0.0;
        for (int j = 0; j < params.shape.d_x; ++j) dot += params.th(e, j) * x[j];
        v.state_factor[e] = std::exp(dot);
    }
    return v;
}

IntensityAccumulator::IntensityAccumulator(const HawkesParams& params)
    : params_(params), g_(params.alpha.size(), 0.0) {}

void IntensityAccumulator::advance_to(double t) {
    if (t < time_) throw std::logic_error("IntensityAccumulator: cannot move backwards");
    const double dt = t - time_;
    if (dt > 0.0) {
        for (std::size_t k = 0; k < g_.size(); ++k) {
            g_[k] *= std::exp(-params_.beta[k] * dt);
        }
    }
    time_ = t;
}

void IntensityAccumulator::add_event(int type) {
    for (int e = 0; e < params_.shape.d_e; ++e) {
        for (int n = 0; n < params_.shape.d_n; ++n) {
            g_[params_.idx(e, type, n)] += params_.a(e, type, n);
        }
    }
}

double IntensityAccumulator::hawkes(int e) const {
    double v = params_.nu[e];
    const std::size_t base = params_.idx(e, 0, 0);
    const std::size_t count = static_cast<std::size_t>(params_.shape.d_e) * params_.shape.d_n;
    for (std::size_t k = 0; k < count; ++k) v += g_[base + k];
    return v;
}

double IntensityAccumulator::state_factor(int e, const std::vector<double>& x) const {
    double dot = 0.0;
    for (int j = 0; j < params_.shape.d_x; ++j) dot += params_.th(e, j) * x[j];
    return std::exp(dot);
}

double IntensityAccumulator::total(const StateTrajectory& state, std::size_t segment) const {
    double v = 0.0;
    for (int e = 0; e < params_.shape.d_e; ++e) {
        v += hawkes(e) * state_factor(e, state.values[segment]);
    }
    return v;
}

}  // namespace msdhawkes
