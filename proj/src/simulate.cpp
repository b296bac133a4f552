#include "msdhawkes/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "msdhawkes/intensity.hpp"
#include "msdhawkes/rng.hpp"

namespace msdhawkes {

void PowerLawKernelParams::validate() const {
    if (d_e < 1) throw std::invalid_argument("PowerLawKernelParams: d_e must be >= 1");
    const std::size_t n = static_cast<std::size_t>(d_e) * d_e;
    if (alpha.size() != n || beta.size() != n || tau.size() != n) {
        throw std::invalid_argument("PowerLawKernelParams: array sizes inconsistent with d_e");
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (alpha[k] < 0.0) throw std::invalid_argument("PowerLawKernelParams: alpha must be >= 0");
        if (!(beta[k] > 0.0)) throw std::invalid_argument("PowerLawKernelParams: beta must be > 0");
        if (!(tau[k] > 0.0)) throw std::invalid_argument("PowerLawKernelParams: tau must be > 0");
    }
}

StateTrajectory simulate_state(double rate, int d_x, double horizon, std::uint64_t seed) {
    if (!(rate > 0.0)) throw std::invalid_argument("simulate_state: rate must be positive");
    if (d_x == 0) return StateTrajectory::constant(horizon, 0);
    RngStream rng = RngStream::split(seed, 0);
    StateTrajectory s;
    s.breakpoints.push_back(0.0);
    double t = rng.exponential(rate);
    while (t < horizon) {
        s.breakpoints.push_back(t);
        t += rng.exponential(rate);
    }
    s.breakpoints.push_back(horizon);
    s.values.resize(s.breakpoints.size() - 1);
    for (auto& v : s.values) {
        v.resize(d_x);
        for (int j = 0; j < d_x; ++j) v[j] = rng.uniform(-1.0, 1.0);
    }
    return s;
}

EventStream simulate_msd(const HawkesParams& params, const StateTrajectory& state,
                         std::uint64_t seed, const SimulateOptions& options) {
    params.validate();
    state.validate();
    if (state.d_x() != params.shape.d_x) {
        throw std::invalid_argument("simulate_msd: state dimension differs from shape.d_x");
    }
    const double horizon = state.horizon();
    const int d_e = params.shape.d_e;

    EventStream out;
    out.horizon = horizon;
    out.strict = true;

    RngStream rng = RngStream::split(seed, 1);
    IntensityAccumulator acc(params);
    std::size_t seg = 0;
    double t = 0.0;
    std::vector<double> lam(d_e);
    while (true) {
        // The intensity can only jump upward at events and state breakpoints,
        // so the left-endpoint value dominates on the current segment.
        const double bound = acc.total(state, seg);
        const double candidate = t + rng.exponential(bound);
        const double seg_end = state.breakpoints[seg + 1];
        if (candidate >= seg_end) {
            if (seg_end >= horizon) break;
            t = seg_end;
            acc.advance_to(t);
            ++seg;
            continue;
        }
        acc.advance_to(candidate);
        double total = 0.0;
        for (int e = 0; e < d_e; ++e) {
            lam[e] = acc.hawkes(e) * acc.state_factor(e, state.values[seg]);
            total += lam[e];
        }
        const double u = rng.uniform() * bound;
        if (u < total) {
            int type = 0;
            double cum = lam[0];
            while (u >= cum && type + 1 < d_e) cum += lam[++type];
            out.times.push_back(candidate);
            out.types.push_back(type);
            acc.add_event(type);
            if (out.times.size() > options.max_events) {
                throw std::runtime_error("simulate_msd: event cap exceeded (" +
                                         std::to_string(options.max_events) +
                                         "); process may be supercritical");
            }
        }
        t = candidate;
    }
    return out;
}

std::vector<double> powerlaw_intensity_left(const PowerLawKernelParams& kernel,
                                            const std::vector<double>& nu,
                                            const std::vector<double>& theta,
                                            const EventStream& events,
                                            const StateTrajectory& state, double t) {
    const int d_e = kernel.d_e;
    const int d_x = state.d_x();
    std::vector<double> lam(nu);
    for (std::size_t j = 0; j < events.size() && events.times[j] < t; ++j) {
        const int ep = events.types[j];
        const double dt = t - events.times[j];
        for (int e = 0; e < d_e; ++e) {
            lam[e] += kernel.a(e, ep) *
                      std::pow(1.0 + dt / kernel.t(e, ep), -(1.0 + kernel.b(e, ep)));
        }
    }
    const std::vector<double>& x = state.value_before(t);
    for (int e = 0; e < d_e; ++e) {
        double dot = 0.0;
        for (int q = 0; q < d_x; ++q) dot += theta[e * d_x + q] * x[q];
        lam[e] *= std::exp(dot);
    }
    return lam;
}

EventStream simulate_powerlaw(const PowerLawKernelParams& kernel, const std::vector<double>& nu,
                              const std::vector<double>& theta, const StateTrajectory& state,
                              std::uint64_t seed, const SimulateOptions& options) {
    kernel.validate();
    state.validate();
    const int d_e = kernel.d_e;
    const int d_x = state.d_x();
    if (nu.size() != static_cast<std::size_t>(d_e) ||
        theta.size() != static_cast<std::size_t>(d_e) * d_x) {
        throw std::invalid_argument("simulate_powerlaw: nu/theta sizes inconsistent");
    }
    const double horizon = state.horizon();

    EventStream out;
    out.horizon = horizon;
    out.strict = true;

    RngStream rng = RngStream::split(seed, 2);
    std::size_t seg = 0;
    double t = 0.0;
    std::vector<double> lam(d_e);

    // Intensity at u+ (events at exactly u included, kernel value alpha).
    const auto intensity_at = [&](double u, std::size_t s, std::vector<double>& l) {
        for (int e = 0; e < d_e; ++e) l[e] = nu[e];
        for (std::size_t j = 0; j < out.size(); ++j) {
            const int ep = out.types[j];
            const double dt = u - out.times[j];
            for (int e = 0; e < d_e; ++e) {
                l[e] += kernel.a(e, ep) *
                        std::pow(1.0 + dt / kernel.t(e, ep), -(1.0 + kernel.b(e, ep)));
            }
        }
        double total = 0.0;
        for (int e = 0; e < d_e; ++e) {
            double dot = 0.0;
            for (int q = 0; q < d_x; ++q) dot += theta[e * d_x + q] * state.values[s][q];
            l[e] *= std::exp(dot);
            total += l[e];
        }
        return total;
    };

    while (true) {
        const double bound = intensity_at(t, seg, lam);
        const double candidate = t + rng.exponential(bound);
        const double seg_end = state.breakpoints[seg + 1];
        if (candidate >= seg_end) {
            if (seg_end >= horizon) break;
            t = seg_end;
            ++seg;
            continue;
        }
        const double total = intensity_at(candidate, seg, lam);
        const double u = rng.uniform() * bound;
        if (u < total) {
            int type = 0;
            double cum = lam[0];
            while (u >= cum && type + 1 < d_e) cum += lam[++type];
            out.times.push_back(candidate);
            out.types.push_back(type);
            if (out.times.size() > options.max_events) {
                throw std::runtime_error("simulate_powerlaw: event cap exceeded");
            }
        }
        t = candidate;
    }
    return out;
}

}  // namespace msdhawkes
