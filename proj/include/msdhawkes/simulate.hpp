#pragma once

#include <cstdint>

#include "msdhawkes/types.hpp"

namespace msdhawkes {

// Power-law kernel phi_{ee'}(t) = alpha (1 + t/tau)^{-(1+beta)}; used as a
// misspecification source for the model-order experiments.
struct PowerLawKernelParams {
    int d_e = 1;
    std::vector<double> alpha;  // d_e * d_e, (e, e')
    std::vector<double> beta;   // tail exponents, > 0
    std::vector<double> tau;    // seconds, > 0

    double& a(int e, int ep) { return alpha[e * d_e + ep]; }
    double a(int e, int ep) const { return alpha[e * d_e + ep]; }
    double b(int e, int ep) const { return beta[e * d_e + ep]; }
    double t(int e, int ep) const { return tau[e * d_e + ep]; }
    void validate() const;
};

struct SimulateOptions {
    std::size_t max_events = 10'000'000;  // explosion guard
};

// State process: breakpoints from a homogeneous Poisson process of the given
// rate, values i.i.d. uniform on [-1, 1]^{d_x}.
StateTrajectory simulate_state(double rate, int d_x, double horizon, std::uint64_t seed);

// Ogata thinning for the msdHawkes process. The dominating rate is the total
// intensity at the current left endpoint, re-anchored at every accepted
// event and every state breakpoint.
EventStream simulate_msd(const HawkesParams& params, const StateTrajectory& state,
                         std::uint64_t seed, const SimulateOptions& options = {});

// Thinning with direct O(k) intensity evaluation (no recursion is available
// for power-law kernels).
EventStream simulate_powerlaw(const PowerLawKernelParams& kernel, const std::vector<double>& nu,
                              const std::vector<double>& theta, const StateTrajectory& state,
                              std::uint64_t seed, const SimulateOptions& options = {});

// Direct power-law intensity at t- (testing hook and thinning internals).
std::vector<double> powerlaw_intensity_left(const PowerLawKernelParams& kernel,
                                            const std::vector<double>& nu,
                                            const std::vector<double>& theta,
                                            const EventStream& events,
                                            const StateTrajectory& state, double t);

}  // namespace msdhawkes
