#pragma once

// Shared generators and oracles for the randomized test suites.

#include <algorithm>
#include <cmath>
#include <vector>

#include "msdhawkes/rng.hpp"
#include "msdhawkes/types.hpp"

namespace testutil {

using msdhawkes::EventStream;
using msdhawkes::HawkesParams;
using msdhawkes::ModelShape;
using msdhawkes::RngStream;
using msdhawkes::StateTrajectory;

// Random valid parameter set: stable kernels (row branching ratio below
// ratio_hi), betas log-uniform then sorted decreasing per kernel.
inline HawkesParams random_params(const ModelShape& shape, RngStream& rng,
                                  double ratio_hi = 0.6, double theta_max = 0.5) {
    HawkesParams p;
    p.shape = shape;
    p.nu.resize(shape.d_e);
    p.alpha.resize(static_cast<std::size_t>(shape.d_e) * shape.d_e * shape.d_n);
    p.beta.resize(p.alpha.size());
    p.theta.resize(static_cast<std::size_t>(shape.d_e) * shape.d_x);
    for (int e = 0; e < shape.d_e; ++e) p.nu[e] = rng.uniform(0.2, 0.8) / shape.d_e;
    for (int e = 0; e < shape.d_e; ++e) {
        for (int ep = 0; ep < shape.d_e; ++ep) {
            std::vector<double> betas(shape.d_n);
            for (double& b : betas) b = std::exp(rng.uniform(std::log(0.5), std::log(50.0)));
            std::sort(betas.rbegin(), betas.rend());
            const double ratio = rng.uniform(0.05, ratio_hi) / shape.d_e;
            for (int n = 0; n < shape.d_n; ++n) {
                p.b(e, ep, n) = betas[n];
                // split the kernel mass over terms
                p.a(e, ep, n) = ratio / shape.d_n * betas[n];
            }
        }
    }
    for (double& t : p.theta) t = rng.uniform(-theta_max, theta_max);
    p.validate();
    return p;
}

// Random piecewise-constant state with roughly rate*T interior breakpoints.
inline StateTrajectory random_state(int d_x, double horizon, RngStream& rng, double rate = 0.5) {
    StateTrajectory s;
    s.breakpoints.push_back(0.0);
    double t = 0.0;
    while (true) {
        t += rng.exponential(rate);
        if (t >= horizon) break;
        s.breakpoints.push_back(t);
    }
    s.breakpoints.push_back(horizon);
    for (std::size_t j = 0; j + 1 < s.breakpoints.size(); ++j) {
        std::vector<double> x(static_cast<std::size_t>(d_x));
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        s.values.push_back(std::move(x));
    }
    s.validate();
    return s;
}

// k events at uniform sorted (distinct) times, uniform types.
inline EventStream random_events(int d_e, double horizon, std::size_t k, RngStream& rng) {
    EventStream ev;
    ev.horizon = horizon;
    ev.times.resize(k);
    for (double& t : ev.times) t = rng.uniform(0.0, horizon);
    std::sort(ev.times.begin(), ev.times.end());
    for (std::size_t i = 1; i < k; ++i) {
        if (ev.times[i] <= ev.times[i - 1])
            ev.times[i] = std::nextafter(ev.times[i - 1], horizon);
    }
    ev.types.resize(k);
    for (int& e : ev.types) e = static_cast<int>(rng.uniform(0.0, 1.0) * d_e) % d_e;
    ev.strict = true;
    ev.validate(d_e);
    return ev;
}

}  // namespace testutil
