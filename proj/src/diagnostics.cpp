#include "msdhawkes/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace msdhawkes {

ResidualSeries residuals(const HawkesParams& params, const EventStream& events,
                         const StateTrajectory& state, double level) {
    params.validate();
    events.validate(params.shape.d_e);
    if (state.horizon() != events.horizon) {
        throw std::invalid_argument("residuals: state horizon differs from event horizon");
    }
    const int d_e = params.shape.d_e;
    const int d_n = params.shape.d_n;
    const int d_x = params.shape.d_x;
    const MergedTimeline merged = build_merged_timeline(events, state);

    // mu accumulators: g[(e, e', n)] = sum over past events of e^{-beta dt},
    // maintained along the timeline in O(1) per segment.
    std::vector<double> g(params.alpha.size(), 0.0);
    std::vector<double> r_cur(d_e, 0.0);
    std::vector<bool> active(d_e, false);

    ResidualSeries out;
    out.level = level;
    out.residuals.resize(d_e);

    double t_prev = 0.0;
    for (std::size_t k = 0; k + 1 < merged.times.size(); ++k) {
        const double t0 = merged.times[k];
        const double dt_move = t0 - t_prev;
        if (dt_move > 0.0) {
            for (std::size_t kn = 0; kn < g.size(); ++kn) {
                g[kn] *= std::exp(-params.beta[kn] * dt_move);
            }
        }
        t_prev = t0;
        const int ev = merged.event_at[k];
        if (ev >= 0) {
            const int e = events.types[ev];
            if (active[e]) {
                out.residuals[e].push_back(r_cur[e]);
            }
            active[e] = true;
            r_cur[e] = 0.0;
            for (int e2 = 0; e2 < d_e; ++e2) {
                for (int n = 0; n < d_n; ++n) g[params.idx(e2, e, n)] += 1.0;
            }
        }
        const double dt = merged.times[k + 1] - t0;
        const std::vector<double>& x = state.values[merged.state_index[k]];
        for (int e = 0; e < d_e; ++e) {
            if (!active[e]) continue;
            double integral = params.nu[e] * dt;
            for (int ep = 0; ep < d_e; ++ep) {
                for (int n = 0; n < d_n; ++n) {
                    const double beta = params.b(e, ep, n);
                    integral += params.a(e, ep, n) / beta * g[params.idx(e, ep, n)] *
                                (1.0 - std::exp(-beta * dt));
                }
            }
            double dot = 0.0;
            for (int q = 0; q < d_x; ++q) dot += params.th(e, q) * x[q];
            r_cur[e] += std::exp(dot) * integral;
        }
    }

    out.ks.resize(d_e);
    out.pass.resize(d_e);
    out.low_power.resize(d_e);
    for (int e = 0; e < d_e; ++e) {
        out.low_power[e] = out.residuals[e].size() < 35;
        if (out.residuals[e].empty()) {
            out.ks[e] = {1.0, 0.0};
            out.pass[e] = false;
            continue;
        }
        out.ks[e] = ks_test_exp1(out.residuals[e]);
        out.pass[e] = out.ks[e].p_value >= level;
    }
    return out;
}

KsResult ks_test_exp1(const std::vector<double>& sample) {
    if (sample.empty()) throw std::invalid_argument("ks_test_exp1: empty sample");
    std::vector<double> s(sample);
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = 1.0 - std::exp(-s[i]);
        d = std::max(d, (i + 1) / n - f);
        d = std::max(d, f - i / n);
    }
    KsResult res;
    res.statistic = d;
    const double lambda = std::sqrt(n) * d;
    if (lambda < 1e-3) {
        res.p_value = 1.0;
        return res;
    }
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        p += sign * term;
        sign = -sign;
        if (term < 1e-12) break;
    }
    res.p_value = std::clamp(2.0 * p, 0.0, 1.0);
    return res;
}

FitReport fit_report(const FitResult& fit, const EventStream& events,
                     const StateTrajectory& state, double level) {
    const ResidualSeries rs = residuals(fit.params, events, state, level);
    FitReport rep;
    rep.ks = rs.ks;
    rep.pass.assign(rs.pass.begin(), rs.pass.end());
    rep.all_pass = true;
    for (bool p : rep.pass) rep.all_pass = rep.all_pass && p;
    rep.aic = fit.aic;
    rep.log_likelihood = fit.log_likelihood;
    return rep;
}

}  // namespace msdhawkes
