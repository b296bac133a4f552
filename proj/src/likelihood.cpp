#include "msdhawkes/likelihood.hpp"

#include <algorithm>

#include "msdhawkes/intensity.hpp"
#include <cmath>
#include <set>
#include <stdexcept>

namespace msdhawkes {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

}  // namespace

LikelihoodContext::LikelihoodContext(const EventStream& events, const StateTrajectory& state,
                                     int d_e)
    : d_e_(d_e), d_x_(state.d_x()), horizon_(events.horizon) {
    events.validate(d_e);
    if (!events.strict) {
        throw std::invalid_argument("LikelihoodContext: duplicate timestamps must be removed "
                                    "before likelihood evaluation");
    }
    const MergedTimeline merged = build_merged_timeline(events, state);

    type_times_.resize(d_e);
    type_seg_.resize(d_e);
    seg_t0_.assign(merged.times.begin(), merged.times.end() - 1);
    seg_dt_.resize(merged.n_segments());
    seg_x_.resize(merged.n_segments());
    for (std::size_t j = 0; j < merged.n_segments(); ++j) {
        seg_dt_[j] = merged.times[j + 1] - merged.times[j];
        seg_x_[j] = &state.values[merged.state_index[j]];
    }
    for (std::size_t k = 0; k < merged.times.size(); ++k) {
        const int ev = merged.event_at[k];
        if (ev < 0) continue;
        const int e = events.types[ev];
        type_times_[e].push_back(events.times[ev]);
        type_seg_[e].push_back(k);
    }
}

CoordinateParams coordinate_slice(const HawkesParams& params, int e) {
    CoordinateParams cp;
    const int d_e = params.shape.d_e;
    const int d_n = params.shape.d_n;
    cp.nu = params.nu[e];
    cp.alpha.resize(static_cast<std::size_t>(d_e) * d_n);
    cp.beta.resize(cp.alpha.size());
    for (int ep = 0; ep < d_e; ++ep) {
        for (int n = 0; n < d_n; ++n) {
            cp.alpha[ep * d_n + n] = params.a(e, ep, n);
            cp.beta[ep * d_n + n] = params.b(e, ep, n);
        }
    }
    cp.theta.resize(params.shape.d_x);
    for (int j = 0; j < params.shape.d_x; ++j) cp.theta[j] = params.th(e, j);
    return cp;
}

void coordinate_assign(HawkesParams& params, int e, const CoordinateParams& cp) {
    const int d_n = params.shape.d_n;
    params.nu[e] = cp.nu;
    for (int ep = 0; ep < params.shape.d_e; ++ep) {
        for (int n = 0; n < d_n; ++n) {
            params.a(e, ep, n) = cp.alpha[ep * d_n + n];
            params.b(e, ep, n) = cp.beta[ep * d_n + n];
        }
    }
    for (int j = 0; j < params.shape.d_x; ++j) params.th(e, j) = cp.theta[j];
}

double coordinate_loglik(const LikelihoodContext& ctx, int e, int d_n, const CoordinateParams& cp,
                         CoordinateGradient* grad) {
    const int d_e = ctx.d_e();
    const int d_x = ctx.d_x();
    const std::size_t n_seg = ctx.n_segments();
    const std::vector<double>& te = ctx.event_times(e);
    const std::size_t ke = te.size();

    if (grad) {
        grad->d_nu = 0.0;
        grad->d_alpha.assign(static_cast<std::size_t>(d_e) * d_n, 0.0);
        grad->d_beta.assign(static_cast<std::size_t>(d_e) * d_n, 0.0);
        grad->d_theta.assign(d_x, 0.0);
    }

    // State weights w_j = exp(<theta, x_j>) per merged segment.
    std::vector<double> w(n_seg);
    for (std::size_t j = 0; j < n_seg; ++j) w[j] = std::exp(dot(cp.theta, ctx.segment_value(j)));

    // nu-part of the compensator and its theta gradient.
    double weighted_time = 0.0;                    // sum w_j dt_j
    std::vector<double> weighted_time_x(d_x, 0.0); // sum x_j w_j dt_j
    for (std::size_t j = 0; j < n_seg; ++j) {
        const double wd = w[j] * ctx.segment_lengths()[j];
        weighted_time += wd;
        const std::vector<double>& x = ctx.segment_value(j);
        for (int q = 0; q < d_x; ++q) weighted_time_x[q] += x[q] * wd;
    }

    // R recursions over the type-e events: R[(e', n)][i] and the beta
    // derivative R_beta, filled pair by pair.
    std::vector<double> R(ke * cp.alpha.size(), 0.0);
    std::vector<double> Rb(ke * cp.alpha.size(), 0.0);
    for (int ep = 0; ep < d_e; ++ep) {
        const std::vector<double>& tp = ctx.event_times(ep);
        for (int n = 0; n < d_n; ++n) {
            const std::size_t kn = ep * d_n + n;
            const double beta = cp.beta[kn];
            double r = 0.0, rb = 0.0;
            std::size_t jp = 0;
            for (std::size_t i = 0; i < ke; ++i) {
                if (i > 0) {
                    const double dti = te[i] - te[i - 1];
                    const double dec = std::exp(-beta * dti);
                    rb = dec * (rb - dti * r);
                    r *= dec;
                }
                while (jp < tp.size() && tp[jp] < te[i]) {
                    const double dt = te[i] - tp[jp];
                    const double ex = std::exp(-beta * dt);
                    r += ex;
                    rb -= dt * ex;
                    ++jp;
                }
                R[kn * ke + i] = r;
                Rb[kn * ke + i] = rb;
            }
            // jp only moves forward within one (e', n); reset for the next n.
            // (tp is rescanned, cost O(k) per pair.)
        }
    }

    // Log-intensity term at events and its gradient pieces.
    double term_log = 0.0;
    double term_state = 0.0;
    for (std::size_t i = 0; i < ke; ++i) {
        double lam = cp.nu;
        for (std::size_t kn = 0; kn < cp.alpha.size(); ++kn) {
            lam += cp.alpha[kn] * R[kn * ke + i];
        }
        term_log += std::log(lam);
        const std::vector<double>& xp = ctx.pre_event_value(e, i);
        term_state += dot(cp.theta, xp);
        if (grad) {
            const double inv = 1.0 / lam;
            grad->d_nu += inv;
            for (std::size_t kn = 0; kn < cp.alpha.size(); ++kn) {
                grad->d_alpha[kn] += R[kn * ke + i] * inv;
                grad->d_beta[kn] += cp.alpha[kn] * Rb[kn * ke + i] * inv;
            }
            for (int q = 0; q < d_x; ++q) grad->d_theta[q] += xp[q];
        }
    }

    // S recursions (backwards, in the clock of the exciting type e') for the
    // kernel part of the compensator.
    double comp_kernel = 0.0;
    std::vector<double> sth_buf(d_x);
    for (int ep = 0; ep < d_e; ++ep) {
        const std::vector<double>& tp = ctx.event_times(ep);
        const std::vector<std::size_t>& sp = ctx.event_segments(ep);
        const std::size_t kp = tp.size();
        if (kp == 0) continue;
        for (int n = 0; n < d_n; ++n) {
            const std::size_t kn = ep * d_n + n;
            const double beta = cp.beta[kn];
            double S = 0.0, Sb = 0.0;
            std::vector<double>& Sth = sth_buf;
            std::fill(Sth.begin(), Sth.end(), 0.0);
            double sumS = 0.0, sumSb = 0.0;
            std::vector<double> sumSth(d_x, 0.0);
            for (std::size_t i = kp; i-- > 0;) {
                const double tnext = (i + 1 < kp) ? tp[i + 1] : ctx.horizon();
                const double delta = tnext - tp[i];
                const double dec = std::exp(-beta * delta);
                Sb = dec * (Sb - delta * S);
                S *= dec;
                for (int q = 0; q < d_x; ++q) Sth[q] *= dec;
                const std::size_t seg_end = (i + 1 < kp) ? sp[i + 1] : n_seg;
                for (std::size_t j = sp[i]; j < seg_end; ++j) {
                    const double u = ctx.segment_starts()[j] - tp[i];
                    const double dtj = ctx.segment_lengths()[j];
                    const double eu = std::exp(-beta * u);
                    const double ed = std::exp(-beta * dtj);
                    const double core = w[j] * eu * (1.0 - ed);
                    S += core;
                    if (grad) {
                        Sb += w[j] * eu * (dtj * ed - u * (1.0 - ed));
                        const std::vector<double>& x = ctx.segment_value(j);
                        for (int q = 0; q < d_x; ++q) Sth[q] += x[q] * core;
                    }
                }
                sumS += S;
                if (grad) {
                    sumSb += Sb;
                    for (int q = 0; q < d_x; ++q) sumSth[q] += Sth[q];
                }
            }
            const double ratio = cp.alpha[kn] / beta;
            comp_kernel += ratio * sumS;
            if (grad) {
                grad->d_alpha[kn] -= sumS / beta;
                grad->d_beta[kn] -= ratio * (sumSb - sumS / beta);
                for (int q = 0; q < d_x; ++q) grad->d_theta[q] -= ratio * sumSth[q];
            }
        }
    }

    if (grad) {
        grad->d_nu -= weighted_time;
        for (int q = 0; q < d_x; ++q) grad->d_theta[q] -= cp.nu * weighted_time_x[q];
    }
    return -(cp.nu * weighted_time + comp_kernel) + term_log + term_state;
}

LogLikValue log_likelihood(const HawkesParams& params, const EventStream& events,
                           const StateTrajectory& state) {
    params.validate();
    const LikelihoodContext ctx(events, state, params.shape.d_e);
    LogLikValue v;
    v.per_coordinate.resize(params.shape.d_e);
    for (int e = 0; e < params.shape.d_e; ++e) {
        v.per_coordinate[e] =
            coordinate_loglik(ctx, e, params.shape.d_n, coordinate_slice(params, e));
        v.total += v.per_coordinate[e];
    }
    return v;
}

LogLikValue grad_log_likelihood(const HawkesParams& params, const EventStream& events,
                                const StateTrajectory& state, ParamGradient& grad) {
    params.validate();
    const LikelihoodContext ctx(events, state, params.shape.d_e);
    const int d_n = params.shape.d_n;
    grad.d_nu.assign(params.nu.size(), 0.0);
    grad.d_alpha.assign(params.alpha.size(), 0.0);
    grad.d_beta.assign(params.beta.size(), 0.0);
    grad.d_theta.assign(params.theta.size(), 0.0);
    LogLikValue v;
    v.per_coordinate.resize(params.shape.d_e);
    for (int e = 0; e < params.shape.d_e; ++e) {
        CoordinateGradient cg;
        v.per_coordinate[e] = coordinate_loglik(ctx, e, d_n, coordinate_slice(params, e), &cg);
        v.total += v.per_coordinate[e];
        grad.d_nu[e] = cg.d_nu;
        for (int ep = 0; ep < params.shape.d_e; ++ep) {
            for (int n = 0; n < d_n; ++n) {
                grad.d_alpha[params.idx(e, ep, n)] = cg.d_alpha[ep * d_n + n];
                grad.d_beta[params.idx(e, ep, n)] = cg.d_beta[ep * d_n + n];
            }
        }
        for (int j = 0; j < params.shape.d_x; ++j) {
            grad.d_theta[e * params.shape.d_x + j] = cg.d_theta[j];
        }
    }
    return v;
}

double brute_force_log_likelihood(const HawkesParams& params, const EventStream& events,
                                  const StateTrajectory& state,
                                  const BruteForceOptions& options) {
    params.validate();
    state.validate();
    if (state.horizon() != events.horizon) {
        throw std::invalid_argument("brute_force_log_likelihood: horizon mismatch");
    }
    if (events.size() > options.max_events) {
        throw std::invalid_argument("brute_force_log_likelihood: event count exceeds cap");
    }
    const int d_e = params.shape.d_e;
    const int d_n = params.shape.d_n;

    // Breakpoints: union of state breakpoints and event times.
    std::set<double> bp(state.breakpoints.begin(), state.breakpoints.end());
    bp.insert(events.times.begin(), events.times.end());
    const std::vector<double> tau(bp.begin(), bp.end());

    double ll = 0.0;

    // Event terms by direct summation over the strict past.
    for (std::size_t i = 0; i < events.size(); ++i) {
        const int e = events.types[i];
        double lam = params.nu[e];
        for (std::size_t j = 0; j < events.size(); ++j) {
            const bool past = options.index_ordered_ties
                                  ? (j < i && events.times[j] <= events.times[i])
                                  : (events.times[j] < events.times[i]);
            if (!past) continue;
            lam += kernel_value(params, e, events.types[j], events.times[i] - events.times[j]);
        }
        ll += std::log(lam);
        const std::vector<double>& x = state.value_before(events.times[i]);
        for (int q = 0; q < params.shape.d_x; ++q) ll += params.th(e, q) * x[q];
    }

    // Compensator, segment by segment with exact exponential antiderivatives.
    for (std::size_t s = 0; s + 1 < tau.size(); ++s) {
        const double t0 = tau[s];
        const double t1 = tau[s + 1];
        const std::vector<double>& x = state.value_before(t1);
        for (int e = 0; e < d_e; ++e) {
            double dot_tx = 0.0;
            for (int q = 0; q < params.shape.d_x; ++q) dot_tx += params.th(e, q) * x[q];
            const double wseg = std::exp(dot_tx);
            double integral = params.nu[e] * (t1 - t0);
            for (std::size_t j = 0; j < events.size(); ++j) {
                if (events.times[j] > t0) continue;
                const int ep = events.types[j];
                for (int n = 0; n < d_n; ++n) {
                    const double b = params.b(e, ep, n);
                    integral += params.a(e, ep, n) / b *
                                (std::exp(-b * (t0 - events.times[j])) -
                                 std::exp(-b * (t1 - events.times[j])));
                }
            }
            ll -= wseg * integral;
        }
    }
    return ll;
}

}  // namespace msdhawkes
