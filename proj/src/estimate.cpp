#include "msdhawkes/estimate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "msdhawkes/intensity.hpp"
#include "msdhawkes/rng.hpp"
#include "optim.hpp"

namespace msdhawkes {

namespace {

// After sorting by decreasing beta, equal values (two terms on the same
// bound) would violate the strict ordering; nudge them apart.
void separate_equal_betas(HawkesParams& params) {
    for (int e = 0; e < params.shape.d_e; ++e) {
        for (int ep = 0; ep < params.shape.d_e; ++ep) {
            for (int n = 1; n < params.shape.d_n; ++n) {
                if (params.b(e, ep, n) >= params.b(e, ep, n - 1)) {
                    params.b(e, ep, n) = params.b(e, ep, n - 1) * (1.0 - 1e-9);
                }
            }
        }
    }
}

struct SweepAggregates {
    std::vector<double> offspring;       // (e', n) -> sum_i p_{i,j,n}
    std::vector<double> offspring_lag;   // (e', n) -> sum_i p_{i,j,n} (t_i - t_j)
    double immigrant = 0.0;              // sum_i p_{i,i}
};

// Branching posterior aggregates for coordinate e via the R recursions;
// O(k) rather than the O(k^2) dense posterior.
SweepAggregates branching_aggregates(const LikelihoodContext& ctx, int e, int d_n,
                                     const CoordinateParams& cp) {
    const int d_e = ctx.d_e();
    const std::vector<double>& te = ctx.event_times(e);
    const std::size_t ke = te.size();
    const std::size_t nk = cp.alpha.size();

    std::vector<double> R(ke * nk, 0.0), Rb(ke * nk, 0.0);
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
        }
    }

    SweepAggregates agg;
    agg.offspring.assign(nk, 0.0);
    agg.offspring_lag.assign(nk, 0.0);
    for (std::size_t i = 0; i < ke; ++i) {
        double lam = cp.nu;
        for (std::size_t kn = 0; kn < nk; ++kn) lam += cp.alpha[kn] * R[kn * ke + i];
        const double inv = 1.0 / lam;
        agg.immigrant += cp.nu * inv;
        for (std::size_t kn = 0; kn < nk; ++kn) {
            agg.offspring[kn] += cp.alpha[kn] * R[kn * ke + i] * inv;
            agg.offspring_lag[kn] += cp.alpha[kn] * (-Rb[kn * ke + i]) * inv;
        }
    }
    return agg;
}

// sum_i S^{ee'n}(i) and its beta derivative for exciting type ep, given the
// segment weights w_j = exp(<theta, x_j>).
std::pair<double, double> kernel_compensator_sums(const LikelihoodContext& ctx, int ep,
                                                  double beta, const std::vector<double>& w) {
    const std::vector<double>& tp = ctx.event_times(ep);
    const std::vector<std::size_t>& sp = ctx.event_segments(ep);
    const std::size_t kp = tp.size();
    double S = 0.0, Sb = 0.0, sumS = 0.0, sumSb = 0.0;
    for (std::size_t i = kp; i-- > 0;) {
        const double tnext = (i + 1 < kp) ? tp[i + 1] : ctx.horizon();
        const double delta = tnext - tp[i];
        const double dec = std::exp(-beta * delta);
        Sb = dec * (Sb - delta * S);
        S *= dec;
        const std::size_t seg_end = (i + 1 < kp) ? sp[i + 1] : ctx.n_segments();
        for (std::size_t j = sp[i]; j < seg_end; ++j) {
            const double u = ctx.segment_starts()[j] - tp[i];
            const double dtj = ctx.segment_lengths()[j];
            const double eu = std::exp(-beta * u);
            const double ed = std::exp(-beta * dtj);
            S += w[j] * eu * (1.0 - ed);
            Sb += w[j] * eu * (dtj * ed - u * (1.0 - ed));
        }
        sumS += S;
        sumSb += Sb;
    }
    return {sumS, sumSb};
}

// Per-segment integrals of the standard Hawkes intensity, q_j = int lambda^H,
// for the EM theta step. seg_event_type[k] is the type of the event opening
// the segment starting at breakpoint k (-1 if none).
std::vector<double> segment_hawkes_integrals(const LikelihoodContext& ctx, int d_n,
                                             const CoordinateParams& cp,
                                             const std::vector<int>& seg_event_type) {
    const int d_e = ctx.d_e();
    const std::size_t n_seg = ctx.n_segments();
    std::vector<double> h(cp.alpha.size(), 0.0);  // decayed unit sums per (e', n)
    std::vector<double> q(n_seg);
    double t_prev = 0.0;
    for (std::size_t j = 0; j < n_seg; ++j) {
        const double t0 = ctx.segment_starts()[j];
        const double dt0 = t0 - t_prev;
        if (dt0 > 0.0) {
            for (std::size_t kn = 0; kn < h.size(); ++kn) h[kn] *= std::exp(-cp.beta[kn] * dt0);
        }
        if (seg_event_type[j] >= 0) {
            const int ep = seg_event_type[j];
            for (int n = 0; n < d_n; ++n) h[ep * d_n + n] += 1.0;
        }
        const double dtj = ctx.segment_lengths()[j];
        double integral = cp.nu * dtj;
        for (int ep = 0; ep < d_e; ++ep) {
            for (int n = 0; n < d_n; ++n) {
                const std::size_t kn = ep * d_n + n;
                integral += cp.alpha[kn] / cp.beta[kn] * h[kn] *
                            (1.0 - std::exp(-cp.beta[kn] * dtj));
            }
        }
        q[j] = integral;
        t_prev = t0;
    }
    return q;
}

// Solves the small SPD system A x = b in place (Cholesky-free Gaussian
// elimination with partial pivoting; d_x is tiny).
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        }
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        if (a[c][c] == 0.0) throw std::runtime_error("solve_dense: singular system");
        for (std::size_t r = c + 1; r < n; ++r) {
            const double m = a[r][c] / a[c][c];
            for (std::size_t cc = c; cc < n; ++cc) a[r][cc] -= m * a[c][cc];
            b[r] -= m * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t c = n; c-- > 0;) {
        double s = b[c];
        for (std::size_t cc = c + 1; cc < n; ++cc) s -= a[c][cc] * x[cc];
        x[c] = s / a[c][c];
    }
    return x;
}

std::vector<double> segment_weights(const LikelihoodContext& ctx,
                                    const std::vector<double>& theta) {
    std::vector<double> w(ctx.n_segments());
    for (std::size_t j = 0; j < ctx.n_segments(); ++j) {
        const std::vector<double>& x = ctx.segment_value(j);
        double d = 0.0;
        for (std::size_t q = 0; q < theta.size(); ++q) d += theta[q] * x[q];
        w[j] = std::exp(d);
    }
    return w;
}

}  // namespace

CoordinateParams random_start(int e, int d_e, int d_n, int d_x,
                              const std::vector<int>& event_counts, double horizon,
                              std::uint64_t seed, std::uint64_t stream) {
    RngStream rng = RngStream::split(seed, stream);
    CoordinateParams cp;
    const double rate = std::max(event_counts[e], 1) / horizon;
    cp.nu = rng.uniform(0.5 * rate, 2.0 * rate);
    cp.alpha.resize(static_cast<std::size_t>(d_e) * d_n);
    cp.beta.resize(cp.alpha.size());
    for (int ep = 0; ep < d_e; ++ep) {
        std::vector<double> betas(d_n);
        for (int n = 0; n < d_n; ++n) {
            betas[n] = std::pow(10.0, rng.uniform(-1.0, 3.0));
        }
        std::sort(betas.rbegin(), betas.rend());
        const double ratio_total = rng.uniform(0.0, 0.8);
        std::vector<double> weight(d_n);
        double wsum = 0.0;
        for (int n = 0; n < d_n; ++n) {
            weight[n] = rng.uniform(0.0, 1.0);
            wsum += weight[n];
        }
        for (int n = 0; n < d_n; ++n) {
            cp.beta[ep * d_n + n] = betas[n];
            cp.alpha[ep * d_n + n] = ratio_total * weight[n] / wsum * betas[n];
        }
    }
    cp.theta.resize(d_x);
    for (int j = 0; j < d_x; ++j) cp.theta[j] = rng.uniform(-1.0, 1.0);
    return cp;
}

FitResult fit_mle(const EventStream& events, const StateTrajectory& state, const ModelShape& shape,
                  const MleOptions& options) {
    const auto t_start = std::chrono::steady_clock::now();
    shape.validate();
    state.validate();
    if (state.d_x() != shape.d_x) {
        throw std::invalid_argument("fit_mle: state dimension differs from shape.d_x");
    }
    const LikelihoodContext ctx(events, state, shape.d_e);
    const std::vector<int> counts = events.counts(shape.d_e);

    const int d_e = shape.d_e;
    const int d_n = shape.d_n;
    const int d_x = shape.d_x;
    const std::size_t nk = static_cast<std::size_t>(d_e) * d_n;
    const std::size_t dim = 1 + 2 * nk + d_x;

    FitResult out;
    out.params = HawkesParams::zeros(shape);
    out.method = FitMethod::MLE;
    out.per_coordinate_loglik.assign(d_e, 0.0);
    out.starts_used = 0;
    out.converged = true;

    for (int e = 0; e < d_e; ++e) {
        if (counts[e] == 0) {
            // alpha and theta of this coordinate are unidentifiable.
            CoordinateParams cp;
            cp.nu = options.nu_lo;
            cp.alpha.assign(nk, options.alpha_lo);
            cp.beta.resize(nk);
            for (int ep = 0; ep < d_e; ++ep) {
                for (int n = 0; n < d_n; ++n) {
                    cp.beta[ep * d_n + n] = 1.0 * std::pow(10.0, d_n - 1 - n);
                }
            }
            cp.theta.assign(d_x, 0.0);
            coordinate_assign(out.params, e, cp);
            out.warnings.push_back("coordinate " + std::to_string(e + 1) +
                                   " has no events; boundary fit returned");
            continue;
        }

        optim::Box box;
        box.lo.assign(dim, 0.0);
        box.hi.assign(dim, 0.0);
        box.lo[0] = options.nu_lo;
        box.hi[0] = options.nu_hi;
        for (std::size_t kn = 0; kn < nk; ++kn) {
            const int ep = static_cast<int>(kn) / d_n;
            const bool masked = options.exclude_cross_excitation && ep != e;
            box.lo[1 + kn] = masked ? 0.0 : options.alpha_lo;
            box.hi[1 + kn] = masked ? 0.0 : options.alpha_hi;
            box.lo[1 + nk + kn] = options.beta_lo;
            box.hi[1 + nk + kn] = options.beta_hi;
        }
        for (int j = 0; j < d_x; ++j) {
            box.lo[1 + 2 * nk + j] = -options.theta_max;
            box.hi[1 + 2 * nk + j] = options.theta_max;
        }

        const auto objective = [&](const std::vector<double>& x,
                                   std::vector<double>* g) -> double {
            CoordinateParams cp;
            cp.nu = x[0];
            cp.alpha.assign(x.begin() + 1, x.begin() + 1 + nk);
            cp.beta.assign(x.begin() + 1 + nk, x.begin() + 1 + 2 * nk);
            cp.theta.assign(x.begin() + 1 + 2 * nk, x.end());
            if (!g) return -coordinate_loglik(ctx, e, d_n, cp);
            CoordinateGradient cg;
            const double ll = coordinate_loglik(ctx, e, d_n, cp, &cg);
            (*g)[0] = -cg.d_nu;
            for (std::size_t kn = 0; kn < nk; ++kn) {
                (*g)[1 + kn] = -cg.d_alpha[kn];
                (*g)[1 + nk + kn] = -cg.d_beta[kn];
            }
            for (int j = 0; j < d_x; ++j) (*g)[1 + 2 * nk + j] = -cg.d_theta[j];
            return -ll;
        };

        optim::Options opt;
        opt.max_iterations = options.max_iterations;
        opt.grad_tolerance = options.grad_tolerance;
        opt.f_tolerance = options.f_tolerance;

        double best_f = std::numeric_limits<double>::infinity();
        std::vector<double> best_x;
        bool best_converged = false;
        for (int s = 0; s < options.n_starts; ++s) {
            const CoordinateParams cp0 =
                random_start(e, d_e, d_n, d_x, counts, events.horizon, options.rng_seed,
                             static_cast<std::uint64_t>(e) * 1000 + s);
            std::vector<double> x0(dim);
            x0[0] = cp0.nu;
            for (std::size_t kn = 0; kn < nk; ++kn) {
                x0[1 + kn] = cp0.alpha[kn];
                x0[1 + nk + kn] = cp0.beta[kn];
            }
            for (int j = 0; j < d_x; ++j) x0[1 + 2 * nk + j] = cp0.theta[j];
            const optim::Result r = optim::minimize_box_lbfgs(objective, std::move(x0), box, opt);
            if (r.f < best_f) {
                best_f = r.f;
                best_x = r.x;
                best_converged = r.converged;
            }
        }
        out.starts_used = options.n_starts;
        if (!best_converged) out.converged = false;

        CoordinateParams cp;
        cp.nu = best_x[0];
        cp.alpha.assign(best_x.begin() + 1, best_x.begin() + 1 + nk);
        cp.beta.assign(best_x.begin() + 1 + nk, best_x.begin() + 1 + 2 * nk);
        cp.theta.assign(best_x.begin() + 1 + 2 * nk, best_x.end());
        coordinate_assign(out.params, e, cp);
    }

    out.params.canonicalize();
    separate_equal_betas(out.params);
    out.params.validate();
    for (int e = 0; e < d_e; ++e) {
        out.per_coordinate_loglik[e] =
            coordinate_loglik(ctx, e, d_n, coordinate_slice(out.params, e));
        out.log_likelihood += out.per_coordinate_loglik[e];
    }
    out.n_params = shape.n_params();
    if (options.exclude_cross_excitation) {
        out.n_params -= 2 * d_e * (d_e - 1) * d_n;
    }
    out.aic = 2.0 * out.n_params - 2.0 * out.log_likelihood;
    out.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

BranchingProbabilities compute_branching(const HawkesParams& params, const EventStream& events,
                                         const StateTrajectory& state) {
    params.validate();
    events.validate(params.shape.d_e);
    state.validate();
    if (!events.strict) {
        throw std::invalid_argument("compute_branching: events must be strict");
    }
    const int d_n = params.shape.d_n;
    BranchingProbabilities bp;
    bp.immigrant.resize(events.size());
    bp.ancestor.resize(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        const int e = events.types[i];
        // The state factor cancels out of every branching probability; only
        // the standard Hawkes intensity appears.
        double lam = params.nu[e];
        for (std::size_t j = 0; j < i; ++j) {
            lam += kernel_value(params, e, events.types[j], events.times[i] - events.times[j]);
        }
        bp.immigrant[i] = params.nu[e] / lam;
        bp.ancestor[i].reserve(i * d_n);
        for (std::size_t j = 0; j < i; ++j) {
            const int ep = events.types[j];
            const double dt = events.times[i] - events.times[j];
            for (int n = 0; n < d_n; ++n) {
                const double p = params.a(e, ep, n) * std::exp(-params.b(e, ep, n) * dt) / lam;
                bp.ancestor[i].push_back({j, n, p});
            }
        }
    }
    return bp;
}

FitResult fit_em(const EventStream& events, const StateTrajectory& state, const ModelShape& shape,
                 const EmOptions& options) {
    const auto t_start = std::chrono::steady_clock::now();
    shape.validate();
    state.validate();
    if (state.d_x() != shape.d_x) {
        throw std::invalid_argument("fit_em: state dimension differs from shape.d_x");
    }
    const LikelihoodContext ctx(events, state, shape.d_e);
    const std::vector<int> counts = events.counts(shape.d_e);
    const int d_e = shape.d_e;
    const int d_n = shape.d_n;
    const int d_x = shape.d_x;
    const std::size_t nk = static_cast<std::size_t>(d_e) * d_n;

    // Type of the event opening each merged segment (-1 if a plain state
    // breakpoint), needed by the theta step.
    std::vector<int> seg_event_type(ctx.n_segments(), -1);
    for (int ep = 0; ep < d_e; ++ep) {
        for (std::size_t seg : ctx.event_segments(ep)) seg_event_type[seg] = ep;
    }

    FitResult out;
    out.params = HawkesParams::zeros(shape);
    out.method = FitMethod::EM;
    out.per_coordinate_loglik.assign(d_e, 0.0);
    out.starts_used = options.n_starts;
    out.converged = true;
    out.em_loglik_path.assign(d_e, {});

    for (int e = 0; e < d_e; ++e) {
        if (counts[e] == 0) {
            CoordinateParams cp;
            cp.nu = 1e-8;
            cp.alpha.assign(nk, 0.0);
            cp.beta.resize(nk);
            for (std::size_t kn = 0; kn < nk; ++kn) {
                cp.beta[kn] = std::pow(10.0, d_n - 1 - static_cast<int>(kn) % d_n);
            }
            cp.theta.assign(d_x, 0.0);
            coordinate_assign(out.params, e, cp);
            out.warnings.push_back("coordinate " + std::to_string(e + 1) +
                                   " has no events; boundary fit returned");
            continue;
        }

        // Several independent EM runs; the one reaching the highest observed
        // log-likelihood wins (single runs can settle in local optima).
        double run_best_ll = -std::numeric_limits<double>::infinity();
        CoordinateParams run_best_cp;
        bool run_best_converged = false;

        for (int start = 0; start < options.n_starts; ++start) {
            std::vector<double> path;
            CoordinateParams cp =
                random_start(e, d_e, d_n, d_x, counts, events.horizon, options.rng_seed,
                             static_cast<std::uint64_t>(e) * 1000 + start);
            double ll_prev = coordinate_loglik(ctx, e, d_n, cp);
            double ll_best = ll_prev;
            CoordinateParams cp_best = cp;
            bool converged = false;

            for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
                const CoordinateParams cp_old = cp;

                // E-step aggregates with the current parameters.
                const SweepAggregates agg = branching_aggregates(ctx, e, d_n, cp);

                // Theta step: damped Newton on the expected complete
                // log-likelihood, which in theta reduces to
                // sum_i <theta, X_{t_i-}> - sum_j w_j(theta) * int_seg lambda^H.
                if (d_x > 0) {
                    const std::vector<double> q = segment_hawkes_integrals(ctx, d_n, cp, seg_event_type);
                    std::vector<double> sx(d_x, 0.0);
                    for (std::size_t i = 0; i < ctx.n_events(e); ++i) {
                        const std::vector<double>& x = ctx.pre_event_value(e, i);
                        for (int j = 0; j < d_x; ++j) sx[j] += x[j];
                    }
                    const auto objective = [&](const std::vector<double>& theta) {
                        double g = 0.0;
                        for (int j = 0; j < d_x; ++j) g += theta[j] * sx[j];
                        const std::vector<double> w = segment_weights(ctx, theta);
                        for (std::size_t s = 0; s < ctx.n_segments(); ++s) g -= w[s] * q[s];
                        return g;
                    };
                    double g_cur = objective(cp.theta);
                    for (int it = 0; it < 100; ++it) {
                        const std::vector<double> w = segment_weights(ctx, cp.theta);
                        std::vector<double> grad(sx);
                        std::vector<std::vector<double>> hess(d_x, std::vector<double>(d_x, 0.0));
                        for (std::size_t s = 0; s < ctx.n_segments(); ++s) {
                            const std::vector<double>& x = ctx.segment_value(s);
                            const double wq = w[s] * q[s];
                            for (int a = 0; a < d_x; ++a) {
                                grad[a] -= x[a] * wq;
                                for (int b = 0; b <= a; ++b) hess[a][b] += x[a] * x[b] * wq;
                            }
                        }
                        double gnorm = 0.0;
                        for (double gv : grad) gnorm = std::max(gnorm, std::fabs(gv));
                        if (gnorm <= options.theta_grad_tolerance) break;
                        for (int a = 0; a < d_x; ++a) {
                            for (int b = a + 1; b < d_x; ++b) hess[a][b] = hess[b][a];
                            hess[a][a] += 1e-12;
                        }
                        std::vector<double> step = solve_dense(hess, grad);
                        double damp = 1.0;
                        for (int half = 0; half < 40; ++half) {
                            std::vector<double> trial(cp.theta);
                            for (int j = 0; j < d_x; ++j) trial[j] += damp * step[j];
                            const double g_trial = objective(trial);
                            if (g_trial >= g_cur) {
                                cp.theta = std::move(trial);
                                g_cur = g_trial;
                                break;
                            }
                            damp *= 0.5;
                        }
                    }
                }

                // Baseline update with the refreshed theta.
                const std::vector<double> w = segment_weights(ctx, cp.theta);
                double weighted_time = 0.0;
                for (std::size_t s = 0; s < ctx.n_segments(); ++s) {
                    weighted_time += w[s] * ctx.segment_lengths()[s];
                }
                cp.nu = std::max(agg.immigrant / weighted_time, 1e-12);

                // Kernel updates: per (e', n), beta solves the scalar stationarity
                // equation of the expected complete log-likelihood, then
                // alpha = rho * beta.
                for (int ep = 0; ep < d_e; ++ep) {
                    if (ctx.n_events(ep) == 0) continue;
                    for (int n = 0; n < d_n; ++n) {
                        const std::size_t kn = ep * d_n + n;
                        const double p_sum = agg.offspring[kn];
                        const double lag_sum = agg.offspring_lag[kn];
                        if (p_sum <= 1e-12) {
                            cp.alpha[kn] = 0.0;
                            continue;
                        }
                        const auto f = [&](double beta) {
                            const auto [sumS, sumSb] = kernel_compensator_sums(ctx, ep, beta, w);
                            return p_sum / beta - p_sum * sumSb / sumS - lag_sum;
                        };
                        double lo = std::max(cp.beta[kn] / 100.0, 1e-8);
                        double hi = std::min(cp.beta[kn] * 100.0, 1e8);
                        double flo = f(lo), fhi = f(hi);
                        int guard = 0;
                        while (flo < 0.0 && lo > 1e-10 && guard++ < 10) {
                            lo /= 100.0;
                            flo = f(lo);
                        }
                        guard = 0;
                        while (fhi > 0.0 && hi < 1e10 && guard++ < 10) {
                            hi *= 100.0;
                            fhi = f(hi);
                        }
                        if (flo < 0.0 || fhi > 0.0) {
                            out.warnings.push_back("beta root bracket failed for kernel (" +
                                                   std::to_string(e + 1) + "," +
                                                   std::to_string(ep + 1) + "," +
                                                   std::to_string(n + 1) + "); keeping previous");
                        } else {
                            // Bisection on log(beta); f is decreasing across the root.
                            for (int it = 0; it < 200 && (hi - lo) > options.beta_root_tolerance * lo;
                                 ++it) {
                                const double mid = std::sqrt(lo * hi);
                                if (f(mid) > 0.0) {
                                    lo = mid;
                                } else {
                                    hi = mid;
                                }
                            }
                            cp.beta[kn] = std::sqrt(lo * hi);
                        }
                        const double sumS = kernel_compensator_sums(ctx, ep, cp.beta[kn], w).first;
                        cp.alpha[kn] = p_sum / sumS * cp.beta[kn];
                    }
                }

                const double ll = coordinate_loglik(ctx, e, d_n, cp);
                path.push_back(ll);
                if (ll > ll_best) {
                    ll_best = ll;
                    cp_best = cp;
                }
                if (ll < ll_prev - 1e-8) {
                    out.warnings.push_back("coordinate " + std::to_string(e + 1) +
                                           ": observed log-likelihood decreased at sweep " +
                                           std::to_string(sweep + 1) + "; keeping best sweep");
                    break;
                }
                double max_rel = 0.0;
                const auto rel = [&](double now, double before) {
                    max_rel = std::max(max_rel,
                                       std::fabs(now - before) / (std::fabs(before) + 1e-12));
                };
                rel(cp.nu, cp_old.nu);
                for (std::size_t kn = 0; kn < nk; ++kn) {
                    rel(cp.alpha[kn], cp_old.alpha[kn]);
                    rel(cp.beta[kn], cp_old.beta[kn]);
                }
                for (int j = 0; j < d_x; ++j) rel(cp.theta[j], cp_old.theta[j]);
                if (std::fabs(ll - ll_prev) <= options.loglik_tolerance &&
                    max_rel <= options.param_tolerance) {
                    converged = true;
                    ll_prev = ll;
                    break;
                }
                ll_prev = ll;
            }

            if (ll_best > run_best_ll) {
                run_best_ll = ll_best;
                run_best_cp = cp_best;
                run_best_converged = converged;
                out.em_loglik_path[e] = std::move(path);
            }
        }
        coordinate_assign(out.params, e, run_best_cp);
        if (!run_best_converged) out.converged = false;
    }

    // Zero alpha entries need a small positive floor only for beta ordering;
    // alpha = 0 itself is valid.
    out.params.canonicalize();
    separate_equal_betas(out.params);
    out.params.validate();
    for (int e = 0; e < d_e; ++e) {
        out.per_coordinate_loglik[e] =
            coordinate_loglik(ctx, e, d_n, coordinate_slice(out.params, e));
        out.log_likelihood += out.per_coordinate_loglik[e];
    }
    out.n_params = shape.n_params();
    out.aic = 2.0 * out.n_params - 2.0 * out.log_likelihood;
    out.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

StateTrajectory project_state(const StateTrajectory& state, const std::vector<int>& covariates) {
    StateTrajectory out;
    out.breakpoints = state.breakpoints;
    out.values.reserve(state.values.size());
    for (const auto& v : state.values) {
        std::vector<double> row;
        row.reserve(covariates.size());
        for (int c : covariates) row.push_back(v.at(c));
        out.values.push_back(std::move(row));
    }
    return out;
}

SelectionResult select_model(const EventStream& events, const StateTrajectory& state,
                             const std::vector<ModelCandidate>& grid, const MleOptions& options,
                             int n_jobs) {
    SelectionResult res;
    res.table.resize(grid.size());

    const auto run_one = [&](std::size_t c) {
        SelectionEntry entry;
        entry.candidate = grid[c];
        try {
            const StateTrajectory local = grid[c].use_all_covariates
                                              ? state
                                              : project_state(state, grid[c].covariates);
            ModelShape shape;
            shape.d_e = 0;
            for (int t : events.types) shape.d_e = std::max(shape.d_e, t + 1);
            shape.d_e = std::max(shape.d_e, 1);
            shape.d_n = grid[c].d_n;
            shape.d_x = local.d_x();
            MleOptions local_opts = options;
            local_opts.rng_seed = options.rng_seed + c;  // independent start streams
            entry.fit = fit_mle(events, local, shape, local_opts);
        } catch (const std::exception& ex) {
            entry.failed = true;
            entry.error = ex.what();
        }
        return entry;
    };

    if (n_jobs <= 1 || grid.size() <= 1) {
        for (std::size_t c = 0; c < grid.size(); ++c) res.table[c] = run_one(c);
    } else {
        std::vector<std::future<SelectionEntry>> futures;
        futures.reserve(grid.size());
        for (std::size_t c = 0; c < grid.size(); ++c) {
            futures.push_back(std::async(std::launch::async, run_one, c));
        }
        for (std::size_t c = 0; c < grid.size(); ++c) res.table[c] = futures[c].get();
    }

    std::stable_sort(res.table.begin(), res.table.end(),
                     [](const SelectionEntry& lhs, const SelectionEntry& rhs) {
                         if (lhs.failed != rhs.failed) return !lhs.failed;
                         if (lhs.failed) return false;
                         if (std::fabs(lhs.fit.aic - rhs.fit.aic) > 1e-9) {
                             return lhs.fit.aic < rhs.fit.aic;
                         }
                         if (lhs.fit.n_params != rhs.fit.n_params) {
                             return lhs.fit.n_params < rhs.fit.n_params;
                         }
                         return lhs.candidate.d_n < rhs.candidate.d_n;
                     });
    res.best = 0;
    return res;
}

}  // namespace msdhawkes
