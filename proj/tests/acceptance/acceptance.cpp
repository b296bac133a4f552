// End-to-end acceptance suite. Each criterion prints a single PASS/FAIL line;
// the process exits nonzero when any criterion fails. Tolerances are pinned
// here, next to the checks they guard.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "msdhawkes/analysis.hpp"
#include "msdhawkes/diagnostics.hpp"
#include "msdhawkes/estimate.hpp"
#include "msdhawkes/likelihood.hpp"
#include "msdhawkes/rng.hpp"
#include "msdhawkes/simulate.hpp"
#include "msdhawkes/types.hpp"

#include "../unit/helpers.hpp"

namespace {

using namespace msdhawkes;

// ---------------------------------------------------------------------------
// Reference parameter sets used across criteria.

HawkesParams params_dn1() {
    HawkesParams p;
    p.shape = {2, 1, 2};
    p.nu = {0.5, 0.25};
    p.alpha = {4.0, 0.4, 1.0, 0.2};
    p.beta = {8.0, 2.0, 8.0, 2.0};
    p.theta = {0.25, -0.25, -0.25, 0.25};
    p.validate();
    return p;
}

HawkesParams params_dn3() {
    HawkesParams p;
    p.shape = {2, 3, 2};
    p.nu = {0.5, 0.25};
    p.alpha = {5.0, 2.0, 0.1, 5.0, 2.0, 0.1, 10.0, 2.0, 0.2, 10.0, 2.0, 0.2};
    p.beta = {50.0, 10.0, 1.0, 100.0, 20.0, 2.0, 200.0, 40.0, 4.0, 100.0, 20.0, 2.0};
    p.theta = {0.25, -0.25, -0.25, 0.25};
    p.validate();
    return p;
}

PowerLawKernelParams kernel_powerlaw() {
    PowerLawKernelParams k;
    k.d_e = 2;
    k.alpha = {0.5, 0.25, 0.25, 0.5};
    k.beta = {1.0, 2.0, 2.0, 1.0};
    k.tau = {1.0, 1.0, 1.0, 1.0};
    k.validate();
    return k;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double stdev(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0));
}

// Keeps randomly drawn betas well separated inside each kernel so that
// finite-difference perturbations cannot cross the ordering constraint.
void separate_betas(HawkesParams& p) {
    for (int e = 0; e < p.shape.d_e; ++e) {
        for (int ep = 0; ep < p.shape.d_e; ++ep) {
            for (int n = 1; n < p.shape.d_n; ++n) {
                if (p.b(e, ep, n) > 0.9 * p.b(e, ep, n - 1))
                    p.b(e, ep, n) = 0.9 * p.b(e, ep, n - 1);
            }
        }
    }
}

struct Tally {
    int failures = 0;
    void report(int id, const char* name, bool ok, const std::string& detail) {
        std::printf("criterion %2d %s  %s%s%s\n", id, ok ? "PASS" : "FAIL", name,
                    detail.empty() ? "" : "  -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Analytic gradient vs central finite differences.

void criterion_gradient(Tally& tally) {
    RngStream rng(101);
    double worst = 0.0;
    bool ok = true;
    for (int inst = 0; inst < 50 && ok; ++inst) {
        ModelShape shape{2, 1 + static_cast<int>(rng.uniform(0.0, 3.0)) % 3, 2};
        HawkesParams p = testutil::random_params(shape, rng);
        separate_betas(p);
        const double horizon = 30.0;
        const std::size_t k = 20 + static_cast<std::size_t>(rng.uniform(0.0, 280.0));
        const StateTrajectory state = testutil::random_state(2, horizon, rng);
        const EventStream events = testutil::random_events(2, horizon, k, rng);

        ParamGradient grad;
        grad_log_likelihood(p, events, state, grad);

        std::vector<double*> slots;
        std::vector<const double*> gslots;
        for (std::size_t i = 0; i < p.nu.size(); ++i) {
            slots.push_back(&p.nu[i]);
            gslots.push_back(&grad.d_nu[i]);
        }
        for (std::size_t i = 0; i < p.alpha.size(); ++i) {
            slots.push_back(&p.alpha[i]);
            gslots.push_back(&grad.d_alpha[i]);
        }
        for (std::size_t i = 0; i < p.beta.size(); ++i) {
            slots.push_back(&p.beta[i]);
            gslots.push_back(&grad.d_beta[i]);
        }
        for (std::size_t i = 0; i < p.theta.size(); ++i) {
            slots.push_back(&p.theta[i]);
            gslots.push_back(&grad.d_theta[i]);
        }

        for (std::size_t s = 0; s < slots.size(); ++s) {
            const double x0 = *slots[s];
            const double h = 1e-6 * (std::fabs(x0) + 1e-3);
            *slots[s] = x0 + h;
            const double fp = log_likelihood(p, events, state).total;
            *slots[s] = x0 - h;
            const double fm = log_likelihood(p, events, state).total;
            *slots[s] = x0;
            const double fd = (fp - fm) / (2.0 * h);
            const double err = std::fabs(*gslots[s] - fd);
            const double tol = 1e-5 * std::fabs(fd) + 1e-8;
            worst = std::max(worst, err / (std::fabs(fd) + 1e-8));
            if (err > tol) {
                ok = false;
                break;
            }
        }
    }
    tally.report(1, "analytic gradient matches central finite differences", ok,
                 fmt("worst relative error %.3g", worst));
}

// ---------------------------------------------------------------------------
// 2. Recursive log-likelihood equals the O(k^2) direct evaluation.

void criterion_oracle(Tally& tally) {
    RngStream rng(202);
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        ModelShape shape{2, 1 + static_cast<int>(rng.uniform(0.0, 3.0)) % 3, 2};
        HawkesParams p = testutil::random_params(shape, rng);
        const double horizon = 25.0;
        const std::size_t k = 5 + static_cast<std::size_t>(rng.uniform(0.0, 195.0));
        const StateTrajectory state = testutil::random_state(2, horizon, rng);
        const EventStream events = testutil::random_events(2, horizon, k, rng);
        const double rec = log_likelihood(p, events, state).total;
        const double bf = brute_force_log_likelihood(p, events, state);
        worst = std::max(worst, std::fabs(rec - bf) / std::max(1.0, std::fabs(bf)));
    }
    tally.report(2, "recursive log-likelihood equals brute force (rel 1e-9)", worst <= 1e-9,
                 fmt("worst relative difference %.3g", worst));
}

// ---------------------------------------------------------------------------
// 3. Parameter recovery at T = 1000, medians within reference dispersion.

void criterion_recovery(Tally& tally) {
    const HawkesParams truth = params_dn1();
    const int reps = 30;
    const double horizon = 1000.0;

    struct Target {
        const char* name;
        double truth, band;
        double (*get)(const HawkesParams&);
    };
    static const Target targets[] = {
        {"nu1", 0.500, 0.045, [](const HawkesParams& p) { return p.nu[0]; }},
        {"alpha11", 4.000, 0.372, [](const HawkesParams& p) { return p.a(0, 0, 0); }},
        {"alpha12", 0.400, 0.196, [](const HawkesParams& p) { return p.a(0, 1, 0); }},
        {"beta11", 8.000, 0.642, [](const HawkesParams& p) { return p.b(0, 0, 0); }},
        {"beta12", 2.000, 1.316, [](const HawkesParams& p) { return p.b(0, 1, 0); }},
        {"theta1_1", 0.250, 0.054, [](const HawkesParams& p) { return p.th(0, 0); }},
        {"theta1_2", -0.250, 0.072, [](const HawkesParams& p) { return p.th(0, 1); }},
        {"nu2", 0.250, 0.030, [](const HawkesParams& p) { return p.nu[1]; }},
        {"alpha21", 1.000, 0.239, [](const HawkesParams& p) { return p.a(1, 0, 0); }},
        {"alpha22", 0.200, 0.154, [](const HawkesParams& p) { return p.a(1, 1, 0); }},
        {"beta21", 8.000, 1.859, [](const HawkesParams& p) { return p.b(1, 0, 0); }},
        {"beta22", 2.000, 1.878, [](const HawkesParams& p) { return p.b(1, 1, 0); }},
        {"theta2_1", -0.250, 0.117, [](const HawkesParams& p) { return p.th(1, 0); }},
        {"theta2_2", 0.250, 0.111, [](const HawkesParams& p) { return p.th(1, 1); }},
    };

    std::vector<std::vector<double>> draws(std::size(targets));
    MleOptions opts;
    opts.n_starts = 6;
    for (int r = 0; r < reps; ++r) {
        const std::uint64_t seed = 3000 + 7919ULL * r;
        const StateTrajectory state = simulate_state(1.0, 2, horizon, seed);
        const EventStream events = simulate_msd(truth, state, seed + 1);
        opts.rng_seed = seed + 2;
        const FitResult fit = fit_mle(events, state, truth.shape, opts);
        for (std::size_t i = 0; i < std::size(targets); ++i)
            draws[i].push_back(targets[i].get(fit.params));
    }

    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < std::size(targets); ++i) {
        const double med = median(draws[i]);
        if (std::fabs(med - targets[i].truth) > targets[i].band) {
            ok = false;
            detail += std::string(targets[i].name) + fmt(" median %.3f outside %.3f band; ", med,
                                                         targets[i].band);
        }
    }
    if (ok) detail = "all 14 parameter medians inside the reference interquartile bands";
    tally.report(3, "parameter medians recover the 2x2 single-term truth", ok, detail);
}

// ---------------------------------------------------------------------------
// 4. EM reaches the MLE optimum and is sweep-monotone.

void criterion_em_parity(Tally& tally) {
    const HawkesParams truth = params_dn1();
    bool ok = true;
    double worst_gap = 0.0, worst_drop = 0.0;
    for (int inst = 0; inst < 10; ++inst) {
        const std::uint64_t seed = 4000 + 104729ULL * inst;
        const double horizon = 300.0;
        const StateTrajectory state = simulate_state(1.0, 2, horizon, seed);
        const EventStream events = simulate_msd(truth, state, seed + 1);

        // Track sweep monotonicity over every EM run performed.
        auto note_drops = [&](const FitResult& em) {
            for (const auto& path : em.em_loglik_path) {
                for (std::size_t s = 1; s < path.size(); ++s) {
                    const double drop = path[s - 1] - path[s];
                    worst_drop = std::max(worst_drop, drop);
                    if (drop > 1e-8) ok = false;
                }
            }
        };

        MleOptions mopts;
        mopts.rng_seed = seed + 2;
        FitResult mle = fit_mle(events, state, truth.shape, mopts);

        EmOptions eopts;
        eopts.rng_seed = seed + 3;
        FitResult em = fit_em(events, state, truth.shape, eopts);
        note_drops(em);

        // Small samples can be multimodal; the comparison is against the
        // optimum, so whichever method lags gets fresh restarts before the
        // gap counts as a failure.
        for (int round = 0; round < 3; ++round) {
            if (std::fabs(em.log_likelihood - mle.log_likelihood) <= 1e-4) break;
            if (em.log_likelihood < mle.log_likelihood) {
                eopts.n_starts = 8;
                eopts.rng_seed = seed + 100 + round;
                FitResult retry = fit_em(events, state, truth.shape, eopts);
                note_drops(retry);
                if (retry.log_likelihood > em.log_likelihood) em = std::move(retry);
            } else {
                mopts.rng_seed = seed + 200 + round;
                FitResult retry = fit_mle(events, state, truth.shape, mopts);
                if (retry.log_likelihood > mle.log_likelihood) mle = std::move(retry);
            }
        }

        const double gap = std::fabs(em.log_likelihood - mle.log_likelihood);
        worst_gap = std::max(worst_gap, gap);
        if (gap > 1e-4) ok = false;
        std::fprintf(stderr, "  [em-parity] instance %d gap %.3g\n", inst, gap);
    }
    tally.report(4, "EM log-likelihood matches the direct optimum and never decreases", ok,
                 fmt("worst |EM-MLE| gap %.3g, worst sweep decrease %.3g", worst_gap, worst_drop));
}

// ---------------------------------------------------------------------------
// 5. AIC picks the right kernel order on three-term data at T = 5000.

void criterion_aic_order(Tally& tally) {
    const HawkesParams truth = params_dn3();
    const int reps = 20;
    std::vector<int> histogram(6, 0);  // selected d_n in 1..5
    MleOptions opts;
    opts.n_starts = 3;
    opts.max_iterations = 150;
    opts.f_tolerance = 1e-9;
    std::vector<ModelCandidate> grid;
    for (int d = 1; d <= 5; ++d) grid.push_back({d, {}, true});
    for (int r = 0; r < reps; ++r) {
        const std::uint64_t seed = 5000 + 15485863ULL * r;
        const StateTrajectory state = simulate_state(1.0, 2, 5000.0, seed);
        const EventStream events = simulate_msd(truth, state, seed + 1);
        opts.rng_seed = seed + 2;
        const SelectionResult sel = select_model(events, state, grid, opts, 1);
        ++histogram[sel.table[sel.best].candidate.d_n];
        std::fprintf(stderr, "  [aic-order] replicate %d/%d -> d_n = %d\n", r + 1, reps,
                     sel.table[sel.best].candidate.d_n);
    }
    const int mode =
        static_cast<int>(std::max_element(histogram.begin() + 1, histogram.end()) -
                         histogram.begin());
    std::string detail = "selected counts (d_n=1..5):";
    for (int d = 1; d <= 5; ++d) detail += " " + std::to_string(histogram[d]);
    tally.report(5, "AIC modal kernel order is 3 on three-term data", mode == 3, detail);
}

// ---------------------------------------------------------------------------
// 6. Misspecified power-law data: selected order grows with the horizon.

void criterion_powerlaw_trend(Tally& tally) {
    const PowerLawKernelParams kernel = kernel_powerlaw();
    const std::vector<double> nu = {0.5, 0.5};
    const std::vector<double> theta = {0.25, -0.5, -0.25, 0.5};
    const int reps = 20;
    MleOptions opts;
    opts.n_starts = 3;
    opts.max_iterations = 150;
    opts.f_tolerance = 1e-9;
    std::vector<ModelCandidate> grid;
    for (int d = 1; d <= 3; ++d) grid.push_back({d, {}, true});

    std::vector<double> medians;
    std::string detail;
    for (const double horizon : {500.0, 2000.0}) {
        std::vector<double> selected;
        for (int r = 0; r < reps; ++r) {
            const std::uint64_t seed = 6000 + 32452843ULL * r + static_cast<std::uint64_t>(horizon);
            const StateTrajectory state = simulate_state(1.0, 2, horizon, seed);
            const EventStream events = simulate_powerlaw(kernel, nu, theta, state, seed + 1);
            opts.rng_seed = seed + 2;
            const SelectionResult sel = select_model(events, state, grid, opts, 1);
            selected.push_back(sel.table[sel.best].candidate.d_n);
            std::fprintf(stderr, "  [powerlaw] T=%g replicate %d/%d -> d_n = %d\n", horizon, r + 1,
                         reps, sel.table[sel.best].candidate.d_n);
        }
        medians.push_back(median(selected));
        detail += fmt("T=%g median d_n=%.1f; ", horizon, medians.back());
    }
    tally.report(6, "median selected order is nondecreasing in T on power-law data",
                 medians[1] >= medians[0], detail);
}

// ---------------------------------------------------------------------------
// 7. Residuals under the true parameters are Exp(1)-calibrated.

void criterion_residuals(Tally& tally) {
    const HawkesParams truth = params_dn1();
    const int reps = 100;
    // An exact 5% test passes ~95% per coordinate, so requiring the joint
    // pass in >= 90/100 would fail a perfect implementation half the time
    // (0.95^2 ~= 90.3%); the bar is per coordinate.
    int pass0 = 0, pass1 = 0;
    for (int r = 0; r < reps; ++r) {
        const std::uint64_t seed = 7000 + 49979687ULL * r;
        const StateTrajectory state = simulate_state(1.0, 2, 300.0, seed);
        const EventStream events = simulate_msd(truth, state, seed + 1);
        const ResidualSeries res = residuals(truth, events, state, 0.05);
        if (res.pass[0]) ++pass0;
        if (res.pass[1]) ++pass1;
    }
    tally.report(7, "true-parameter residuals pass KS(5%) on each coordinate >= 90/100",
                 pass0 >= 90 && pass1 >= 90,
                 fmt("coordinate pass rates %.0f/100 and %.0f/100", pass0, pass1));
}

// ---------------------------------------------------------------------------
// 8. Estimator dispersion shrinks like 1/sqrt(T).

void criterion_rate(Tally& tally) {
    const HawkesParams truth = params_dn1();
    const int reps = 30;
    const int n_par = 14;
    MleOptions opts;
    opts.n_starts = 8;

    auto run = [&](double horizon) {
        std::vector<std::vector<double>> draws(n_par);
        for (int r = 0; r < reps; ++r) {
            const std::uint64_t seed = 8000 + 86028121ULL * r + static_cast<std::uint64_t>(horizon);
            const StateTrajectory state = simulate_state(1.0, 2, horizon, seed);
            const EventStream events = simulate_msd(truth, state, seed + 1);
            opts.rng_seed = seed + 2;
            const HawkesParams est = fit_mle(events, state, truth.shape, opts).params;
            int i = 0;
            for (int e = 0; e < 2; ++e) {
                draws[i++].push_back(est.nu[e]);
                for (int ep = 0; ep < 2; ++ep) {
                    draws[i++].push_back(est.a(e, ep, 0));
                    draws[i++].push_back(est.b(e, ep, 0));
                }
                for (int j = 0; j < 2; ++j) draws[i++].push_back(est.th(e, j));
            }
        }
        std::vector<double> sd(n_par);
        for (int i = 0; i < n_par; ++i) sd[i] = stdev(draws[i]);
        return sd;
    };

    const std::vector<double> sd_short = run(500.0);
    const std::vector<double> sd_long = run(2000.0);
    std::vector<double> ratios(n_par);
    for (int i = 0; i < n_par; ++i) ratios[i] = sd_short[i] / sd_long[i];
    const double med = median(ratios);
    tally.report(8, "std-dev ratio between T and 4T is 2 +/- 0.5 (median over parameters)",
                 med >= 1.5 && med <= 2.5, fmt("median ratio %.2f", med));
}

// ---------------------------------------------------------------------------
// 9. Duplicated timestamps make the likelihood unbounded; dedup restores a
//    finite fit.

void criterion_duplicate_pathology(Tally& tally) {
    // Exactly one duplicated pair: the lower bound below is specific to the
    // two-event stream {t, t}.
    EventStream dup;
    dup.horizon = 2.0;
    dup.times = {1.0, 1.0};
    dup.types = {0, 0};
    dup.strict = false;
    const StateTrajectory state = StateTrajectory::constant(2.0, 0);

    BruteForceOptions bopts;
    bopts.index_ordered_ties = true;
    bool ok = true;
    double prev = -1e300;
    std::string detail;
    for (const double n : {1.0, 10.0, 100.0, 1000.0}) {
        HawkesParams p;
        p.shape = {1, 1, 0};
        p.nu = {1.0};
        p.alpha = {n};
        p.beta = {2.0 * n};
        p.theta = {};
        const double ll = brute_force_log_likelihood(p, dup, state, bopts);
        // Exact slack over the bound is e^{-2n}; allow for its underflow.
        const double bound = std::log(1.0 + n) - dup.horizon - 1.0;
        if (!(ll >= bound - 1e-9) || !(ll > prev)) ok = false;
        prev = ll;
        detail += fmt("n=%g: L=%.3f > %.3f; ", n, ll, bound);
    }

    EventStream clean = dup;
    clean.times = {1.0};
    clean.types = {0};
    clean.strict = true;
    MleOptions opts;
    opts.rng_seed = 9;
    const FitResult fit = fit_mle(clean, state, ModelShape{1, 1, 0}, opts);
    const bool finite = std::isfinite(fit.params.nu[0]) && std::isfinite(fit.params.alpha[0]) &&
                        std::isfinite(fit.params.beta[0]) &&
                        std::isfinite(fit.log_likelihood);
    if (!finite) ok = false;
    tally.report(9, "duplicate-timestamp likelihood grows unboundedly; dedup fit is finite", ok,
                 detail + (finite ? "dedup fit finite" : "dedup fit NOT finite"));
}

// ---------------------------------------------------------------------------
// 10. Next-type prediction on 2-d Poisson data converges to 2/3.

void criterion_prediction(Tally& tally) {
    HawkesParams p;
    p.shape = {2, 1, 0};
    p.nu = {1.0, 2.0};
    p.alpha = {0.0, 0.0, 0.0, 0.0};
    p.beta = {2.0, 1.0, 2.0, 1.0};
    p.theta = {};
    const double horizon = 10000.0 / 3.0;  // ~1e4 events at total rate 3
    const StateTrajectory state = StateTrajectory::constant(horizon, 0);
    const EventStream events = simulate_msd(p, state, 424242);
    const PredictionOutcome out = predict_next_type(p, events, state);
    const double err = std::fabs(out.model_accuracy - 2.0 / 3.0);
    tally.report(10, "Poisson(1,2) prediction accuracy converges to 2/3 (+/- 0.03)", err <= 0.03,
                 fmt("accuracy %.4f over %g events", out.model_accuracy,
                     static_cast<double>(out.n_events)));
}

// ---------------------------------------------------------------------------
// 11. Endogeneity: theta = 0 reduction and 2x2 closed form vs dense solver.

void criterion_endogeneity(Tally& tally) {
    RngStream rng(1111);
    bool ok = true;
    double worst_zero = 0.0, worst_eig = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        ModelShape shape{2, 1 + static_cast<int>(rng.uniform(0.0, 2.0)) % 2, 2};
        HawkesParams p = testutil::random_params(shape, rng, 0.9, 1.0);
        const std::vector<double> x = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};

        HawkesParams p0 = p;
        std::fill(p0.theta.begin(), p0.theta.end(), 0.0);
        const EndogeneityReport r0 = endogeneity(p0, x);
        worst_zero = std::max(worst_zero, std::fabs(r0.spectral_radius - r0.baseline_radius));
        if (std::fabs(r0.spectral_radius - r0.baseline_radius) > 1e-12) ok = false;

        const EndogeneityReport r = endogeneity(p, x);
        Eigen::Matrix2d m;
        m << r.matrix[0], r.matrix[1], r.matrix[2], r.matrix[3];
        const auto eig = m.eigenvalues();
        const double dense = std::max(std::abs(eig(0)), std::abs(eig(1)));
        worst_eig = std::max(worst_eig, std::fabs(r.spectral_radius - dense));
        if (std::fabs(r.spectral_radius - dense) > 1e-10) ok = false;
    }
    tally.report(11, "spectral radius: theta=0 reduction (1e-12) and 2x2 vs dense solver (1e-10)",
                 ok, fmt("worst theta=0 gap %.3g, worst eigensolver gap %.3g", worst_zero,
                         worst_eig));
}

}  // namespace

int main() {
    Tally tally;
    const auto t0 = std::chrono::steady_clock::now();
    auto timed = [&](const char* name, auto&& fn) {
        const auto a = std::chrono::steady_clock::now();
        fn(tally);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - a).count();
        std::fprintf(stderr, "  [%s] %.1f s\n", name, s);
    };
    timed("gradient", criterion_gradient);
    timed("oracle", criterion_oracle);
    timed("recovery", criterion_recovery);
    timed("em-parity", criterion_em_parity);
    timed("aic-order", criterion_aic_order);
    timed("powerlaw-trend", criterion_powerlaw_trend);
    timed("residuals", criterion_residuals);
    timed("rate", criterion_rate);
    timed("duplicate-pathology", criterion_duplicate_pathology);
    timed("prediction", criterion_prediction);
    timed("endogeneity", criterion_endogeneity);
    const double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "total %.1f s, %d failure(s)\n", total, tally.failures);
    return tally.failures ? 1 : 0;
}
