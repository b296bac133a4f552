#pragma once

#include <cstdint>
#include <vector>

#include "msdhawkes/likelihood.hpp"
#include "msdhawkes/types.hpp"

namespace msdhawkes {

struct MleOptions {
    int n_starts = 12;
    double nu_lo = 1e-8, nu_hi = 1e4;
    double alpha_lo = 1e-8, alpha_hi = 1e5;
    double beta_lo = 1e-6, beta_hi = 1e5;
    double theta_max = 5.0;
    double grad_tolerance = 1e-6;
    double f_tolerance = 1e-12;
    int max_iterations = 600;
    std::uint64_t rng_seed = 0;
    // Fixes off-diagonal excitation to zero (no cross-excitation variant).
    bool exclude_cross_excitation = false;
};

struct EmOptions {
    int n_starts = 4;  // independent random starts, best observed fit kept
    int max_sweeps = 500;
    double loglik_tolerance = 1e-9;    // absolute change in observed log-likelihood
    double param_tolerance = 1e-8;     // max relative parameter change
    double theta_grad_tolerance = 1e-8;
    double beta_root_tolerance = 1e-12;  // relative width of the beta bracket
    std::uint64_t rng_seed = 0;
};

// Branching-structure posterior: for the i-th event (global order),
// immigrant[i] = P(exogenous) and ancestor[i] lists (j, n', p) over earlier
// candidate ancestors j and exponential terms n'.
struct BranchingProbabilities {
    struct Ancestor {
        std::size_t j;
        int n;
        double p;
    };
    std::vector<double> immigrant;
    std::vector<std::vector<Ancestor>> ancestor;
};

FitResult fit_mle(const EventStream& events, const StateTrajectory& state, const ModelShape& shape,
                  const MleOptions& options = {});

FitResult fit_em(const EventStream& events, const StateTrajectory& state, const ModelShape& shape,
                 const EmOptions& options = {});

BranchingProbabilities compute_branching(const HawkesParams& params, const EventStream& events,
                                         const StateTrajectory& state);

// One model-selection candidate: kernel order plus an optional covariate
// subset (indices into the state trajectory; empty list with use_all_covariates
// keeps the full state).
struct ModelCandidate {
    int d_n = 1;
    std::vector<int> covariates;  // state covariate indices to keep
    bool use_all_covariates = true;
};

struct SelectionEntry {
    ModelCandidate candidate;
    FitResult fit;
    bool failed = false;
    std::string error;
};

struct SelectionResult {
    std::vector<SelectionEntry> table;  // sorted by ascending AIC
    std::size_t best = 0;               // index into table
};

SelectionResult select_model(const EventStream& events, const StateTrajectory& state,
                             const std::vector<ModelCandidate>& grid,
                             const MleOptions& options = {}, int n_jobs = 1);

// Restricts a trajectory to a covariate subset (used by select_model).
StateTrajectory project_state(const StateTrajectory& state, const std::vector<int>& covariates);

// Random starting point per the multi-start recipe: nu around the empirical
// rate, beta log-uniform then sorted, alpha from a uniform branching ratio,
// theta uniform on [-1, 1].
CoordinateParams random_start(int e, int d_e, int d_n, int d_x,
                              const std::vector<int>& event_counts, double horizon,
                              std::uint64_t seed, std::uint64_t stream);

}  // namespace msdhawkes
