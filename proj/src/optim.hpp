#pragma once

#include <functional>
#include <vector>

namespace msdhawkes::optim {

// Objective: returns f(x) and fills *grad (same size as x) when grad is
// non-null; value-only calls (line-search trials) pass nullptr. Minimization.
using Objective = std::function<double(const std::vector<double>&, std::vector<double>*)>;

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;
};

struct Options {
    int max_iterations = 500;
    int history = 25;
    double grad_tolerance = 1e-6;   // projected-gradient infinity norm
    double f_tolerance = 1e-12;     // relative function change
};

struct Result {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Limited-memory BFGS with gradient projection onto box constraints:
// bound-active coordinates (with gradient pushing outward) are frozen each
// iteration, the quasi-Newton direction is built on the free subspace, and
// trial points are projected back onto the box during a backtracking
// Armijo line search.
Result minimize_box_lbfgs(const Objective& fn, std::vector<double> x0, const Box& box,
                          const Options& options = {});

}  // namespace msdhawkes::optim
