#include "optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace msdhawkes::optim {

namespace {

void project(std::vector<double>& x, const Box& box) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = std::clamp(x[i], box.lo[i], box.hi[i]);
    }
}

// Projected gradient: zero where the bound is active and the step would
// leave the box.
std::vector<double> projected_gradient(const std::vector<double>& x,
                                       const std::vector<double>& g, const Box& box) {
    std::vector<double> pg(g);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if ((x[i] <= box.lo[i] && g[i] > 0.0) || (x[i] >= box.hi[i] && g[i] < 0.0)) {
            pg[i] = 0.0;
        }
    }
    return pg;
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

Result minimize_box_lbfgs(const Objective& fn, std::vector<double> x0, const Box& box,
                          const Options& options) {
    const std::size_t dim = x0.size();
    if (box.lo.size() != dim || box.hi.size() != dim) {
        throw std::invalid_argument("minimize_box_lbfgs: bounds size mismatch");
    }
    project(x0, box);

    std::vector<double> x = std::move(x0);
    std::vector<double> g(dim);
    double f = fn(x, &g);

    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;

    Result res;
    res.converged = false;
    int iter = 0;
    int stagnant = 0;
    for (; iter < options.max_iterations; ++iter) {
        std::vector<double> pg = projected_gradient(x, g, box);
        if (inf_norm(pg) <= options.grad_tolerance) {
            res.converged = true;
            break;
        }

        // Two-loop recursion on the projected gradient.
        std::vector<double> d = pg;
        std::vector<double> a_coef(s_hist.size());
        for (std::size_t k = s_hist.size(); k-- > 0;) {
            a_coef[k] = rho_hist[k] * dot(s_hist[k], d);
            for (std::size_t i = 0; i < dim; ++i) d[i] -= a_coef[k] * y_hist[k][i];
        }
        if (!s_hist.empty()) {
            const double gamma =
                dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
            for (double& v : d) v *= gamma;
        }
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            const double b = rho_hist[k] * dot(y_hist[k], d);
            for (std::size_t i = 0; i < dim; ++i) d[i] += (a_coef[k] - b) * s_hist[k][i];
        }
        // d approximates H * pg; descent direction is -d. Keep frozen
        // coordinates frozen.
        for (std::size_t i = 0; i < dim; ++i) {
            if (pg[i] == 0.0) d[i] = 0.0;
        }
        if (dot(d, pg) <= 0.0) d = pg;  // fall back to steepest descent

        // Backtracking Armijo search along the projected arc.
        const double f0 = f;
        const double slope = -dot(d, pg);
        double step = 1.0;
        std::vector<double> x_new(dim), g_new(dim);
        double f_new = f0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (std::size_t i = 0; i < dim; ++i) x_new[i] = x[i] - step * d[i];
            project(x_new, box);
            f_new = fn(x_new, nullptr);
            if (std::isfinite(f_new) && f_new <= f0 + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // line search failed; stop at best point
        fn(x_new, &g_new);

        std::vector<double> s_vec(dim), y_vec(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            s_vec[i] = x_new[i] - x[i];
            y_vec[i] = g_new[i] - g[i];
        }
        const double sy = dot(s_vec, y_vec);
        if (sy > 1e-12 * inf_norm(y_vec) * inf_norm(s_vec) && sy > 0.0) {
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > options.history) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        x = std::move(x_new);
        g = g_new;
        const double df = f - f_new;
        f = f_new;
        if (df <= options.f_tolerance * (std::fabs(f) + 1.0)) {
            // Tolerate one stagnant step before giving up; the gradient
            // check decides whether stagnation is convergence.
            if (++stagnant >= 2) {
                std::vector<double> pg2 = projected_gradient(x, g, box);
                res.converged = inf_norm(pg2) <= 10.0 * options.grad_tolerance;
                ++iter;
                break;
            }
        } else {
            stagnant = 0;
        }
    }
    res.x = std::move(x);
    res.f = f;
    res.iterations = iter;
    return res;
}

}  // namespace msdhawkes::optim
