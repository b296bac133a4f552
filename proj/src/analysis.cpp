#include "msdhawkes/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "msdhawkes/intensity.hpp"

namespace msdhawkes {

double spectral_radius(const std::vector<double>& matrix, int dim) {
    if (dim == 1) return std::fabs(matrix[0]);
    if (dim == 2) {
        const double a = matrix[0], b = matrix[1], c = matrix[2], d = matrix[3];
        // Nonnegative matrix: eigenvalues real, largest is the radius.
        const double tr = a + d;
        const double disc = std::sqrt((a - d) * (a - d) + 4.0 * b * c);
        return std::max(std::fabs((tr + disc) / 2.0), std::fabs((tr - disc) / 2.0));
    }
    // Power iteration; converges to the Perron root for nonnegative matrices.
    std::vector<double> v(dim, 1.0 / dim), w(dim);
    double radius = 0.0;
    for (int it = 0; it < 100000; ++it) {
        double norm = 0.0;
        for (int i = 0; i < dim; ++i) {
            double s = 0.0;
            for (int j = 0; j < dim; ++j) s += matrix[i * dim + j] * v[j];
            w[i] = s;
            norm = std::max(norm, std::fabs(s));
        }
        if (norm == 0.0) return 0.0;
        for (int i = 0; i < dim; ++i) w[i] /= norm;
        if (std::fabs(norm - radius) <= 1e-12 * std::max(1.0, norm)) {
            return norm;
        }
        radius = norm;
        std::swap(v, w);
    }
    return radius;
}

EndogeneityReport endogeneity(const HawkesParams& params, const std::vector<double>& x) {
    params.validate();
    if (x.size() != static_cast<std::size_t>(params.shape.d_x)) {
        throw std::invalid_argument("endogeneity: state vector size differs from d_x");
    }
    const int d_e = params.shape.d_e;
    EndogeneityReport rep;
    rep.matrix.resize(static_cast<std::size_t>(d_e) * d_e);
    std::vector<double> base(rep.matrix.size());
    for (int e = 0; e < d_e; ++e) {
        double dot = 0.0;
        for (int q = 0; q < params.shape.d_x; ++q) dot += params.th(e, q) * x[q];
        const double m = std::exp(dot);
        for (int ep = 0; ep < d_e; ++ep) {
            double l1 = 0.0;
            for (int n = 0; n < params.shape.d_n; ++n) {
                l1 += params.a(e, ep, n) / params.b(e, ep, n);
            }
            base[e * d_e + ep] = l1;
            rep.matrix[e * d_e + ep] = m * l1;
        }
    }
    rep.spectral_radius = spectral_radius(rep.matrix, d_e);
    rep.baseline_radius = spectral_radius(base, d_e);
    return rep;
}

PredictionOutcome predict_next_type(const HawkesParams& params_prev_day,
                                    const EventStream& events, const StateTrajectory& state,
                                    int imbalance_index) {
    params_prev_day.validate();
    events.validate(params_prev_day.shape.d_e);
    if (state.horizon() != events.horizon) {
        throw std::invalid_argument("predict_next_type: state horizon differs from event horizon");
    }
    if (imbalance_index >= params_prev_day.shape.d_x) {
        throw std::invalid_argument("predict_next_type: imbalance covariate index out of range");
    }
    const int d_e = params_prev_day.shape.d_e;

    PredictionOutcome out;
    out.n_events = events.size();
    out.has_imbalance = imbalance_index >= 0;
    out.model_prediction.resize(events.size());

    IntensityAccumulator acc(params_prev_day);
    std::size_t model_correct = 0, last_correct = 0, last_total = 0;
    std::size_t imb_correct = 0;
    std::size_t i = 0;
    while (i < events.size()) {
        // Events sharing a timestamp see the same pre-time intensity.
        std::size_t group_end = i;
        while (group_end < events.size() && events.times[group_end] == events.times[i]) {
            ++group_end;
        }
        const double t = events.times[i];
        acc.advance_to(t);
        const std::vector<double>& x = state.value_before(t);
        int argmax = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (int e = 0; e < d_e; ++e) {
            const double lam = acc.hawkes(e) * acc.state_factor(e, x);
            if (lam > best) {  // ties break to the smallest index
                best = lam;
                argmax = e;
            }
        }
        for (std::size_t k = i; k < group_end; ++k) {
            out.model_prediction[k] = argmax;
            if (argmax == events.types[k]) ++model_correct;
            if (k > 0) {
                ++last_total;
                if (events.types[k - 1] == events.types[k]) ++last_correct;
            }
            if (imbalance_index >= 0) {
                const int pred = x[imbalance_index] < 0.0 ? 0 : 1;
                if (pred == events.types[k]) ++imb_correct;
            }
        }
        for (std::size_t k = i; k < group_end; ++k) acc.add_event(events.types[k]);
        i = group_end;
    }
    if (out.n_events > 0) {
        out.model_accuracy = static_cast<double>(model_correct) / out.n_events;
        if (imbalance_index >= 0) {
            out.imbalance_accuracy = static_cast<double>(imb_correct) / out.n_events;
        }
    }
    if (last_total > 0) out.last_accuracy = static_cast<double>(last_correct) / last_total;
    return out;
}

std::vector<EmpiricalIntensityBin> empirical_intensity_by_state(const EventStream& events,
                                                                const StateTrajectory& state,
                                                                int covariate, int n_bins,
                                                                int d_e) {
    if (covariate < 0 || covariate >= state.d_x()) {
        throw std::invalid_argument("empirical_intensity_by_state: covariate index out of range");
    }
    if (n_bins < 1) throw std::invalid_argument("empirical_intensity_by_state: n_bins must be >= 1");
    std::vector<EmpiricalIntensityBin> bins(n_bins);
    const double width = 2.0 / n_bins;
    for (int b = 0; b < n_bins; ++b) {
        bins[b].lo = -1.0 + b * width;
        bins[b].hi = -1.0 + (b + 1) * width;
        bins[b].counts.assign(d_e, 0);
        bins[b].rate.assign(d_e, 0.0);
    }
    const auto bin_of = [&](double v) {
        return std::clamp(static_cast<int>((v + 1.0) / width), 0, n_bins - 1);
    };
    for (std::size_t j = 0; j < state.values.size(); ++j) {
        bins[bin_of(state.values[j][covariate])].occupancy +=
            state.breakpoints[j + 1] - state.breakpoints[j];
    }
    for (std::size_t k = 0; k < events.size(); ++k) {
        const double v = state.value_before(events.times[k])[covariate];
        ++bins[bin_of(v)].counts[events.types[k]];
    }
    for (auto& b : bins) {
        for (int e = 0; e < d_e; ++e) {
            b.rate[e] = b.occupancy > 0.0
                            ? b.counts[e] / b.occupancy
                            : std::numeric_limits<double>::quiet_NaN();
        }
    }
    return bins;
}

}  // namespace msdhawkes
