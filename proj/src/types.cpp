#include "msdhawkes/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace msdhawkes {

namespace {

std::string kernel_tag(int e, int ep, int n) {
    return "(" + std::to_string(e + 1) + "," + std::to_string(ep + 1) + "," +
           std::to_string(n + 1) + ")";
}

}  // namespace

void ModelShape::validate() const {
    if (d_e < 1) throw std::invalid_argument("ModelShape: d_e must be >= 1");
    if (d_n < 1) throw std::invalid_argument("ModelShape: d_n must be >= 1");
    if (d_x < 0) throw std::invalid_argument("ModelShape: d_x must be >= 0");
}

HawkesParams HawkesParams::zeros(const ModelShape& shape) {
    shape.validate();
    HawkesParams p;
    p.shape = shape;
    p.nu.assign(shape.d_e, 0.0);
    p.alpha.assign(static_cast<std::size_t>(shape.d_e) * shape.d_e * shape.d_n, 0.0);
    p.beta.assign(p.alpha.size(), 0.0);
    p.theta.assign(static_cast<std::size_t>(shape.d_e) * shape.d_x, 0.0);
    return p;
}

void HawkesParams::validate() const {
    shape.validate();
    const std::size_t n_kernel = static_cast<std::size_t>(shape.d_e) * shape.d_e * shape.d_n;
    if (nu.size() != static_cast<std::size_t>(shape.d_e) || alpha.size() != n_kernel ||
        beta.size() != n_kernel ||
        theta.size() != static_cast<std::size_t>(shape.d_e) * shape.d_x) {
        throw std::invalid_argument("HawkesParams: array sizes inconsistent with shape");
    }
    for (int e = 0; e < shape.d_e; ++e) {
        if (!(nu[e] > 0.0) || !std::isfinite(nu[e])) {
            throw std::invalid_argument("HawkesParams: nu[" + std::to_string(e + 1) +
                                        "] must be positive");
        }
    }
    for (int e = 0; e < shape.d_e; ++e) {
        for (int ep = 0; ep < shape.d_e; ++ep) {
            for (int n = 0; n < shape.d_n; ++n) {
                const double av = a(e, ep, n);
                const double bv = b(e, ep, n);
                if (av < 0.0 || !std::isfinite(av)) {
                    throw std::invalid_argument("HawkesParams: alpha" + kernel_tag(e, ep, n) +
                                                " must be >= 0");
                }
                if (!(bv > 0.0) || !std::isfinite(bv)) {
                    throw std::invalid_argument("HawkesParams: beta" + kernel_tag(e, ep, n) +
                                                " must be > 0");
                }
                if (n > 0 && !(b(e, ep, n - 1) > bv)) {
                    throw std::invalid_argument("HawkesParams: beta" + kernel_tag(e, ep, n - 1) +
                                                " must exceed beta" + kernel_tag(e, ep, n) +
                                                " (identifiability ordering)");
                }
            }
        }
    }
    for (double t : theta) {
        if (!std::isfinite(t)) throw std::invalid_argument("HawkesParams: theta must be finite");
    }
}

void HawkesParams::canonicalize() {
    for (int e = 0; e < shape.d_e; ++e) {
        for (int ep = 0; ep < shape.d_e; ++ep) {
            std::vector<std::pair<double, double>> terms(shape.d_n);
            for (int n = 0; n < shape.d_n; ++n) terms[n] = {b(e, ep, n), a(e, ep, n)};
            std::sort(terms.begin(), terms.end(),
                      [](const auto& lhs, const auto& rhs) { return lhs.first > rhs.first; });
            for (int n = 0; n < shape.d_n; ++n) {
                b(e, ep, n) = terms[n].first;
                a(e, ep, n) = terms[n].second;
            }
        }
    }
}

void EventStream::validate(int d_e) const {
    if (!(horizon > 0.0)) throw std::invalid_argument("EventStream: horizon must be positive");
    if (times.size() != types.size()) {
        throw std::invalid_argument("EventStream: times/types size mismatch");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0) || times[i] > horizon) {
            throw std::invalid_argument("EventStream: event " + std::to_string(i + 1) +
                                        " outside (0, T]");
        }
        if (i > 0 && times[i] < times[i - 1]) {
            throw std::invalid_argument("EventStream: times not sorted at event " +
                                        std::to_string(i + 1));
        }
        if (strict && i > 0 && times[i] == times[i - 1]) {
            throw std::invalid_argument("EventStream: duplicate timestamp at event " +
                                        std::to_string(i + 1) + " in strict stream");
        }
        if (types[i] < 0 || types[i] >= d_e) {
            throw std::invalid_argument("EventStream: event " + std::to_string(i + 1) +
                                        " has type outside [1, d_e]");
        }
    }
}

std::vector<int> EventStream::counts(int d_e) const {
    std::vector<int> c(d_e, 0);
    for (int t : types) ++c[t];
    return c;
}

StateTrajectory StateTrajectory::constant(double horizon, int d_x) {
    StateTrajectory s;
    s.breakpoints = {0.0, horizon};
    s.values = {std::vector<double>(d_x, 0.0)};
    return s;
}

std::size_t StateTrajectory::segment_before(double t) const {
    // Segment with left endpoint < t and right endpoint >= t; t = 0 maps to
    // the first segment.
    if (t <= breakpoints.front()) return 0;
    const auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - breakpoints.begin());
    return std::min(k - 1, values.size() - 1);
}

void StateTrajectory::validate() const {
    if (breakpoints.size() < 2) {
        throw std::invalid_argument("StateTrajectory: needs at least breakpoints {0, T}");
    }
    if (breakpoints.front() != 0.0) {
        throw std::invalid_argument("StateTrajectory: first breakpoint must be 0");
    }
    if (values.size() + 1 != breakpoints.size()) {
        throw std::invalid_argument("StateTrajectory: values/breakpoints size mismatch");
    }
    const std::size_t dx = values.front().size();
    for (std::size_t j = 1; j < breakpoints.size(); ++j) {
        if (!(breakpoints[j] > breakpoints[j - 1])) {
            throw std::invalid_argument("StateTrajectory: breakpoints not strictly increasing at " +
                                        std::to_string(j));
        }
    }
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (values[j].size() != dx) {
            throw std::invalid_argument("StateTrajectory: inconsistent value dimension at segment " +
                                        std::to_string(j));
        }
        for (double v : values[j]) {
            if (!(v >= -1.0 && v <= 1.0)) {
                throw std::invalid_argument("StateTrajectory: value outside [-1, 1] at segment " +
                                            std::to_string(j));
            }
        }
    }
}

MergedTimeline build_merged_timeline(const EventStream& events, const StateTrajectory& state) {
    if (!events.strict) {
        throw std::invalid_argument("build_merged_timeline: events must be strict (deduplicated)");
    }
    state.validate();
    if (state.horizon() != events.horizon) {
        throw std::invalid_argument("build_merged_timeline: state horizon differs from event horizon");
    }

    MergedTimeline m;
    m.times.reserve(state.breakpoints.size() + events.size());
    std::size_t si = 0;  // next state breakpoint
    std::size_t ei = 0;  // next event
    while (si < state.breakpoints.size() || ei < events.size()) {
        double t;
        int ev = -1;
        const double ts = si < state.breakpoints.size()
                              ? state.breakpoints[si]
                              : std::numeric_limits<double>::infinity();
        const double te =
            ei < events.size() ? events.times[ei] : std::numeric_limits<double>::infinity();
        if (te < ts) {
            t = te;
            ev = static_cast<int>(ei++);
        } else {
            t = ts;
            ++si;
            if (te == ts) ev = static_cast<int>(ei++);
        }
        m.times.push_back(t);
        m.event_at.push_back(ev);
    }
    if (m.times.back() != events.horizon) {
        m.times.push_back(events.horizon);
        m.event_at.push_back(-1);
    }
    m.state_index.resize(m.times.size() - 1);
    std::size_t seg = 0;
    for (std::size_t k = 0; k + 1 < m.times.size(); ++k) {
        while (seg + 1 < state.values.size() && state.breakpoints[seg + 1] <= m.times[k]) ++seg;
        m.state_index[k] = seg;
    }
    return m;
}

}  // namespace msdhawkes
