#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "helpers.hpp"
#include "msdhawkes/analysis.hpp"
#include "msdhawkes/simulate.hpp"

using namespace msdhawkes;

namespace {

double eigen_radius(const std::vector<double>& m, int d) {
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = m[i * d + j];
    const auto ev = a.eigenvalues();
    double r = 0.0;
    for (int i = 0; i < d; ++i) r = std::max(r, std::abs(ev[i]));
    return r;
}

HawkesParams benchmark_params() {
    HawkesParams p = HawkesParams::zeros({2, 1, 2});
    p.nu = {0.5, 0.25};
    p.alpha = {4.0, 0.4, 1.0, 0.2};
    p.beta = {8.0, 2.0, 8.0, 2.0};
    p.theta = {0.25, -0.25, -0.25, 0.25};
    return p;
}

}  // namespace

TEST_CASE("scalar endogeneity is the branching ratio") {
    HawkesParams p = HawkesParams::zeros({1, 1, 0});
    p.nu = {1.0};
    p.alpha = {1.0};
    p.beta = {2.0};
    const auto r = endogeneity(p, {});
    CHECK(r.spectral_radius == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.baseline_radius == r.spectral_radius);
}

TEST_CASE("zero theta equals the standard radius") {
    RngStream rng = RngStream::split(21, 0);
    auto p = testutil::random_params({2, 2, 2}, rng);
    std::fill(p.theta.begin(), p.theta.end(), 0.0);
    const auto r = endogeneity(p, {0.7, -0.3});
    CHECK(r.spectral_radius == doctest::Approx(r.baseline_radius).epsilon(1e-15));
}

TEST_CASE("closed-form 2x2 radius matches a dense eigensolver") {
    const auto p = benchmark_params();
    const auto r = endogeneity(p, {1.0, -1.0});
    CHECK(r.spectral_radius == doctest::Approx(eigen_radius(r.matrix, 2)).epsilon(1e-10));

    RngStream rng = RngStream::split(22, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto q = testutil::random_params({2, 2, 2}, rng, 0.9);
        const auto rr = endogeneity(q, {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        CHECK(rr.spectral_radius ==
              doctest::Approx(eigen_radius(rr.matrix, 2)).epsilon(1e-10));
    }
}

TEST_CASE("power iteration matches Eigen for larger matrices") {
    RngStream rng = RngStream::split(23, 0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> m(16);
        for (double& v : m) v = rng.uniform(0.0, 1.0);
        CHECK(spectral_radius(m, 4) == doctest::Approx(eigen_radius(m, 4)).epsilon(1e-9));
    }
}

TEST_CASE("swap symmetry of the endogeneity grid") {
    // Parameters symmetric under swapping the two coordinates and negating
    // the first covariate: radius at x equals radius at the swapped -x.
    HawkesParams p = HawkesParams::zeros({2, 1, 1});
    p.nu = {0.5, 0.5};
    p.alpha = {2.0, 0.5, 0.5, 2.0};
    p.beta = {8.0, 4.0, 4.0, 8.0};
    p.theta = {0.3, -0.3};
    for (double x : {-1.0, -0.25, 0.6}) {
        const auto a = endogeneity(p, {x});
        const auto b = endogeneity(p, {-x});
        CHECK(a.spectral_radius == doctest::Approx(b.spectral_radius).epsilon(1e-12));
    }
}

TEST_CASE("prediction on asymmetric Poisson rates") {
    HawkesParams p = HawkesParams::zeros({2, 1, 0});
    p.nu = {1.0, 2.0};
    p.beta = {1.0, 0.5, 1.0, 0.5};

    const double T = 1500.0;
    const auto st = StateTrajectory::constant(T, 0);
    const auto ev = simulate_msd(p, st, 31);
    const auto out = predict_next_type(p, ev, st, -1);

    for (int t : out.model_prediction) CHECK(t == 1);  // always the faster type
    CHECK(out.model_accuracy == doctest::Approx(2.0 / 3.0).epsilon(0.06));
    CHECK(!out.has_imbalance);
    CHECK(out.n_events == ev.size());
}

TEST_CASE("alternating stream defeats the Last benchmark") {
    HawkesParams p = HawkesParams::zeros({2, 1, 0});
    p.nu = {0.5, 0.5};
    p.alpha = {3.0, 0.0, 0.0, 3.0};  // strong self-excitation
    p.beta = {6.0, 1.0, 6.0, 1.0};

    EventStream ev;
    ev.horizon = 20.0;
    for (int i = 0; i < 19; ++i) {
        ev.times.push_back(1.0 + i);
        ev.types.push_back(i % 2);
    }
    ev.strict = true;
    const auto st = StateTrajectory::constant(20.0, 0);
    const auto out = predict_next_type(p, ev, st, -1);
    CHECK(out.last_accuracy == 0.0);
}

TEST_CASE("prediction is invariant under common intensity scaling") {
    RngStream rng = RngStream::split(37, 0);
    const auto p = testutil::random_params({2, 1, 2}, rng);
    const double T = 100.0;
    const auto st = testutil::random_state(2, T, rng);
    const auto ev = simulate_msd(p, st, 38);

    HawkesParams scaled = p;
    for (double& v : scaled.nu) v *= 3.0;
    for (double& v : scaled.alpha) v *= 3.0;
    const auto a = predict_next_type(p, ev, st, -1);
    const auto b = predict_next_type(scaled, ev, st, -1);
    CHECK(a.model_prediction == b.model_prediction);
}

TEST_CASE("imbalance benchmark follows the sign rule") {
    HawkesParams p = HawkesParams::zeros({2, 1, 1});
    p.nu = {1.0, 1.0};
    p.beta = {1.0, 0.5, 1.0, 0.5};

    EventStream ev;
    ev.horizon = 10.0;
    ev.times = {2.0, 4.0, 6.0};
    ev.types = {0, 1, 0};
    ev.strict = true;
    StateTrajectory st;
    st.breakpoints = {0.0, 3.0, 10.0};
    st.values = {{-0.5}, {0.5}};  // negative then positive imbalance

    const auto out = predict_next_type(p, ev, st, 0);
    CHECK(out.has_imbalance);
    // events at 2 (x=-0.5 -> type 1 predicted correct), 4 (x=0.5 -> type 2,
    // correct), 6 (x=0.5 -> type 2, wrong)
    CHECK(out.imbalance_accuracy == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("co-timed events share the pre-time intensity") {
    HawkesParams p = HawkesParams::zeros({2, 1, 0});
    p.nu = {1.0, 1.1};
    p.alpha = {5.0, 0.0, 0.0, 0.0};  // a type-1 event boosts type 1 strongly
    p.beta = {5.0, 1.0, 5.0, 1.0};

    EventStream ev;
    ev.horizon = 10.0;
    ev.times = {5.0, 5.0};
    ev.types = {0, 1};
    ev.strict = false;  // prediction tolerates ties
    const auto st = StateTrajectory::constant(10.0, 0);
    const auto out = predict_next_type(p, ev, st, -1);
    // Both events see only nu: type 2 predicted twice despite the co-timed
    // type-1 event.
    CHECK(out.model_prediction == std::vector<int>{1, 1});
}

TEST_CASE("empirical intensity by state") {
    SUBCASE("constant state occupies one bin at rate nu") {
        EventStream ev;
        ev.horizon = 100.0;
        for (int i = 1; i <= 70; ++i) {
            ev.times.push_back(i * 100.0 / 71.0);
            ev.types.push_back(0);
        }
        ev.strict = true;
        StateTrajectory st;
        st.breakpoints = {0.0, 100.0};
        st.values = {{0.05}};
        const auto bins = empirical_intensity_by_state(ev, st, 0, 10, 1);
        int occupied = 0;
        for (const auto& b : bins) {
            if (b.occupancy > 0.0) {
                ++occupied;
                CHECK(b.rate[0] == doctest::Approx(0.7).epsilon(1e-9));
            } else {
                CHECK(std::isnan(b.rate[0]));
            }
        }
        CHECK(occupied == 1);
    }
    SUBCASE("positive theta gives an increasing profile") {
        HawkesParams p = HawkesParams::zeros({1, 1, 1});
        p.nu = {1.0};
        p.beta = {1.0};
        p.theta = {1.5};
        const double T = 3000.0;
        const auto st = simulate_state(1.0, 1, T, 40);
        const auto ev = simulate_msd(p, st, 41);
        const auto bins = empirical_intensity_by_state(ev, st, 0, 4, 1);
        REQUIRE(bins.size() == 4);
        for (std::size_t b = 1; b < bins.size(); ++b) {
            REQUIRE(bins[b].occupancy > 0.0);
            CHECK(bins[b].rate[0] > bins[b - 1].rate[0]);
        }
    }
}
