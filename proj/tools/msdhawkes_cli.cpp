// Command-line front end: simulation, estimation, model selection,
// diagnostics, endogeneity grids, next-event prediction, and batch
// replication experiments. Logs go to stderr, data to stdout or files.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "msdhawkes/analysis.hpp"
#include "msdhawkes/data.hpp"
#include "msdhawkes/diagnostics.hpp"
#include "msdhawkes/estimate.hpp"
#include "msdhawkes/likelihood.hpp"
#include "msdhawkes/simulate.hpp"
#include "msdhawkes/types.hpp"

using nlohmann::json;

namespace {

// Exit codes (documented in --help): 0 success, 2 bad flags/usage,
// 3 file I/O failure, 4 input validation failure, 5 internal error.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitValidation = 4;
constexpr int kExitInternal = 5;

struct CliError : std::runtime_error {
    int code;
    CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

void log_line(const std::string& msg) { std::cerr << "[msdhawkes] " << msg << "\n"; }

// ---------------------------------------------------------------------------
// JSON (de)serialization of parameter sets and fit results.

json params_to_json(const msdhawkes::HawkesParams& p) {
    return json{{"d_e", p.shape.d_e}, {"d_n", p.shape.d_n}, {"d_x", p.shape.d_x},
                {"nu", p.nu},         {"alpha", p.alpha},   {"beta", p.beta},
                {"theta", p.theta}};
}

msdhawkes::HawkesParams params_from_json(const json& j) {
    msdhawkes::HawkesParams p;
    p.shape.d_e = j.at("d_e").get<int>();
    p.shape.d_n = j.at("d_n").get<int>();
    p.shape.d_x = j.at("d_x").get<int>();
    p.nu = j.at("nu").get<std::vector<double>>();
    p.alpha = j.at("alpha").get<std::vector<double>>();
    p.beta = j.at("beta").get<std::vector<double>>();
    p.theta = j.at("theta").get<std::vector<double>>();
    p.validate();
    return p;
}

json fit_to_json(const msdhawkes::FitResult& fit) {
    return json{{"params", params_to_json(fit.params)},
                {"log_likelihood", fit.log_likelihood},
                {"aic", fit.aic},
                {"n_params", fit.n_params},
                {"per_coordinate_loglik", fit.per_coordinate_loglik},
                {"method", fit.method == msdhawkes::FitMethod::MLE ? "mle" : "em"},
                {"starts_used", fit.starts_used},
                {"converged", fit.converged},
                {"elapsed_s", fit.elapsed_s},
                {"warnings", fit.warnings}};
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError(kExitIo, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const std::exception& ex) {
        throw CliError(kExitValidation, path + ": " + ex.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw CliError(kExitIo, "cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
}

// Accepts either a bare parameter object or a full fit-result file (the
// "params" member is used), so fit output plugs straight into the
// downstream subcommands.
msdhawkes::HawkesParams load_params(const std::string& path) {
    json j = read_json_file(path);
    try {
        if (j.contains("params")) return params_from_json(j.at("params"));
        return params_from_json(j);
    } catch (const CliError&) {
        throw;
    } catch (const std::exception& ex) {
        throw CliError(kExitValidation, path + ": " + ex.what());
    }
}

// ---------------------------------------------------------------------------
// Built-in benchmark parameter sets for simulation experiments.

msdhawkes::HawkesParams benchmark_dn1() {
    msdhawkes::HawkesParams p;
    p.shape = {2, 1, 2};
    p.nu = {0.5, 0.25};
    p.alpha = {4.0, 0.4, 1.0, 0.2};
    p.beta = {8.0, 2.0, 8.0, 2.0};
    p.theta = {0.25, -0.25, -0.25, 0.25};
    p.validate();
    return p;
}

msdhawkes::HawkesParams benchmark_dn3() {
    msdhawkes::HawkesParams p;
    p.shape = {2, 3, 2};
    p.nu = {0.5, 0.25};
    p.alpha = {5.0, 2.0, 0.1, 5.0, 2.0, 0.1, 10.0, 2.0, 0.2, 10.0, 2.0, 0.2};
    p.beta = {50.0, 10.0, 1.0, 100.0, 20.0, 2.0, 200.0, 40.0, 4.0, 100.0, 20.0, 2.0};
    p.theta = {0.25, -0.25, -0.25, 0.25};
    p.validate();
    return p;
}

struct PowerLawBenchmark {
    msdhawkes::PowerLawKernelParams kernel;
    std::vector<double> nu;
    std::vector<double> theta;
    int d_x = 2;
};

PowerLawBenchmark benchmark_powerlaw() {
    PowerLawBenchmark b;
    b.kernel.d_e = 2;
    b.kernel.alpha = {0.5, 0.25, 0.25, 0.5};
    b.kernel.beta = {1.0, 2.0, 2.0, 1.0};
    b.kernel.tau = {1.0, 1.0, 1.0, 1.0};
    b.nu = {0.5, 0.5};
    b.theta = {0.25, -0.5, -0.25, 0.5};
    b.kernel.validate();
    return b;
}

// ---------------------------------------------------------------------------
// Small helpers.

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw CliError(kExitIo, "cannot open '" + path + "' for writing");
    return out;
}

// "1..5" or "1,3,5" -> list of kernel orders.
std::vector<int> parse_dn_list(const std::string& s) {
    std::vector<int> out;
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(s.substr(0, dots));
        const int hi = std::stoi(s.substr(dots + 2));
        if (lo < 1 || hi < lo) throw CliError(kExitUsage, "bad --dn range '" + s + "'");
        for (int d = lo; d <= hi; ++d) out.push_back(d);
        return out;
    }
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    if (out.empty()) throw CliError(kExitUsage, "bad --dn list '" + s + "'");
    return out;
}

// "all" or ";"-separated comma lists of covariate indices ("" = no covariates).
std::vector<msdhawkes::ModelCandidate> covariate_sets(const std::string& s, int d_n) {
    std::vector<msdhawkes::ModelCandidate> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
        msdhawkes::ModelCandidate c;
        c.d_n = d_n;
        if (tok == "all") {
            c.use_all_covariates = true;
        } else {
            c.use_all_covariates = false;
            std::stringstream ts(tok);
            std::string idx;
            while (std::getline(ts, idx, ',')) c.covariates.push_back(std::stoi(idx));
        }
        out.push_back(c);
    }
    if (out.empty()) throw CliError(kExitUsage, "bad --covariate-sets '" + s + "'");
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

msdhawkes::EventStream load_event_file(const std::string& path) {
    try {
        return msdhawkes::read_events_csv(path);
    } catch (const std::exception& ex) {
        throw CliError(kExitIo, ex.what());
    }
}

msdhawkes::StateTrajectory load_state_file(const std::string& path, double horizon) {
    if (path.empty()) return msdhawkes::StateTrajectory::constant(horizon, 0);
    try {
        auto state = msdhawkes::read_state_csv(path);
        return state;
    } catch (const std::exception& ex) {
        throw CliError(kExitIo, ex.what());
    }
}

// Runs fn(r) for r in [0, n) with at most jobs tasks in flight.
template <typename Fn>
void parallel_for(int n, int jobs, Fn fn) {
    if (jobs < 1) jobs = 1;
    std::vector<std::future<void>> futures;
    int next = 0;
    while (next < n || !futures.empty()) {
        while (next < n && static_cast<int>(futures.size()) < jobs) {
            futures.push_back(std::async(std::launch::async, fn, next));
            ++next;
        }
        futures.front().get();
        futures.erase(futures.begin());
    }
}

// ---------------------------------------------------------------------------
// Subcommand implementations.

struct SimulateArgs {
    std::string params_path;
    std::string benchmark;
    double horizon = 1000.0;
    double state_rate = 1.0;
    std::uint64_t seed = 1;
    std::string events_out = "events.csv";
    std::string state_out = "state.csv";
};

int run_simulate(const SimulateArgs& a) {
    if (a.params_path.empty() && a.benchmark.empty())
        throw CliError(kExitUsage, "simulate: need --params or --benchmark");

    if (a.benchmark == "powerlaw") {
        const auto b = benchmark_powerlaw();
        const auto state = msdhawkes::simulate_state(a.state_rate, b.d_x, a.horizon, a.seed);
        const auto events = msdhawkes::simulate_powerlaw(b.kernel, b.nu, b.theta, state, a.seed);
        msdhawkes::write_events_csv(a.events_out, events);
        msdhawkes::write_state_csv(a.state_out, state);
        log_line("simulated " + std::to_string(events.size()) + " events (power-law kernel)");
        return kExitOk;
    }

    msdhawkes::HawkesParams params;
    if (a.benchmark == "dn1")
        params = benchmark_dn1();
    else if (a.benchmark == "dn3")
        params = benchmark_dn3();
    else if (!a.benchmark.empty())
        throw CliError(kExitUsage, "unknown --benchmark '" + a.benchmark + "'");
    else
        params = load_params(a.params_path);

    const auto state = params.shape.d_x > 0
                           ? msdhawkes::simulate_state(a.state_rate, params.shape.d_x, a.horizon, a.seed)
                           : msdhawkes::StateTrajectory::constant(a.horizon, 0);
    const auto events = msdhawkes::simulate_msd(params, state, a.seed);
    msdhawkes::write_events_csv(a.events_out, events);
    if (params.shape.d_x > 0) msdhawkes::write_state_csv(a.state_out, state);
    log_line("simulated " + std::to_string(events.size()) + " events over T = " + fmt(a.horizon));
    return kExitOk;
}

struct FitArgs {
    std::string events_path;
    std::string state_path;
    int d_n = 1;
    int starts = 12;
    std::uint64_t seed = 1;
    int max_sweeps = 500;
    std::string out = "fit.json";
    std::string params_csv;
};

void write_params_csv(const std::string& path, const msdhawkes::HawkesParams& p) {
    auto out = open_out(path);
    out << "parameter,value\n";
    const auto& s = p.shape;
    for (int e = 0; e < s.d_e; ++e) out << "nu_" << (e + 1) << "," << fmt(p.nu[e]) << "\n";
    for (int e = 0; e < s.d_e; ++e)
        for (int ep = 0; ep < s.d_e; ++ep)
            for (int n = 0; n < s.d_n; ++n)
                out << "alpha_" << (e + 1) << (ep + 1) << "_" << (n + 1) << ","
                    << fmt(p.a(e, ep, n)) << "\n";
    for (int e = 0; e < s.d_e; ++e)
        for (int ep = 0; ep < s.d_e; ++ep)
            for (int n = 0; n < s.d_n; ++n)
                out << "beta_" << (e + 1) << (ep + 1) << "_" << (n + 1) << ","
                    << fmt(p.b(e, ep, n)) << "\n";
    for (int e = 0; e < s.d_e; ++e)
        for (int j = 0; j < s.d_x; ++j)
            out << "theta_" << (e + 1) << "_" << (j + 1) << "," << fmt(p.th(e, j)) << "\n";
}

int run_fit(const FitArgs& a, bool em) {
    const auto events = load_event_file(a.events_path);
    const auto state = load_state_file(a.state_path, events.horizon);
    msdhawkes::ModelShape shape{0, a.d_n, state.d_x()};
    shape.d_e = events.types.empty() ? 1 : 1 + *std::max_element(events.types.begin(), events.types.end());
    try {
        events.validate(shape.d_e);
    } catch (const std::exception& ex) {
        throw CliError(kExitValidation, ex.what());
    }

    msdhawkes::FitResult fit;
    if (em) {
        msdhawkes::EmOptions opt;
        opt.rng_seed = a.seed;
        opt.max_sweeps = a.max_sweeps;
        fit = msdhawkes::fit_em(events, state, shape, opt);
    } else {
        msdhawkes::MleOptions opt;
        opt.rng_seed = a.seed;
        opt.n_starts = a.starts;
        fit = msdhawkes::fit_mle(events, state, shape, opt);
    }
    for (const auto& w : fit.warnings) log_line("warning: " + w);
    log_line("log-likelihood " + fmt(fit.log_likelihood) + ", AIC " + fmt(fit.aic));
    write_json_file(a.out, fit_to_json(fit));
    if (!a.params_csv.empty()) write_params_csv(a.params_csv, fit.params);
    return kExitOk;
}

struct SelectArgs {
    std::string events_path;
    std::string state_path;
    std::string dn_spec = "1..5";
    std::string cov_sets = "all";
    int starts = 12;
    std::uint64_t seed = 1;
    int jobs = 0;
    std::string out;
};

int run_select(const SelectArgs& a) {
    const auto events = load_event_file(a.events_path);
    const auto state = load_state_file(a.state_path, events.horizon);

    std::vector<msdhawkes::ModelCandidate> grid;
    for (int d_n : parse_dn_list(a.dn_spec))
        for (auto c : covariate_sets(a.cov_sets, d_n)) grid.push_back(c);

    msdhawkes::MleOptions opt;
    opt.rng_seed = a.seed;
    opt.n_starts = a.starts;
    const int jobs = a.jobs > 0 ? a.jobs : static_cast<int>(std::thread::hardware_concurrency());
    const auto result = msdhawkes::select_model(events, state, grid, opt, jobs);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!a.out.empty()) {
        file = open_out(a.out);
        os = &file;
    }
    *os << "d_n,covariates,n_params,log_likelihood,aic,selected,error\n";
    for (std::size_t i = 0; i < result.table.size(); ++i) {
        const auto& entry = result.table[i];
        std::string cov = "all";
        if (!entry.candidate.use_all_covariates) {
            cov.clear();
            for (std::size_t k = 0; k < entry.candidate.covariates.size(); ++k)
                cov += (k ? "|" : "") + std::to_string(entry.candidate.covariates[k]);
            if (cov.empty()) cov = "none";
        }
        *os << entry.candidate.d_n << "," << cov << ",";
        if (entry.failed)
            *os << ",,," << 0 << "," << entry.error << "\n";
        else
            *os << entry.fit.n_params << "," << fmt(entry.fit.log_likelihood) << ","
                << fmt(entry.fit.aic) << "," << (i == result.best ? 1 : 0) << ",\n";
    }
    return kExitOk;
}

struct ResidualArgs {
    std::string events_path;
    std::string state_path;
    std::string params_path;
    double level = 0.05;
    std::string out;
};

int run_residuals(const ResidualArgs& a) {
    const auto events = load_event_file(a.events_path);
    const auto state = load_state_file(a.state_path, events.horizon);
    const auto params = load_params(a.params_path);
    const auto series = msdhawkes::residuals(params, events, state, a.level);

    if (!a.out.empty()) {
        auto out = open_out(a.out);
        out << "coordinate,residual\n";
        for (std::size_t e = 0; e < series.residuals.size(); ++e)
            for (double r : series.residuals[e]) out << (e + 1) << "," << fmt(r) << "\n";
    }
    std::cout << "coordinate,n,ks_statistic,p_value,pass,low_power\n";
    for (std::size_t e = 0; e < series.ks.size(); ++e)
        std::cout << (e + 1) << "," << series.residuals[e].size() << ","
                  << fmt(series.ks[e].statistic) << "," << fmt(series.ks[e].p_value) << ","
                  << (series.pass[e] ? 1 : 0) << "," << (series.low_power[e] ? 1 : 0) << "\n";
    return kExitOk;
}

struct EndogeneityArgs {
    std::string params_path;
    int grid = 21;
    int vary = 0;
    std::string at;  // full state vector; entry at `vary` ignored
    std::string out;
};

int run_endogeneity(const EndogeneityArgs& a) {
    const auto params = load_params(a.params_path);
    const int d_x = params.shape.d_x;
    std::vector<double> x(static_cast<std::size_t>(std::max(d_x, 1)), 0.0);
    if (!a.at.empty()) {
        const auto fixed = parse_double_list(a.at);
        if (static_cast<int>(fixed.size()) != d_x)
            throw CliError(kExitUsage, "--at needs exactly d_x values");
        x = fixed;
    }
    if (a.vary < 0 || (d_x > 0 && a.vary >= d_x))
        throw CliError(kExitUsage, "--vary out of range");

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!a.out.empty()) {
        file = open_out(a.out);
        os = &file;
    }
    *os << "x_" << (a.vary + 1) << ",spectral_radius,baseline_radius\n";
    const int n = d_x == 0 ? 1 : std::max(a.grid, 2);
    for (int i = 0; i < n; ++i) {
        if (d_x > 0) x[a.vary] = -1.0 + 2.0 * i / (n - 1);
        const auto report = msdhawkes::endogeneity(params, d_x == 0 ? std::vector<double>{} : x);
        *os << fmt(d_x == 0 ? 0.0 : x[a.vary]) << "," << fmt(report.spectral_radius) << ","
            << fmt(report.baseline_radius) << "\n";
    }
    return kExitOk;
}

struct PredictArgs {
    std::string events_path;
    std::string state_path;
    std::string params_path;
    int imbalance_index = -1;
};

int run_predict(const PredictArgs& a) {
    const auto events = load_event_file(a.events_path);
    const auto state = load_state_file(a.state_path, events.horizon);
    const auto params = load_params(a.params_path);
    const auto outcome = msdhawkes::predict_next_type(params, events, state, a.imbalance_index);
    std::cout << "method,accuracy,n_events\n";
    std::cout << "model," << fmt(outcome.model_accuracy) << "," << outcome.n_events << "\n";
    std::cout << "last," << fmt(outcome.last_accuracy) << "," << outcome.n_events << "\n";
    if (outcome.has_imbalance)
        std::cout << "imbalance," << fmt(outcome.imbalance_accuracy) << "," << outcome.n_events
                  << "\n";
    return kExitOk;
}

struct ReplicateArgs {
    std::string protocol = "recovery";
    int replicates = 30;
    double horizon = 0.0;  // 0 = protocol default
    int starts = 12;
    std::uint64_t seed = 1;
    int jobs = 0;
    std::string out;
};

int run_replicate(const ReplicateArgs& a) {
    const int jobs = a.jobs > 0 ? a.jobs : static_cast<int>(std::thread::hardware_concurrency());
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!a.out.empty()) {
        file = open_out(a.out);
        os = &file;
    }

    if (a.protocol == "recovery") {
        const double T = a.horizon > 0.0 ? a.horizon : 1000.0;
        const auto truth = benchmark_dn1();
        std::vector<msdhawkes::HawkesParams> fits(static_cast<std::size_t>(a.replicates));
        parallel_for(a.replicates, jobs, [&](int r) {
            const std::uint64_t seed = a.seed + 1000003ULL * static_cast<std::uint64_t>(r);
            const auto state = msdhawkes::simulate_state(1.0, truth.shape.d_x, T, seed);
            const auto events = msdhawkes::simulate_msd(truth, state, seed + 1);
            msdhawkes::MleOptions opt;
            opt.rng_seed = seed + 2;
            opt.n_starts = a.starts;
            fits[static_cast<std::size_t>(r)] =
                msdhawkes::fit_mle(events, state, truth.shape, opt).params;
            log_line("replicate " + std::to_string(r + 1) + "/" + std::to_string(a.replicates) +
                     " done (" + std::to_string(events.size()) + " events)");
        });

        // One row per parameter: truth, replicate mean, replicate std.
        auto flat = [](const msdhawkes::HawkesParams& p) {
            std::vector<double> v = p.nu;
            v.insert(v.end(), p.alpha.begin(), p.alpha.end());
            v.insert(v.end(), p.beta.begin(), p.beta.end());
            v.insert(v.end(), p.theta.begin(), p.theta.end());
            return v;
        };
        std::vector<std::string> names;
        const auto& s = truth.shape;
        for (int e = 0; e < s.d_e; ++e) names.push_back("nu_" + std::to_string(e + 1));
        for (const char* block : {"alpha", "beta"})
            for (int e = 0; e < s.d_e; ++e)
                for (int ep = 0; ep < s.d_e; ++ep)
                    for (int n = 0; n < s.d_n; ++n)
                        names.push_back(std::string(block) + "_" + std::to_string(e + 1) +
                                        std::to_string(ep + 1) + "_" + std::to_string(n + 1));
        for (int e = 0; e < s.d_e; ++e)
            for (int j = 0; j < s.d_x; ++j)
                names.push_back("theta_" + std::to_string(e + 1) + "_" + std::to_string(j + 1));

        const auto truth_flat = flat(truth);
        *os << "parameter,truth,mean,std\n";
        for (std::size_t k = 0; k < truth_flat.size(); ++k) {
            double mean = 0.0;
            for (const auto& f : fits) mean += flat(f)[k];
            mean /= fits.size();
            double var = 0.0;
            for (const auto& f : fits) var += (flat(f)[k] - mean) * (flat(f)[k] - mean);
            const double sd = fits.size() > 1 ? std::sqrt(var / (fits.size() - 1)) : 0.0;
            *os << names[k] << "," << fmt(truth_flat[k]) << "," << fmt(mean) << "," << fmt(sd)
                << "\n";
        }
        return kExitOk;
    }

    if (a.protocol == "dn-select" || a.protocol == "powerlaw-select") {
        const bool powerlaw = a.protocol == "powerlaw-select";
        const double T = a.horizon > 0.0 ? a.horizon : (powerlaw ? 1000.0 : 5000.0);
        std::vector<int> selected(static_cast<std::size_t>(a.replicates), 0);
        parallel_for(a.replicates, jobs, [&](int r) {
            const std::uint64_t seed = a.seed + 1000003ULL * static_cast<std::uint64_t>(r);
            msdhawkes::StateTrajectory state;
            msdhawkes::EventStream events;
            if (powerlaw) {
                const auto b = benchmark_powerlaw();
                state = msdhawkes::simulate_state(1.0, b.d_x, T, seed);
                events = msdhawkes::simulate_powerlaw(b.kernel, b.nu, b.theta, state, seed + 1);
            } else {
                const auto truth = benchmark_dn3();
                state = msdhawkes::simulate_state(1.0, truth.shape.d_x, T, seed);
                events = msdhawkes::simulate_msd(truth, state, seed + 1);
            }
            std::vector<msdhawkes::ModelCandidate> grid;
            for (int d_n = 1; d_n <= 5; ++d_n) grid.push_back({d_n, {}, true});
            msdhawkes::MleOptions opt;
            opt.rng_seed = seed + 2;
            opt.n_starts = a.starts;
            const auto result = msdhawkes::select_model(events, state, grid, opt, 1);
            selected[static_cast<std::size_t>(r)] =
                result.table[result.best].candidate.d_n;
            log_line("replicate " + std::to_string(r + 1) + "/" + std::to_string(a.replicates) +
                     ": selected d_n = " + std::to_string(selected[static_cast<std::size_t>(r)]));
        });
        std::map<int, int> counts;
        for (int d : selected) ++counts[d];
        *os << "d_n,count\n";
        for (const auto& [d, c] : counts) *os << d << "," << c << "\n";
        return kExitOk;
    }

    throw CliError(kExitUsage, "unknown --protocol '" + a.protocol +
                                   "' (expected recovery, dn-select, powerlaw-select)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "msdHawkes: simulation, estimation, and diagnostics for state-dependent "
        "multivariate Hawkes processes.\n"
        "Exit codes: 0 ok, 2 usage, 3 file I/O, 4 validation, 5 internal error."};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value config file; flags override file values");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Simulate a synthetic event/state sample");
    c_sim->add_option("--params", sim.params_path, "Parameter JSON (bare params or fit output)");
    c_sim->add_option("--benchmark", sim.benchmark, "Built-in parameter set: dn1, dn3, powerlaw");
    c_sim->add_option("--T", sim.horizon, "Horizon in seconds")->check(CLI::PositiveNumber);
    c_sim->add_option("--state-rate", sim.state_rate, "State breakpoint Poisson rate");
    c_sim->add_option("--seed", sim.seed, "RNG seed");
    c_sim->add_option("--events-out", sim.events_out, "Output event CSV");
    c_sim->add_option("--state-out", sim.state_out, "Output state CSV");

    FitArgs fit;
    auto* c_fit = app.add_subcommand("fit", "Maximum-likelihood fit (multi-start)");
    auto* c_em = app.add_subcommand("fit-em", "Expectation-maximization fit");
    for (auto* c : {c_fit, c_em}) {
        c->add_option("--events", fit.events_path, "Event CSV")->required();
        c->add_option("--state", fit.state_path, "State CSV (omit for no covariates)");
        c->add_option("--dn", fit.d_n, "Exponential terms per kernel")->check(CLI::PositiveNumber);
        c->add_option("--seed", fit.seed, "RNG seed");
        c->add_option("--out", fit.out, "Output fit JSON");
        c->add_option("--params-csv", fit.params_csv, "Optional long-format parameter CSV");
    }
    c_fit->add_option("--starts", fit.starts, "Number of random starts");
    c_em->add_option("--max-sweeps", fit.max_sweeps, "EM sweep cap");

    SelectArgs sel;
    auto* c_sel = app.add_subcommand("select", "AIC model selection over kernel orders");
    c_sel->add_option("--events", sel.events_path, "Event CSV")->required();
    c_sel->add_option("--state", sel.state_path, "State CSV");
    c_sel->add_option("--dn", sel.dn_spec, "Kernel orders, e.g. 1..5 or 1,2,4");
    c_sel->add_option("--covariate-sets", sel.cov_sets,
                      "Semicolon-separated covariate index lists, or 'all'");
    c_sel->add_option("--starts", sel.starts, "Random starts per candidate");
    c_sel->add_option("--seed", sel.seed, "RNG seed");
    c_sel->add_option("--jobs", sel.jobs, "Parallel candidates (0 = hardware)");
    c_sel->add_option("--out", sel.out, "Output CSV (default stdout)");

    ResidualArgs res;
    auto* c_res = app.add_subcommand("residuals", "Time-change residuals and KS verdicts");
    c_res->add_option("--events", res.events_path, "Event CSV")->required();
    c_res->add_option("--state", res.state_path, "State CSV");
    c_res->add_option("--params", res.params_path, "Parameter JSON")->required();
    c_res->add_option("--level", res.level, "KS test level");
    c_res->add_option("--out", res.out, "Residual CSV (verdicts go to stdout)");

    EndogeneityArgs endo;
    auto* c_endo = app.add_subcommand("endogeneity", "Spectral-radius grid over a covariate");
    c_endo->add_option("--params", endo.params_path, "Parameter JSON")->required();
    c_endo->add_option("--grid", endo.grid, "Grid points over [-1, 1]");
    c_endo->add_option("--vary", endo.vary, "Covariate index to vary");
    c_endo->add_option("--at", endo.at, "Fixed state vector (comma list, d_x values)");
    c_endo->add_option("--out", endo.out, "Output CSV (default stdout)");

    PredictArgs pred;
    auto* c_pred = app.add_subcommand("predict", "Next-event-type prediction benchmark");
    c_pred->add_option("--events", pred.events_path, "Event CSV")->required();
    c_pred->add_option("--state", pred.state_path, "State CSV");
    c_pred->add_option("--params", pred.params_path, "Parameter JSON")->required();
    c_pred->add_option("--imbalance-index", pred.imbalance_index,
                       "Covariate index of the imbalance (-1 disables the benchmark)");

    ReplicateArgs rep;
    auto* c_rep = app.add_subcommand("replicate", "Batch simulation/estimation experiments");
    c_rep->add_option("--protocol", rep.protocol, "recovery, dn-select, or powerlaw-select");
    c_rep->add_option("--replicates", rep.replicates, "Replicate count")->check(CLI::PositiveNumber);
    c_rep->add_option("--T", rep.horizon, "Horizon override (0 = protocol default)");
    c_rep->add_option("--starts", rep.starts, "Random starts per fit");
    c_rep->add_option("--seed", rep.seed, "Base RNG seed");
    c_rep->add_option("--jobs", rep.jobs, "Parallel replicates (0 = hardware)");
    c_rep->add_option("--out", rep.out, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (c_sim->parsed()) return run_simulate(sim);
        if (c_fit->parsed()) return run_fit(fit, false);
        if (c_em->parsed()) return run_fit(fit, true);
        if (c_sel->parsed()) return run_select(sel);
        if (c_res->parsed()) return run_residuals(res);
        if (c_endo->parsed()) return run_endogeneity(endo);
        if (c_pred->parsed()) return run_predict(pred);
        if (c_rep->parsed()) return run_replicate(rep);
        std::cerr << "{\"error\":\"no subcommand\"}\n";
        return kExitUsage;
    } catch (const CliError& ex) {
        std::cerr << "{\"error\":" << json(std::string(ex.what())).dump()
                  << ",\"code\":" << ex.code << "}\n";
        return ex.code;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "{\"error\":" << json(std::string(ex.what())).dump()
                  << ",\"code\":" << kExitValidation << "}\n";
        return kExitValidation;
    } catch (const std::exception& ex) {
        std::cerr << "{\"error\":" << json(std::string(ex.what())).dump()
                  << ",\"code\":" << kExitInternal << "}\n";
        return kExitInternal;
    }
}
