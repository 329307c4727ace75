// Command-line front end: swa-fdi <subcommand> [options]. JSON goes to stdout,
// diagnostics to stderr. Exit codes: 0 ok, 2 usage, 3 domain verdict, 4 solver failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "swafdi/discretize.hpp"
#include "swafdi/distinguish.hpp"
#include "swafdi/hvac.hpp"
#include "swafdi/indices.hpp"
#include "swafdi/invalidation.hpp"
#include "swafdi/io.hpp"
#include "swafdi/runtime.hpp"
#include "swafdi/simulate.hpp"

namespace {

using nlohmann::json;
using namespace swafdi;

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kVerdict = 3;
constexpr int kSolver = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double time_limit_from_env() {
    const char* raw = std::getenv("SWA_FDI_TIME_LIMIT_SECS");
    if (!raw || !*raw) return 300.0;
    char* end = nullptr;
    const double v = std::strtod(raw, &end);
    if (*end != '\0' || !(v > 0.0)) throw UsageError("SWA_FDI_TIME_LIMIT_SECS must be a positive number");
    return v;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

json vec(const Eigen::VectorXd& v) { return vector_to_json(v); }

json series(const std::vector<Eigen::VectorXd>& xs) {
    json out = json::array();
    for (const auto& x : xs) out.push_back(vec(x));
    return out;
}

json one_based(const std::vector<int>& modes) {
    json out = json::array();
    for (int m : modes) out.push_back(m + 1);
    return out;
}

json stats(const milp::SolveStats& s) {
    return {{"nodes", s.nodes}, {"lp_iterations", s.lp_iterations}, {"seconds", s.wall_seconds}};
}

// Options shared by the solving subcommands.
struct SolveFlags {
    std::string encoding = "sos1";
    std::string dump_lp;
    bool no_aggregate = false;

    void attach(CLI::App* app) {
        app->add_option("--encoding", encoding, "SOS-1 branching (sos1) or big-M rows (bigm)")
            ->check(CLI::IsMember({"sos1", "bigm"}));
        app->add_option("--dump-lp", dump_lp, "write the built problem in LP format to this path");
        app->add_flag("--no-aggregate", no_aggregate, "omit the implied aggregated mode rows");
    }
    CheckOptions check(double limit) const {
        CheckOptions o;
        o.encoding = milp::parse_encoding(encoding);
        o.time_limit_seconds = limit;
        o.build.aggregate_rows = !no_aggregate;
        o.dump_lp_path = dump_lp;
        return o;
    }
    DistinguishOptions distinguish(double limit) const {
        DistinguishOptions o;
        o.encoding = milp::parse_encoding(encoding);
        o.time_limit_seconds = limit;
        o.build.aggregate_rows = !no_aggregate;
        o.dump_lp_path = dump_lp;
        return o;
    }
};

// ---------------------------------------------------------------- invalidate

struct InvalidateCmd {
    std::string model, data;
    int horizon = 0;
    int start = -1;
    SolveFlags flags;

    void attach(CLI::App* app) {
        app->add_option("--model", model, "model JSON")->required()->check(CLI::ExistingFile);
        app->add_option("--data", data, "trajectory CSV (t,u_*,y_*)")->required()->check(CLI::ExistingFile);
        app->add_option("--horizon", horizon, "window length N (default: whole trajectory)")->check(CLI::PositiveNumber);
        app->add_option("--start", start, "first sample of the window (default: the last N samples)")
            ->check(CLI::NonNegativeNumber);
        flags.attach(app);
    }

    int run(double limit) const {
        const SwaModel m = load_model(model);
        const Trajectory all = load_trajectory(data);
        const int n = horizon > 0 ? horizon : all.length();
        const int s = start >= 0 ? start : all.length() - n;
        if (n > all.length() || s < 0 || s + n > all.length())
            throw UsageError("window [" + std::to_string(s) + ", " + std::to_string(s + n) + ") exceeds the " +
                             std::to_string(all.length()) + " samples in the data");
        const InvalidationResult r = check_invalidation(m, all.window(s, n), flags.check(limit));
        json j{{"status", to_string(r.status)},
               {"solver_status", milp::to_string(r.solver_status)},
               {"encoding", flags.encoding},
               {"start", s},
               {"horizon", n},
               {"variables", r.variables},
               {"constraints", r.constraints},
               {"stats", stats(r.stats)}};
        if (r.witness)
            j["witness"] = {{"modes", one_based(r.witness->modes)},
                            {"states", series(r.witness->states)},
                            {"eta", series(r.witness->eta)},
                            {"nu", series(r.witness->nu)}};
        emit(j);
        if (r.status == InvalidationStatus::Unresolved) return kSolver;
        return r.status == InvalidationStatus::Invalidated ? kVerdict : kOk;
    }
};

// --------------------------------------------------------------- distinguish

json result_json(const DistinguishResult& r, bool witness) {
    json j{{"T", r.T},
           {"status", to_string(r.status)},
           {"solver_status", milp::to_string(r.solver_status)},
           {"delta_max", r.delta_max},
           {"stats", stats(r.stats)}};
    j["delta_bar"] = r.delta_bar ? json(*r.delta_bar) : json(nullptr);
    j["delta_star"] = r.delta_star ? json(*r.delta_star) : json(nullptr);
    if (r.delta_bar) j["delta_bar_optimal"] = r.delta_bar_optimal;
    if (witness && r.witness)
        j["witness"] = {{"inputs", series(r.witness->inputs)},     {"outputs", series(r.witness->outputs)},
                        {"modes_a", one_based(r.witness->modes_a)}, {"modes_b", one_based(r.witness->modes_b)},
                        {"states_a", series(r.witness->states_a)},  {"states_b", series(r.witness->states_b)}};
    return j;
}

struct DistinguishCmd {
    std::string a, b, csv;
    int T = 0;
    bool find = false;
    int t_max = 30;
    double plateau_tol = 0.01;
    int plateau_window = 3;
    bool no_escalate = false;
    bool feasibility_only = false;
    double margin = 0.0;
    bool witness = false;
    SolveFlags flags;

    void attach(CLI::App* app) {
        app->add_option("--model-a", a, "first model JSON")->required()->check(CLI::ExistingFile);
        app->add_option("--model-b", b, "second model JSON")->required()->check(CLI::ExistingFile);
        auto* t = app->add_option("--t", T, "horizon to check")->check(CLI::PositiveNumber);
        auto* f = app->add_flag("--find-min-t", find, "search the smallest distinguishing horizon");
        t->excludes(f);
        app->add_option("--t-max", t_max, "largest horizon searched")->check(CLI::PositiveNumber);
        app->add_option("--plateau-tol", plateau_tol, "relative change of delta* counted as flat")
            ->check(CLI::PositiveNumber);
        app->add_option("--plateau-window", plateau_window, "consecutive flat horizons ending the search")
            ->check(CLI::Range(2, 1000));
        app->add_flag("--no-escalate", no_escalate, "always step the horizon by one");
        app->add_flag("--feasibility-only", feasibility_only, "with --t: decide only, skip the index");
        app->add_option("--max-noise", margin, "with --t: noise scaling that separates the pair, at this margin")
            ->check(CLI::Range(0.0, 1.0));
        app->add_option("--csv", csv, "write T,delta_star rows here");
        app->add_flag("--witness", witness, "include the intersection trajectory in the report");
        flags.attach(app);
    }

    int run(double limit) const {
        const SwaModel ma = load_model(a);
        const SwaModel mb = load_model(b);
        DistinguishOptions opts = flags.distinguish(limit);
        std::vector<DistinguishResult> rows;
        json j{{"model_a", a}, {"model_b", b}, {"delta_max", delta_max(ma, mb)}};
        int code = kOk;
        if (find) {
            SearchOptions so;
            so.T_max = t_max;
            so.plateau_tol = plateau_tol;
            so.plateau_window = plateau_window;
            so.escalate = !no_escalate;
            so.check = opts;
            so.check.dump_lp_path.clear();
            so.on_result = [](const DistinguishResult& r) {
                std::fprintf(stderr, "T=%d %s delta*=%s (%.2fs)\n", r.T, to_string(r.status),
                             r.delta_star ? std::to_string(*r.delta_star).c_str() : "-", r.stats.wall_seconds);
            };
            const TSearchReport rep = find_min_T(ma, mb, so);
            rows = rep.results;
            j["outcome"] = to_string(rep.outcome);
            if (rep.outcome == SearchOutcome::Found) j["T_min"] = rep.T_min;
            if (rep.outcome == SearchOutcome::Plateau) {
                j["plateau_delta_star"] = rep.plateau_delta_star;
                j["plateau_onset"] = rep.plateau_onset;
            }
            j["T_last"] = rep.T_last;
            if (rep.outcome == SearchOutcome::Unresolved) code = kSolver;
            else if (rep.outcome != SearchOutcome::Found) code = kVerdict;
        } else {
            if (T <= 0) throw UsageError("give --t N or --find-min-t");
            opts.minimize = !feasibility_only;
            const DistinguishResult r = check_T(ma, mb, T, opts);
            rows.push_back(r);
            if (r.status == DistinguishStatus::Unresolved) code = kSolver;
            else if (r.status == DistinguishStatus::NotDistinguishable) code = kVerdict;
            if (margin > 0.0 && r.status == DistinguishStatus::NotDistinguishable) {
                try {
                    DistinguishOptions q = opts;
                    q.dump_lp_path.clear();
                    const NoiseScaling ns = max_noise_for_distinguishability(ma, mb, T, margin, q);
                    j["noise_scaling"] = {{"rho", ns.rho},
                                          {"bisection_steps", ns.bisection_steps},
                                          {"verification", to_string(ns.verification.status)},
                                          {"eps_eta_a", vec(ns.a.sets.eps_eta)},
                                          {"eps_nu_a", vec(ns.a.sets.eps_nu)},
                                          {"eps_eta_b", vec(ns.b.sets.eps_eta)},
                                          {"eps_nu_b", vec(ns.b.sets.eps_nu)}};
                } catch (const NotApplicable& e) {
                    j["noise_scaling"] = {{"error", "NOT_APPLICABLE"}, {"reason", e.what()}};
                }
            }
        }
        j["results"] = json::array();
        for (const auto& r : rows) j["results"].push_back(result_json(r, witness));
        if (!csv.empty()) {
            std::ofstream out(csv);
            if (!out) throw IoError("cannot write '" + csv + "'");
            out << "T,delta_star\n";
            for (const auto& r : rows)
                if (r.delta_star) out << r.T << ',' << *r.delta_star << '\n';
        }
        emit(j);
        return code;
    }
};

// ------------------------------------------------------------------- indices

struct IndicesCmd {
    std::string system, out;
    std::vector<std::string> faults;
    int t_max = 20;
    int jobs = 1;
    double plateau_tol = 0.01;
    int plateau_window = 3;
    SolveFlags flags;

    void attach(CLI::App* app) {
        app->add_option("--system", system, "nominal model JSON")->required()->check(CLI::ExistingFile);
        app->add_option("--faults", faults, "fault model JSON files")->required()->check(CLI::ExistingFile);
        app->add_option("--t-max", t_max, "largest horizon searched per pair")->check(CLI::PositiveNumber);
        app->add_option("--jobs", jobs, "pairs solved concurrently")->check(CLI::PositiveNumber);
        app->add_option("--plateau-tol", plateau_tol, "relative change of delta* counted as flat")
            ->check(CLI::PositiveNumber);
        app->add_option("--plateau-window", plateau_window, "consecutive flat horizons ending a search")
            ->check(CLI::Range(2, 1000));
        app->add_option("--out", out, "also write the indices JSON here");
        flags.attach(app);
    }

    int run(double limit) const {
        const SwaModel g = load_model(system);
        std::vector<SwaModel> lib;
        for (const auto& f : faults) lib.push_back(load_model(f));
        IndicesOptions io;
        io.jobs = jobs;
        io.search.T_max = t_max;
        io.search.plateau_tol = plateau_tol;
        io.search.plateau_window = plateau_window;
        io.search.check = flags.distinguish(limit);
        io.search.check.dump_lp_path.clear();
        io.on_entry = [](const IndexEntry& e) {
            std::fprintf(stderr, "pair (%d,%d): %s %s (%.1fs)\n", e.first, e.second, to_string(e.outcome),
                         e.horizon ? std::to_string(*e.horizon).c_str() : "-", e.seconds);
        };
        const FdiIndices idx = compute_indices(g, lib, io);
        if (!out.empty()) save_indices(idx, out);
        std::cerr << format_table(idx);
        emit(indices_to_json(idx));
        for (const auto& e : idx.detection)
            if (e.outcome == SearchOutcome::Unresolved) return kSolver;
        for (const auto& e : idx.isolation)
            if (e.outcome == SearchOutcome::Unresolved) return kSolver;
        return idx.a1 && idx.a2 ? kOk : kVerdict;
    }
};

// ------------------------------------------------------------------ simulate

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ','))
        try {
            out.push_back(std::stoi(cell));
        } catch (const std::exception&) {
            throw UsageError("bad integer '" + cell + "' in list");
        }
    return out;
}

struct SimulateCmd {
    std::string model, fault, out, sidecar, policy = "random";
    int steps = 0;
    int t_star = 0;
    std::uint64_t seed = 0;
    double noise_scale = 1.0;
    std::vector<double> x0;
    bool no_project = false;

    void attach(CLI::App* app) {
        app->add_option("--model", model, "model JSON")->required()->check(CLI::ExistingFile);
        app->add_option("--steps", steps, "number of samples N")->required()->check(CLI::PositiveNumber);
        app->add_option("--seed", seed, "random seed");
        app->add_option("--x0", x0, "initial state (default: centre of the state box)");
        app->add_option("--policy", policy,
                        "mode policy: random, thermostat[:lower:upper] or a comma list of 1-based modes");
        app->add_option("--noise-scale", noise_scale, "noise draws use scale * bound")->check(CLI::NonNegativeNumber);
        app->add_option("--fault", fault, "fault model JSON switched in at --t-star")->check(CLI::ExistingFile);
        app->add_option("--t-star", t_star, "first faulty sample")->check(CLI::NonNegativeNumber);
        app->add_option("--out", out, "trajectory CSV (default: stdout)");
        app->add_option("--sidecar", sidecar, "ground-truth CSV t,mode,faulty,x_*");
        app->add_flag("--no-project", no_project, "fail instead of projecting states back into X");
    }

    ModePolicy mode_policy() const {
        if (policy == "random") return RandomModes{};
        if (policy.rfind("thermostat", 0) == 0) {
            Thermostat th;
            if (policy.size() > 10) {
                double lo = 0, hi = 0;
                if (std::sscanf(policy.c_str() + 10, ":%lf:%lf", &lo, &hi) != 2 || !(lo < hi))
                    throw UsageError("thermostat policy is thermostat:lower:upper");
                th.lower = lo;
                th.upper = hi;
            }
            return th;
        }
        FixedModes fm;
        for (int m : parse_int_list(policy)) fm.sequence.push_back(m - 1);
        return fm;
    }

    int run() const {
        const SwaModel m = load_model(model);
        SimConfig cfg;
        cfg.steps = steps;
        cfg.seed = seed;
        cfg.noise_scale = noise_scale;
        cfg.project = !no_project;
        cfg.mode_policy = mode_policy();
        if (x0.empty()) {
            const StateBox box = state_box(m);
            cfg.initial_state = 0.5 * (box.lower + box.upper);
        } else {
            cfg.initial_state = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
        }
        if (!fault.empty()) cfg.fault = FaultInjection{load_model(fault), t_star};
        const SimResult r = simulate(m, cfg);
        if (out.empty()) {
            write_trajectory_csv(r.data, std::cout);
        } else {
            save_trajectory(r.data, out);
        }
        if (!sidecar.empty()) {
            std::ofstream sc(sidecar);
            if (!sc) throw IoError("cannot write '" + sidecar + "'");
            write_sidecar_csv(r, sc);
        }
        if (!out.empty())
            emit({{"steps", steps}, {"seed", seed}, {"projections", r.projections}, {"out", out},
                  {"t_star", cfg.fault ? json(t_star) : json(nullptr)}});
        return kOk;
    }
};

// ---------------------------------------------------------------- discretize

struct DiscretizeCmd {
    std::string ode, library;
    double ts = 0.0;

    void attach(CLI::App* app) {
        auto* o = app->add_option("--ode", ode, "JSON {\"A\": [[..]], \"b\": [..], \"Ts\": x}")->check(CLI::ExistingFile);
        auto* l = app->add_option("--hvac-library", library, "write the HVAC nominal and fault models into this directory");
        o->excludes(l);
        app->add_option("--ts", ts, "sampling period (overrides Ts in the file)")->check(CLI::PositiveNumber);
    }

    int run() const {
        if (!library.empty()) {
            const hvac::Parameters params;
            std::vector<std::pair<std::string, SwaModel>> files{{"hvac_nominal.json", hvac::nominal_model()}};
            const auto faults = hvac::fault_library(params);
            for (std::size_t i = 0; i < faults.size(); ++i)
                files.emplace_back("hvac_fault" + std::to_string(i + 1) + ".json", faults[i]);
            json written = json::array();
            for (const auto& [name, m] : files) {
                const std::string path = (std::filesystem::path(library) / name).string();
                save_model(m, path);
                written.push_back(path);
            }
            const DiscreteAffine d = zoh(hvac::continuous_model(params, params.flow, params.gpm_on));
            emit({{"written", written}, {"sample_period", hvac::kSamplePeriod},
                  {"zoh_nominal_on", {{"A_d", matrix_to_json(d.A_d)}, {"f_d", vec(d.f_d)}}}});
            return kOk;
        }
        if (ode.empty()) throw UsageError("give --ode FILE or --hvac-library DIR");
        std::ifstream in(ode);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw IoError("cannot parse '" + ode + "': " + e.what());
        }
        AffineOde sys;
        try {
            sys.A_c = matrix_from_json(j.at("A"));
            sys.b_c = j.contains("b") ? vector_from_json(j["b"]) : Eigen::VectorXd::Zero(sys.A_c.rows());
            sys.T_s = ts > 0.0 ? ts : j.at("Ts").get<double>();
        } catch (const json::exception& e) {
            throw IoError(std::string("malformed ODE JSON: ") + e.what());
        }
        const DiscreteAffine d = zoh(sys);
        emit({{"Ts", sys.T_s}, {"A_d", matrix_to_json(d.A_d)}, {"f_d", vec(d.f_d)}});
        return kOk;
    }
};

// ----------------------------------------------------------------------- run

struct RunCmd {
    std::string system, indices, data, truth, log = "verdicts.csv";
    std::vector<std::string> faults;
    bool adaptive = false;
    int jobs = 1;
    SolveFlags flags;

    void attach(CLI::App* app) {
        app->add_option("--system", system, "nominal model JSON")->required()->check(CLI::ExistingFile);
        app->add_option("--faults", faults, "fault model JSON files, in index order")->required()->check(CLI::ExistingFile);
        app->add_option("--indices", indices, "indices JSON from 'indices'")->required()->check(CLI::ExistingFile);
        app->add_option("--data", data, "trajectory CSV")->required()->check(CLI::ExistingFile);
        app->add_flag("--adaptive", adaptive, "isolate on a growing post-detection horizon");
        app->add_option("--truth", truth, "sidecar CSV with a faulty column, for delays only")->check(CLI::ExistingFile);
        app->add_option("--log", log, "verdict log CSV path");
        app->add_option("--jobs", jobs, "fault monitors solved concurrently")->check(CLI::PositiveNumber);
        flags.attach(app);
    }

    int run(double limit) const {
        const SwaModel g = load_model(system);
        std::vector<SwaModel> lib;
        for (const auto& f : faults) lib.push_back(load_model(f));
        const FdiIndices idx = load_indices(indices);
        const Trajectory d = load_trajectory(data);
        std::optional<int> t_star;
        if (!truth.empty()) {
            std::ifstream in(truth);
            const int onset = fault_onset(read_sidecar_faulty(in));
            if (onset >= 0) t_star = onset;
        }
        RuntimeOptions ro;
        ro.mode = adaptive ? IsolationMode::Adaptive : IsolationMode::Plain;
        ro.check = flags.check(limit);
        ro.check.dump_lp_path.clear();
        ro.jobs = jobs;
        const RunLog rl = run_offline(g, lib, d, idx, ro, t_star);
        std::ofstream out(log);
        if (!out) throw IoError("cannot write '" + log + "'");
        write_verdict_csv(rl, out);
        json j = run_summary(rl);
        j["mode"] = adaptive ? "adaptive" : "plain";
        j["log"] = log;
        emit(j);
        return rl.unresolved_steps > 0 ? kSolver : kOk;
    }
};

// --------------------------------------------------------------------- bench

struct BenchCmd {
    std::string model, fault, csv;
    std::string horizons = "12,16,20,24,28,32,36,40";
    int instances = 5;
    std::uint64_t seed = 1;

    void attach(CLI::App* app) {
        app->add_option("--model", model, "model checked by the monitor")->required()->check(CLI::ExistingFile);
        app->add_option("--fault", fault, "model generating the data")->required()->check(CLI::ExistingFile);
        app->add_option("--horizons", horizons, "comma list of horizons");
        app->add_option("--instances", instances, "trajectories per horizon")->check(CLI::Range(5, 100000));
        app->add_option("--seed", seed, "base seed");
        app->add_option("--csv", csv, "per-instance timings CSV");
    }

    int run(double limit) const {
        const SwaModel g = load_model(model);
        const SwaModel f = load_model(fault);
        const auto hs = parse_int_list(horizons);
        json rows = json::array();
        json summary = json::array();
        std::ofstream out;
        if (!csv.empty()) {
            out.open(csv);
            if (!out) throw IoError("cannot write '" + csv + "'");
            out << "horizon,encoding,instance,seconds,status\n";
        }
        bool agree = true;
        int censored = 0;
        const StateBox box = state_box(f);
        for (int h : hs) {
            if (h < 1) throw UsageError("horizons must be positive");
            std::vector<Trajectory> data;
            for (int k = 0; k < instances; ++k) {
                SimConfig cfg;
                cfg.steps = h;
                cfg.seed = seed * 1000003ULL + static_cast<std::uint64_t>(h) * 1009ULL + static_cast<std::uint64_t>(k);
                cfg.initial_state = 0.5 * (box.lower + box.upper);
                data.push_back(simulate(f, cfg).data);
            }
            json entry{{"horizon", h}};
            std::vector<InvalidationStatus> first;
            for (const auto enc : {milp::Encoding::Sos1Branching, milp::Encoding::BigM}) {
                std::vector<double> times;
                for (int k = 0; k < instances; ++k) {
                    CheckOptions co;
                    co.encoding = enc;
                    co.time_limit_seconds = limit;
                    const InvalidationResult r = check_invalidation(g, data[static_cast<std::size_t>(k)], co);
                    times.push_back(r.stats.wall_seconds);
                    // A time-limited run is a censored timing, not a disagreement.
                    if (r.status == InvalidationStatus::Unresolved) ++censored;
                    if (enc == milp::Encoding::Sos1Branching) first.push_back(r.status);
                    else if (const auto other = first[static_cast<std::size_t>(k)];
                             r.status != InvalidationStatus::Unresolved && other != InvalidationStatus::Unresolved &&
                             other != r.status)
                        agree = false;
                    if (out.is_open())
                        out << h << ',' << milp::to_string(enc) << ',' << k << ',' << r.stats.wall_seconds << ','
                            << to_string(r.status) << '\n';
                    std::fprintf(stderr, "h=%d %s #%d %s %.3fs\n", h, milp::to_string(enc), k, to_string(r.status),
                                 r.stats.wall_seconds);
                }
                const double mean = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
                double var = 0.0;
                for (double t : times) var += (t - mean) * (t - mean);
                const double sd = times.size() > 1 ? std::sqrt(var / static_cast<double>(times.size() - 1)) : 0.0;
                entry[milp::to_string(enc)] = {{"mean_seconds", mean}, {"std_seconds", sd}};
            }
            summary.push_back(entry);
        }
        emit({{"instances_per_horizon", instances}, {"seed", seed}, {"statuses_agree", agree},
              {"censored_runs", censored}, {"time_limit_seconds", limit}, {"horizons", summary}});
        return agree ? kOk : kSolver;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Guaranteed fault detection and isolation for switched affine systems"};
    app.require_subcommand(1);
    InvalidateCmd inv;
    DistinguishCmd dis;
    IndicesCmd ind;
    SimulateCmd sim;
    DiscretizeCmd dsc;
    RunCmd run;
    BenchCmd bench;
    inv.attach(app.add_subcommand("invalidate", "check a data window against a model"));
    dis.attach(app.add_subcommand("distinguish", "T-distinguishability and the distinguishability index"));
    ind.attach(app.add_subcommand("indices", "detectability and isolability indices of a fault library"));
    sim.attach(app.add_subcommand("simulate", "generate input-output data"));
    dsc.attach(app.add_subcommand("discretize", "zero-order-hold discretization"));
    run.attach(app.add_subcommand("run", "replay data through the monitor bank"));
    bench.attach(app.add_subcommand("bench", "SOS-1 versus big-M timing on invalidation problems"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    try {
        auto limit = [] { return time_limit_from_env(); };
        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "invalidate") return inv.run(limit());
        if (cmd == "distinguish") return dis.run(limit());
        if (cmd == "indices") return ind.run(limit());
        if (cmd == "simulate") return sim.run();
        if (cmd == "discretize") return dsc.run();
        if (cmd == "run") return run.run(limit());
        if (cmd == "bench") return bench.run(limit());
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const ModelError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const SimulationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const DiscretizeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kSolver;
    }
    return kUsage;
}
