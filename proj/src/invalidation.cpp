#include "swafdi/invalidation.hpp"

#include <fstream>

#include "builder_util.hpp"

namespace swafdi {

using milp::Relation;
using milp::Term;

const char* to_string(InvalidationStatus status) {
    switch (status) {
        case InvalidationStatus::Invalidated: return "INVALIDATED";
        case InvalidationStatus::NotInvalidated: return "NOT_INVALIDATED";
        case InvalidationStatus::Unresolved: return "UNRESOLVED";
    }
    return "?";
}

namespace {

std::string at(const char* base, int t) { return std::string(base) + "_" + std::to_string(t); }

std::string at(const char* base, int i, int t) {
    return std::string(base) + "_" + std::to_string(i + 1) + "_" + std::to_string(t);
}

}  // namespace

InvalidationInstance build_invalidation(const SwaModel& model, const Trajectory& window,
                                        const BuildOptions& options) {
    require_valid(model);
    if (window.empty()) throw ModelError("invalidation window is empty");
    if (const auto problems = validate_trajectory(model, window); !problems.empty())
        throw ModelError("trajectory does not fit the model: " + problems.front());

    using detail::slack_bounds;
    const int N = window.length();
    const int m = model.num_modes();
    const auto& sets = model.sets;
    const StateBox box = state_box(model);

    InvalidationInstance inst;
    inst.horizon = N;
    auto& prob = inst.problem;
    auto input = [&](int t) {
        return model.n_u > 0 ? window.inputs[static_cast<std::size_t>(t)] : Eigen::VectorXd::Zero(0);
    };

    for (int t = 0; t < N; ++t) {
        inst.x.push_back(detail::add_vector(prob, at("x", t), box.lower, box.upper));
        detail::add_polytope_rows(prob, sets, inst.x.back(), at("X", t));
        inst.eta.push_back(detail::add_vector(prob, at("eta", t), -sets.eps_eta, sets.eps_eta));
        std::vector<int> nu(static_cast<std::size_t>(model.n), -1);
        if (t < N - 1)
            for (int k = 0; k < model.n; ++k)
                if (sets.eps_nu[k] > 0.0)
                    nu[static_cast<std::size_t>(k)] =
                        prob.add_variable(at("nu", k, t), -sets.eps_nu[k], sets.eps_nu[k]);
        inst.nu.push_back(std::move(nu));

        std::vector<int> a;
        std::vector<Term> one;
        for (int i = 0; i < m; ++i) {
            a.push_back(prob.add_binary(at("a", i, t)));
            one.push_back({a.back(), 1.0});
            if (m == 1) prob.set_bounds(a.back(), 1.0, 1.0);
        }
        prob.add_constraint(std::move(one), Relation::Equal, 1.0, at("one", t));
        inst.a.push_back(std::move(a));
    }

    auto pin = [&](int var, double lo, double hi) {
        if (m == 1) lo = hi = 0.0;
        prob.set_bounds(var, lo, hi);
    };

    // State recursion x_{t+1} - A_i x_t - nu_t - s = B_i u_t + f_i.
    for (int t = 0; t + 1 < N; ++t) {
        const Eigen::VectorXd u = input(t);
        std::vector<std::vector<int>> s_t;
        for (int i = 0; i < m; ++i) {
            const Mode& md = model.modes[static_cast<std::size_t>(i)];
            const Eigen::VectorXd drift = (model.n_u > 0 ? Eigen::VectorXd(md.B * u) : Eigen::VectorXd::Zero(model.n)) + md.f;
            const auto [ax_lo, ax_hi] = detail::interval_product(md.A, box.lower, box.upper);
            std::vector<int> s_i;
            for (int k = 0; k < model.n; ++k) {
                const auto [lo, hi] = slack_bounds(box.lower[k] - ax_hi[k] - drift[k] - sets.eps_nu[k],
                                                   box.upper[k] - ax_lo[k] - drift[k] + sets.eps_nu[k]);
                const int s = prob.add_variable(at("s", i, t) + "_" + std::to_string(k + 1), lo, hi);
                pin(s, lo, hi);
                std::vector<Term> terms{{inst.x[static_cast<std::size_t>(t + 1)][static_cast<std::size_t>(k)], 1.0}};
                detail::append_row(terms, md.A, k, inst.x[static_cast<std::size_t>(t)], -1.0);
                if (const int v = inst.nu[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)]; v >= 0)
                    terms.push_back({v, -1.0});
                terms.push_back({s, -1.0});
                prob.add_constraint(std::move(terms), Relation::Equal, drift[k], at("dyn", i, t));
                if (m > 1) prob.add_sos1({inst.a[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)], s});
                s_i.push_back(s);
            }
            s_t.push_back(std::move(s_i));
        }
        inst.s.push_back(std::move(s_t));

        if (options.aggregate_rows && m > 1 && detail::shares_dynamics(model)) {
            const Mode& md = model.modes.front();
            const Eigen::VectorXd bu = model.n_u > 0 ? Eigen::VectorXd(md.B * u) : Eigen::VectorXd::Zero(model.n);
            for (int k = 0; k < model.n; ++k) {
                std::vector<Term> terms{{inst.x[static_cast<std::size_t>(t + 1)][static_cast<std::size_t>(k)], 1.0}};
                detail::append_row(terms, md.A, k, inst.x[static_cast<std::size_t>(t)], -1.0);
                if (const int v = inst.nu[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)]; v >= 0)
                    terms.push_back({v, -1.0});
                for (int i = 0; i < m; ++i) {
                    const double fi = model.modes[static_cast<std::size_t>(i)].f[k];
                    if (fi != 0.0) terms.push_back({inst.a[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)], -fi});
                }
                prob.add_constraint(std::move(terms), Relation::Equal, bu[k], at("dynhull", t));
            }
        }
    }

    // Output equation C_i x_t + eta_t + r = y_t - D_i u_t - g_i.
    for (int t = 0; t < N; ++t) {
        const Eigen::VectorXd u = input(t);
        const Eigen::VectorXd& y = window.outputs[static_cast<std::size_t>(t)];
        std::vector<std::vector<int>> r_t;
        for (int i = 0; i < m; ++i) {
            const Mode& md = model.modes[static_cast<std::size_t>(i)];
            const Eigen::VectorXd target = y - md.g - (model.n_u > 0 ? Eigen::VectorXd(md.D * u) : Eigen::VectorXd::Zero(model.n_y));
            const auto [cx_lo, cx_hi] = detail::interval_product(md.C, box.lower, box.upper);
            std::vector<int> r_i;
            for (int l = 0; l < model.n_y; ++l) {
                const auto [lo, hi] = slack_bounds(target[l] - cx_hi[l] - sets.eps_eta[l],
                                                   target[l] - cx_lo[l] + sets.eps_eta[l]);
                const int r = prob.add_variable(at("r", i, t) + "_" + std::to_string(l + 1), lo, hi);
                pin(r, lo, hi);
                std::vector<Term> terms;
                detail::append_row(terms, md.C, l, inst.x[static_cast<std::size_t>(t)], 1.0);
                terms.push_back({inst.eta[static_cast<std::size_t>(t)][static_cast<std::size_t>(l)], 1.0});
                terms.push_back({r, 1.0});
                prob.add_constraint(std::move(terms), Relation::Equal, target[l], at("out", i, t));
                if (m > 1) prob.add_sos1({inst.a[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)], r});
                r_i.push_back(r);
            }
            r_t.push_back(std::move(r_i));
        }
        inst.r.push_back(std::move(r_t));

        if (options.aggregate_rows && m > 1 && detail::shares_outputs(model)) {
            const Mode& md = model.modes.front();
            const Eigen::VectorXd yd = y - (model.n_u > 0 ? Eigen::VectorXd(md.D * u) : Eigen::VectorXd::Zero(model.n_y));
            for (int l = 0; l < model.n_y; ++l) {
                std::vector<Term> terms;
                detail::append_row(terms, md.C, l, inst.x[static_cast<std::size_t>(t)], 1.0);
                terms.push_back({inst.eta[static_cast<std::size_t>(t)][static_cast<std::size_t>(l)], 1.0});
                for (int i = 0; i < m; ++i) {
                    const double gi = model.modes[static_cast<std::size_t>(i)].g[l];
                    if (gi != 0.0) terms.push_back({inst.a[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)], gi});
                }
                prob.add_constraint(std::move(terms), Relation::Equal, yd[l], at("outhull", t));
            }
        }
    }
    return inst;
}

InvalidationWitness extract_witness(const InvalidationInstance& inst, const std::vector<double>& values) {
    InvalidationWitness w;
    auto read = [&](const std::vector<int>& ids) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(ids.size()));
        for (std::size_t k = 0; k < ids.size(); ++k) v[static_cast<Eigen::Index>(k)] = ids[k] >= 0 ? values[static_cast<std::size_t>(ids[k])] : 0.0;
        return v;
    };
    for (int t = 0; t < inst.horizon; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        w.states.push_back(read(inst.x[ts]));
        w.eta.push_back(read(inst.eta[ts]));
        w.nu.push_back(read(inst.nu[ts]));
        int best = 0;
        for (std::size_t i = 1; i < inst.a[ts].size(); ++i)
            if (values[static_cast<std::size_t>(inst.a[ts][i])] > values[static_cast<std::size_t>(inst.a[ts][best])])
                best = static_cast<int>(i);
        w.modes.push_back(best);
    }
    return w;
}

void dump_lp(const milp::MilpProblem& problem, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    milp::write_lp(problem, out);
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

InvalidationResult check_invalidation(const SwaModel& model, const Trajectory& window, const CheckOptions& options) {
    const InvalidationInstance inst = build_invalidation(model, window, options.build);
    if (!options.dump_lp_path.empty()) dump_lp(inst.problem, options.dump_lp_path);

    milp::SolveOptions so;
    so.encoding = options.encoding;
    so.time_limit_seconds = options.time_limit_seconds;
    const milp::SolveOutcome out = milp::solve(inst.problem, so);

    InvalidationResult res;
    res.solver_status = out.status;
    res.stats = out.stats;
    res.variables = inst.problem.num_variables();
    res.constraints = inst.problem.num_constraints();
    if (out.status == milp::SolveStatus::Infeasible) {
        res.status = InvalidationStatus::Invalidated;
    } else if (out.has_solution()) {
        res.status = InvalidationStatus::NotInvalidated;
        res.witness = extract_witness(inst, out.witness);
    }
    return res;
}

}  // namespace swafdi
