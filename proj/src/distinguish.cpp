#include "swafdi/distinguish.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "builder_util.hpp"

namespace swafdi {

using milp::Relation;
using milp::Term;

const char* to_string(DistinguishStatus status) {
    switch (status) {
        case DistinguishStatus::Distinguishable: return "T_DISTINGUISHABLE";
        case DistinguishStatus::NotDistinguishable: return "NOT_DISTINGUISHABLE";
        case DistinguishStatus::Unresolved: return "UNRESOLVED";
    }
    return "?";
}

const char* to_string(SearchOutcome outcome) {
    switch (outcome) {
        case SearchOutcome::Found: return "FOUND";
        case SearchOutcome::Plateau: return "PLATEAU";
        case SearchOutcome::Exhausted: return "EXHAUSTED";
        case SearchOutcome::Unresolved: return "UNRESOLVED";
    }
    return "?";
}

double delta_max(const SwaModel& a, const SwaModel& b) {
    auto top = [](const Eigen::VectorXd& v) { return v.size() ? v.maxCoeff() : 0.0; };
    const double e = top(a.sets.eps_eta), eb = top(b.sets.eps_eta);
    const double v = top(a.sets.eps_nu), vb = top(b.sets.eps_nu);
    return std::min(std::max(e + eb, v + vb), std::max(e, v) + std::max(eb, vb));
}

namespace {

std::string tagged(const char* base, char side, int i, int t) {
    std::string s(base);
    s += side;
    if (i >= 0) s += "_" + std::to_string(i + 1);
    return s + "_" + std::to_string(t);
}

struct Side {
    const SwaModel& model;
    StateBox box;
    char tag;
    std::vector<std::vector<int>>* x;
    std::vector<std::vector<int>>* eta;
    std::vector<std::vector<int>>* nu;
};

}  // namespace

DistinguishInstance build_distinguish(const SwaModel& a, const SwaModel& b, int T, const DistinguishOptions& options) {
    require_valid(a);
    require_valid(b);
    if (!same_interface(a, b)) throw ModelError("models have different state, input or output dimensions");
    if (T < 1) throw ModelError("horizon must be at least 1");

    DistinguishInstance inst;
    inst.horizon = T;
    inst.modes_a = a.num_modes();
    inst.modes_b = b.num_modes();
    auto& prob = inst.problem;
    const int n = a.n, n_u = a.n_u, n_y = a.n_y;
    const int ma = inst.modes_a, mb = inst.modes_b;
    const bool inputs = n_u > 0;
    const double U = inputs ? std::min(*a.sets.input_bound, *b.sets.input_bound) : 0.0;
    const Eigen::VectorXd u_lo = Eigen::VectorXd::Constant(n_u, -U), u_hi = Eigen::VectorXd::Constant(n_u, U);

    Side sides[2] = {{a, state_box(a), 'a', &inst.x, &inst.eta, &inst.nu},
                     {b, state_box(b), 'b', &inst.x_b, &inst.eta_b, &inst.nu_b}};
    // A noise coordinate gets variables when either model allows noise there.
    std::vector<bool> has_nu(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) has_nu[static_cast<std::size_t>(k)] = a.sets.eps_nu[k] > 0.0 || b.sets.eps_nu[k] > 0.0;

    for (int t = 0; t < T; ++t) {
        inst.u.push_back(inputs ? detail::add_vector(prob, "u_" + std::to_string(t), u_lo, u_hi) : std::vector<int>{});
        for (auto& sd : sides) {
            const auto& sets = sd.model.sets;
            sd.x->push_back(detail::add_vector(prob, tagged("x", sd.tag, -1, t), sd.box.lower, sd.box.upper));
            detail::add_polytope_rows(prob, sets, sd.x->back(), tagged("X", sd.tag, -1, t));
            sd.eta->push_back(detail::add_vector(prob, tagged("eta", sd.tag, -1, t), -sets.eps_eta, sets.eps_eta));
            std::vector<int> nu(static_cast<std::size_t>(n), -1);
            if (t < T - 1)
                for (int k = 0; k < n; ++k)
                    if (has_nu[static_cast<std::size_t>(k)])
                        nu[static_cast<std::size_t>(k)] =
                            prob.add_variable(tagged("nu", sd.tag, k, t), -sets.eps_nu[k], sets.eps_nu[k]);
            sd.nu->push_back(std::move(nu));
        }
        std::vector<int> pair;
        std::vector<Term> one;
        for (int i = 0; i < ma; ++i)
            for (int j = 0; j < mb; ++j) {
                pair.push_back(prob.add_binary("a_" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + "_" +
                                               std::to_string(t)));
                one.push_back({pair.back(), 1.0});
            }
        if (pair.size() == 1) prob.set_bounds(pair.front(), 1.0, 1.0);
        prob.add_constraint(std::move(one), Relation::Equal, 1.0, "one_" + std::to_string(t));
        inst.a.push_back(std::move(pair));
    }

    // Binaries selecting mode i of side s at time t.
    auto selectors = [&](int side, int i, int t) {
        std::vector<int> ids;
        const auto& row = inst.a[static_cast<std::size_t>(t)];
        if (side == 0)
            for (int j = 0; j < mb; ++j) ids.push_back(row[static_cast<std::size_t>(i * mb + j)]);
        else
            for (int j = 0; j < ma; ++j) ids.push_back(row[static_cast<std::size_t>(j * mb + i)]);
        return ids;
    };

    // The state recursion of one side, written with the mode offsets weighted by binaries
    // (aggregated row) or with the slack of one mode.
    auto recursion_terms = [&](const Side& sd, const Mode& md, int t, int k) {
        std::vector<Term> terms{{(*sd.x)[static_cast<std::size_t>(t + 1)][static_cast<std::size_t>(k)], 1.0}};
        detail::append_row(terms, md.A, k, (*sd.x)[static_cast<std::size_t>(t)], -1.0);
        if (inputs) detail::append_row(terms, md.B, k, inst.u[static_cast<std::size_t>(t)], -1.0);
        if (const int v = (*sd.nu)[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)]; v >= 0)
            terms.push_back({v, -1.0});
        return terms;
    };

    for (int t = 0; t + 1 < T; ++t) {
        for (int side = 0; side < 2; ++side) {
            const Side& sd = sides[side];
            const SwaModel& mdl = sd.model;
            const int m = mdl.num_modes();
            for (int i = 0; i < m; ++i) {
                const Mode& md = mdl.modes[static_cast<std::size_t>(i)];
                auto [ax_lo, ax_hi] = detail::interval_product(md.A, sd.box.lower, sd.box.upper);
                if (inputs) {
                    const auto [bu_lo, bu_hi] = detail::interval_product(md.B, u_lo, u_hi);
                    ax_lo += bu_lo;
                    ax_hi += bu_hi;
                }
                const auto sel = selectors(side, i, t);
                for (int k = 0; k < n; ++k) {
                    const double eps = mdl.sets.eps_nu[k];
                    const auto [lo, hi] = detail::slack_bounds(sd.box.lower[k] - ax_hi[k] - md.f[k] - eps,
                                                               sd.box.upper[k] - ax_lo[k] - md.f[k] + eps);
                    const int s = prob.add_variable(tagged("s", sd.tag, i, t) + "_" + std::to_string(k + 1), lo, hi);
                    if (m == 1) prob.set_bounds(s, 0.0, 0.0);
                    auto terms = recursion_terms(sd, md, t, k);
                    terms.push_back({s, -1.0});
                    prob.add_constraint(std::move(terms), Relation::Equal, md.f[k], tagged("dyn", sd.tag, i, t));
                    if (m > 1)
                        for (int sel_var : sel) prob.add_sos1({sel_var, s});
                }
            }
            if (options.build.aggregate_rows && m > 1 && detail::shares_dynamics(mdl)) {
                for (int k = 0; k < n; ++k) {
                    auto terms = recursion_terms(sd, mdl.modes.front(), t, k);
                    for (int i = 0; i < m; ++i) {
                        const double fi = mdl.modes[static_cast<std::size_t>(i)].f[k];
                        if (fi != 0.0)
                            for (int sel_var : selectors(side, i, t)) terms.push_back({sel_var, -fi});
                    }
                    prob.add_constraint(std::move(terms), Relation::Equal, 0.0, tagged("dynhull", sd.tag, -1, t));
                }
            }
        }
    }

    // Output matching C_i x + D_i u + g_i + eta = C_j' x' + D_j' u + g_j' + eta' + r.
    auto output_terms = [&](const Mode& ma_, const Mode& mb_, int t, int l) {
        const auto ts = static_cast<std::size_t>(t);
        std::vector<Term> terms;
        detail::append_row(terms, ma_.C, l, inst.x[ts], 1.0);
        detail::append_row(terms, mb_.C, l, inst.x_b[ts], -1.0);
        if (inputs) {
            const Eigen::MatrixXd dd = ma_.D - mb_.D;
            detail::append_row(terms, dd, l, inst.u[ts], 1.0);
        }
        terms.push_back({inst.eta[ts][static_cast<std::size_t>(l)], 1.0});
        terms.push_back({inst.eta_b[ts][static_cast<std::size_t>(l)], -1.0});
        return terms;
    };
    const bool single_pair = ma == 1 && mb == 1;
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < ma; ++i)
            for (int j = 0; j < mb; ++j) {
                const Mode& gi = a.modes[static_cast<std::size_t>(i)];
                const Mode& hj = b.modes[static_cast<std::size_t>(j)];
                auto [lo1, hi1] = detail::interval_product(gi.C, sides[0].box.lower, sides[0].box.upper);
                const auto [lo2, hi2] = detail::interval_product(-hj.C, sides[1].box.lower, sides[1].box.upper);
                lo1 += lo2;
                hi1 += hi2;
                if (inputs) {
                    const auto [lo3, hi3] = detail::interval_product(gi.D - hj.D, u_lo, u_hi);
                    lo1 += lo3;
                    hi1 += hi3;
                }
                const int sel = inst.a[static_cast<std::size_t>(t)][static_cast<std::size_t>(i * mb + j)];
                for (int l = 0; l < n_y; ++l) {
                    const double off = gi.g[l] - hj.g[l];
                    const double eps = a.sets.eps_eta[l] + b.sets.eps_eta[l];
                    const auto [lo, hi] = detail::slack_bounds(lo1[l] + off - eps, hi1[l] + off + eps);
                    const int r = prob.add_variable("r_" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + "_" +
                                                        std::to_string(t) + "_" + std::to_string(l + 1),
                                                    lo, hi);
                    if (single_pair) prob.set_bounds(r, 0.0, 0.0);
                    auto terms = output_terms(gi, hj, t, l);
                    terms.push_back({r, -1.0});
                    prob.add_constraint(std::move(terms), Relation::Equal, -off, "out_" + std::to_string(t));
                    if (!single_pair) prob.add_sos1({sel, r});
                }
            }
        if (options.build.aggregate_rows && !single_pair && detail::shares_outputs(a) && detail::shares_outputs(b)) {
            for (int l = 0; l < n_y; ++l) {
                auto terms = output_terms(a.modes.front(), b.modes.front(), t, l);
                for (int i = 0; i < ma; ++i)
                    for (int j = 0; j < mb; ++j) {
                        const double off =
                            a.modes[static_cast<std::size_t>(i)].g[l] - b.modes[static_cast<std::size_t>(j)].g[l];
                        if (off != 0.0)
                            terms.push_back({inst.a[static_cast<std::size_t>(t)][static_cast<std::size_t>(i * mb + j)], off});
                    }
                prob.add_constraint(std::move(terms), Relation::Equal, 0.0, "outhull_" + std::to_string(t));
            }
        }
    }

    if (options.minimize) {
        double cap = 0.0;
        for (int l = 0; l < n_y; ++l) cap = std::max(cap, a.sets.eps_eta[l] + b.sets.eps_eta[l]);
        for (int k = 0; k < n; ++k) cap = std::max(cap, a.sets.eps_nu[k] + b.sets.eps_nu[k]);
        inst.delta = prob.add_variable("delta", 0.0, cap);
        auto bound_gap = [&](int p, int q) {
            prob.add_constraint({{p, 1.0}, {q, -1.0}, {inst.delta, -1.0}}, Relation::LessEqual, 0.0, "gap");
            prob.add_constraint({{p, -1.0}, {q, 1.0}, {inst.delta, -1.0}}, Relation::LessEqual, 0.0, "gap");
        };
        for (int t = 0; t < T; ++t) {
            const auto ts = static_cast<std::size_t>(t);
            for (int l = 0; l < n_y; ++l)
                bound_gap(inst.eta[ts][static_cast<std::size_t>(l)], inst.eta_b[ts][static_cast<std::size_t>(l)]);
            for (int k = 0; k < n; ++k)
                if (inst.nu[ts][static_cast<std::size_t>(k)] >= 0)
                    bound_gap(inst.nu[ts][static_cast<std::size_t>(k)], inst.nu_b[ts][static_cast<std::size_t>(k)]);
        }
        prob.set_objective({{inst.delta, 1.0}});
    }
    return inst;
}

namespace {

DistinguishWitness read_witness(const DistinguishInstance& inst, const SwaModel& a, const std::vector<double>& v) {
    auto read = [&](const std::vector<int>& ids) {
        Eigen::VectorXd out(static_cast<Eigen::Index>(ids.size()));
        for (std::size_t k = 0; k < ids.size(); ++k)
            out[static_cast<Eigen::Index>(k)] = ids[k] >= 0 ? v[static_cast<std::size_t>(ids[k])] : 0.0;
        return out;
    };
    DistinguishWitness w;
    for (int t = 0; t < inst.horizon; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        w.inputs.push_back(read(inst.u[ts]));
        w.states_a.push_back(read(inst.x[ts]));
        w.states_b.push_back(read(inst.x_b[ts]));
        w.eta_a.push_back(read(inst.eta[ts]));
        w.eta_b.push_back(read(inst.eta_b[ts]));
        w.nu_a.push_back(read(inst.nu[ts]));
        w.nu_b.push_back(read(inst.nu_b[ts]));
        std::size_t best = 0;
        for (std::size_t p = 1; p < inst.a[ts].size(); ++p)
            if (v[static_cast<std::size_t>(inst.a[ts][p])] > v[static_cast<std::size_t>(inst.a[ts][best])]) best = p;
        const int i = static_cast<int>(best) / inst.modes_b;
        w.modes_a.push_back(i);
        w.modes_b.push_back(static_cast<int>(best) % inst.modes_b);
        const Mode& md = a.modes[static_cast<std::size_t>(i)];
        Eigen::VectorXd y = md.C * w.states_a.back() + md.g + w.eta_a.back();
        if (a.n_u > 0) y += md.D * w.inputs.back();
        w.outputs.push_back(std::move(y));
    }
    return w;
}

}  // namespace

DistinguishResult check_T(const SwaModel& a, const SwaModel& b, int T, const DistinguishOptions& options) {
    const DistinguishInstance inst = build_distinguish(a, b, T, options);
    if (!options.dump_lp_path.empty()) dump_lp(inst.problem, options.dump_lp_path);

    milp::SolveOptions so;
    so.encoding = options.encoding;
    so.time_limit_seconds = options.time_limit_seconds;
    so.known_lower_bound = 0.0;
    const milp::SolveOutcome out = milp::solve(inst.problem, so);

    DistinguishResult res;
    res.T = T;
    res.solver_status = out.status;
    res.stats = out.stats;
    res.delta_max = delta_max(a, b);
    const bool incumbent = out.has_solution() || (out.status == milp::SolveStatus::TimeLimit && !out.witness.empty());
    if (out.status == milp::SolveStatus::Infeasible) {
        res.status = DistinguishStatus::Distinguishable;
    } else if (incumbent) {
        res.status = DistinguishStatus::NotDistinguishable;
        res.witness = read_witness(inst, a, out.witness);
        if (inst.delta >= 0) {
            // Discrepancies within the feasibility tolerance are solver noise.
            double d = out.witness[static_cast<std::size_t>(inst.delta)];
            if (d <= milp::Tolerances::feasibility) d = 0.0;
            res.delta_bar = d;
            res.delta_bar_optimal = out.status == milp::SolveStatus::Optimal;
            res.delta_star = res.delta_max > 0.0 ? std::min(1.0, d / res.delta_max) : 0.0;
            if (res.delta_bar_optimal && d > res.delta_max + 1e-6)
                std::fprintf(stderr, "warning: delta_bar %.9g exceeds delta_max %.9g at T=%d\n", d, res.delta_max, T);
        }
    }
    return res;
}

namespace {

double relative_change(double prev, double cur) {
    if (prev == 0.0) return cur == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(cur - prev) / std::abs(prev);
}

}  // namespace

TSearchReport find_min_T(const SwaModel& a, const SwaModel& b, const SearchOptions& options) {
    if (options.T_max < 1) throw ModelError("T_max must be at least 1");
    if (options.plateau_window < 2) throw ModelError("plateau window must cover at least two horizons");
    DistinguishOptions check = options.check;
    check.minimize = true;

    TSearchReport rep;
    std::vector<DistinguishResult> feasible;  // in the order tested
    auto run = [&](int T) {
        DistinguishResult r = check_T(a, b, T, check);
        rep.T_last = std::max(rep.T_last, T);
        if (options.on_result) options.on_result(r);
        rep.results.push_back(r);
        return r;
    };
    auto finish = [&](SearchOutcome o) {
        std::sort(rep.results.begin(), rep.results.end(),
                  [](const DistinguishResult& x, const DistinguishResult& y) { return x.T < y.T; });
        rep.outcome = o;
        return rep;
    };

    int T = 1;
    int last_feasible = 0;
    while (true) {
        const DistinguishResult r = run(T);
        if (r.status == DistinguishStatus::Unresolved) return finish(SearchOutcome::Unresolved);
        if (r.status == DistinguishStatus::Distinguishable) {
            rep.T_min = T;
            // Skipped horizons are certified one by one from below.
            for (int back = last_feasible + 1; back < T; ++back) {
                const DistinguishResult rb = run(back);
                if (rb.status == DistinguishStatus::Unresolved) return finish(SearchOutcome::Unresolved);
                if (rb.status == DistinguishStatus::Distinguishable) {
                    rep.T_min = back;
                    break;
                }
            }
            return finish(SearchOutcome::Found);
        }
        last_feasible = T;
        feasible.push_back(r);
        const auto w = static_cast<std::size_t>(options.plateau_window);
        if (feasible.size() >= w) {
            // A run of zeros only says the noiseless behaviors still intersect; pairs
            // can leave it abruptly, so it does not end the search early.
            bool flat = *feasible.back().delta_star > 0.0;
            for (std::size_t k = feasible.size() - w + 1; k < feasible.size(); ++k)
                if (!(relative_change(*feasible[k - 1].delta_star, *feasible[k].delta_star) < options.plateau_tol))
                    flat = false;
            if (flat) {
                rep.plateau_onset = feasible[feasible.size() - w].T;
                rep.plateau_delta_star = *feasible.back().delta_star;
                return finish(SearchOutcome::Plateau);
            }
        }
        if (T >= options.T_max) {
            std::size_t zeros = 0;
            while (zeros < feasible.size() && *feasible[feasible.size() - 1 - zeros].delta_star == 0.0) ++zeros;
            if (zeros >= w) {
                rep.plateau_onset = feasible[feasible.size() - zeros].T;
                rep.plateau_delta_star = 0.0;
                return finish(SearchOutcome::Plateau);
            }
            return finish(SearchOutcome::Exhausted);
        }
        const int step = options.escalate && *r.delta_star < options.escalate_below ? 2 : 1;
        T = std::min(T + step, options.T_max);
    }
}

NoiseScaling max_noise_for_distinguishability(const SwaModel& a, const SwaModel& b, int T, double margin,
                                              const DistinguishOptions& options) {
    if (!(margin > 0.0 && margin < 1.0)) throw ModelError("margin must lie in (0, 1)");
    DistinguishOptions check = options;
    check.minimize = true;
    const DistinguishResult base = check_T(a, b, T, check);
    if (base.status == DistinguishStatus::Distinguishable)
        throw NotApplicable("the pair is already T-distinguishable at T=" + std::to_string(T));
    if (base.status == DistinguishStatus::Unresolved) throw NotApplicable("the base problem is unresolved");
    if (!base.delta_bar || *base.delta_bar <= 1e-9)
        throw NotApplicable("the models overlap without noise; no noise reduction separates them");

    NoiseScaling out;
    DistinguishOptions decide = options;
    decide.minimize = false;
    double hi = margin * *base.delta_bar / base.delta_max;
    DistinguishResult r = check_T(scale_noise(a, hi), scale_noise(b, hi), T, decide);
    if (r.status == DistinguishStatus::Distinguishable) {
        out.rho = hi;
        out.verification = r;
    } else {
        // rho = 0 always separates (the noiseless behaviors are disjoint when delta_bar > 0).
        double lo = 0.0;
        std::optional<DistinguishResult> good;
        for (int step = 0; step < 12; ++step) {
            const double mid = 0.5 * (lo + hi);
            DistinguishResult rm = check_T(scale_noise(a, mid), scale_noise(b, mid), T, decide);
            ++out.bisection_steps;
            if (rm.status == DistinguishStatus::Unresolved) throw NotApplicable("re-solve unresolved during bisection");
            if (rm.status == DistinguishStatus::Distinguishable) {
                lo = mid;
                good = rm;
            } else {
                hi = mid;
            }
        }
        out.rho = lo;
        out.verification = good ? *good : check_T(scale_noise(a, lo), scale_noise(b, lo), T, decide);
    }
    out.a = scale_noise(a, out.rho);
    out.b = scale_noise(b, out.rho);
    return out;
}

}  // namespace swafdi
