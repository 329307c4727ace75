#include <algorithm>
#include <cmath>
#include <queue>

#include "simplex.hpp"
#include "swafdi/milp/problem.hpp"

namespace swafdi::milp {

namespace {

using detail::BoundedSimplex;
using detail::Clock;
using detail::LpStatus;

struct BoundChange {
    int var;
    double lower;
    double upper;
};

struct Node {
    std::vector<BoundChange> changes;
    double bound = -kInf;
    long order = 0;
};

struct NodeWorse {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.order < b.order;
    }
};

long lp_iteration_cap(const MilpProblem& p) { return 200L * (p.num_variables() + p.num_constraints()) + 10000; }

Clock::time_point deadline_after(double seconds) {
    if (!(seconds > 0.0) || seconds > 1e7) return Clock::time_point::max();
    return Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool contains_zero(double lo, double hi, double tol) { return lo <= tol && hi >= -tol; }

/// Fixes binaries implied by linear rows and clears SOS-1 partners of members that
/// cannot be zero. Works on full bound vectors; returns false on a proven conflict.
class Propagator {
public:
    explicit Propagator(const MilpProblem& p) : p_(p) {
        for (const auto& v : p.variables()) binary_.push_back(v.binary);
    }

    bool run(std::vector<double>& lo, std::vector<double>& hi) const {
        for (int pass = 0; pass < 8; ++pass) {
            bool changed = false;
            if (!sos_pass(lo, hi, changed)) return false;
            if (!row_pass(lo, hi, changed)) return false;
            if (!changed) break;
        }
        return true;
    }

private:
    bool sos_pass(std::vector<double>& lo, std::vector<double>& hi, bool& changed) const {
        constexpr double tol = Tolerances::integrality;
        for (const auto& group : p_.sos1_groups()) {
            int forced = -1;
            for (int v : group) {
                const auto k = static_cast<std::size_t>(v);
                if (!contains_zero(lo[k], hi[k], tol)) {
                    if (forced >= 0) return false;
                    forced = v;
                }
            }
            if (forced < 0) continue;
            for (int v : group) {
                const auto k = static_cast<std::size_t>(v);
                if (v == forced || (lo[k] == 0.0 && hi[k] == 0.0)) continue;
                if (!contains_zero(lo[k], hi[k], tol)) return false;
                lo[k] = 0.0;
                hi[k] = 0.0;
                changed = true;
            }
        }
        return true;
    }

    bool row_pass(std::vector<double>& lo, std::vector<double>& hi, bool& changed) const {
        for (const auto& c : p_.constraints()) {
            double min_act = 0.0;
            double max_act = 0.0;
            double scale = std::abs(c.rhs);
            bool has_free_binary = false;
            for (const auto& t : c.terms) {
                const auto k = static_cast<std::size_t>(t.var);
                const double a = t.coef * lo[k];
                const double b = t.coef * hi[k];
                min_act += std::min(a, b);
                max_act += std::max(a, b);
                scale += std::max(std::abs(a), std::abs(b));
                if (binary_[k] && lo[k] < hi[k]) has_free_binary = true;
            }
            const double tol = 1e-9 * scale + 1e-7;
            if (min_act > c.rhs + tol) return false;
            if (c.relation == Relation::Equal && max_act < c.rhs - tol) return false;
            if (!has_free_binary) continue;
            for (const auto& t : c.terms) {
                const auto k = static_cast<std::size_t>(t.var);
                if (!binary_[k] || !(lo[k] < hi[k])) continue;
                const double span = std::abs(t.coef) * (hi[k] - lo[k]);
                // Moving the binary off the bound that produced min_act costs `span`.
                const bool low_for_min = t.coef > 0;
                if (std::isfinite(min_act) && min_act + span > c.rhs + tol) {
                    if (low_for_min) hi[k] = lo[k]; else lo[k] = hi[k];
                    changed = true;
                    continue;
                }
                if (c.relation == Relation::Equal && std::isfinite(max_act) && max_act - span < c.rhs - tol) {
                    if (low_for_min) lo[k] = hi[k]; else hi[k] = lo[k];
                    changed = true;
                }
            }
        }
        return true;
    }

    const MilpProblem& p_;
    std::vector<bool> binary_;
};

struct Branch {
    // Each child is a list of bound changes; children are listed in preferred order.
    std::vector<std::vector<BoundChange>> children;
};

class Solver {
public:
    Solver(const MilpProblem& p, const SolveOptions& options)
        : p_(p), options_(options), lp_(p), propagator_(p), start_(Clock::now()),
          deadline_(deadline_after(options.time_limit_seconds)) {
        const int n = p.num_variables();
        root_lo_.resize(static_cast<std::size_t>(n));
        root_hi_.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            root_lo_[static_cast<std::size_t>(j)] = p.variables()[static_cast<std::size_t>(j)].lower;
            root_hi_[static_cast<std::size_t>(j)] = p.variables()[static_cast<std::size_t>(j)].upper;
        }
        cost_.assign(static_cast<std::size_t>(n), 0.0);
        for (const auto& t : p.objective()) cost_[static_cast<std::size_t>(t.var)] += t.coef;
        lp_.set_cost(cost_);
        minimize_ = p.sense() == Sense::Minimize;
        cur_lo_ = root_lo_;
        cur_hi_ = root_hi_;
    }

    SolveOutcome run() {
        SolveOutcome out;
        std::vector<double> lo = root_lo_;
        std::vector<double> hi = root_hi_;
        if (!propagator_.run(lo, hi)) return finish(SolveStatus::Infeasible);
        Node root;
        for (int j = 0; j < p_.num_variables(); ++j) {
            const auto k = static_cast<std::size_t>(j);
            if (lo[k] != root_lo_[k] || hi[k] != root_hi_[k]) root.changes.push_back({j, lo[k], hi[k]});
        }
        apply(root.changes);

        const LpStatus first = lp_.solve_primal(lp_iteration_cap(p_), deadline_);
        ++nodes_;
        if (first == LpStatus::TimeLimit) return finish(SolveStatus::TimeLimit);
        if (first == LpStatus::Infeasible) return finish(SolveStatus::Infeasible);
        if (first == LpStatus::Unbounded) return finish(SolveStatus::Unbounded);
        if (first != LpStatus::Optimal) return finish(SolveStatus::NumericalFailure);

        std::vector<Node> stack;
        std::priority_queue<Node, std::vector<Node>, NodeWorse> heap;
        bool have_current = true;
        Node current = std::move(root);
        current.bound = node_bound();

        while (true) {
            if (!have_current) {
                if (minimize_ && have_incumbent_ && !best_first_) {
                    // The first incumbent switches the open dives over to best-first order.
                    for (auto& n : stack) heap.push(std::move(n));
                    stack.clear();
                    best_first_ = true;
                }
                bool from_heap = false;
                if (!stack.empty()) {
                    current = std::move(stack.back());
                    stack.pop_back();
                } else if (!heap.empty()) {
                    current = heap.top();
                    heap.pop();
                    from_heap = true;
                } else {
                    break;
                }
                if (have_incumbent_ && prune_by_bound(current.bound)) {
                    if (from_heap) heap = {};
                    continue;
                }
                if (Clock::now() > deadline_) return finish(SolveStatus::TimeLimit);
                apply(current.changes);
                const LpStatus st = reoptimize();
                ++nodes_;
                if (st == LpStatus::TimeLimit) return finish(SolveStatus::TimeLimit);
                if (st == LpStatus::NumericalFailure || st == LpStatus::IterationLimit || st == LpStatus::Unbounded) {
                    numerical_trouble_ = true;
                    continue;
                }
                if (st != LpStatus::Optimal) continue;
                current.bound = node_bound();
            }
            have_current = false;
            if (have_incumbent_ && prune_by_bound(current.bound)) continue;

            x_ = lp_.structural_values();
            Branch branch = choose_branch();
            if (branch.children.empty()) {
                if (accept_incumbent()) {
                    if (!minimize_) return finish(SolveStatus::Feasible);
                    if (incumbent_obj_ <= options_.known_lower_bound + gap_abs(incumbent_obj_))
                        return finish(SolveStatus::Optimal);
                }
                continue;
            }

            // Propagate each child; keep the first live child to plunge into.
            bool plunged = false;
            for (auto& extra : branch.children) {
                Node child;
                if (!make_child(current, extra, child)) continue;
                child.bound = current.bound;
                child.order = ++order_;
                if (!plunged) {
                    plunge_ = std::move(child);
                    plunged = true;
                } else if (best_first_) {
                    heap.push(std::move(child));
                } else {
                    pending_.push_back(std::move(child));
                }
            }
            // Later children go below the plunge target on the stack.
            for (auto it = pending_.rbegin(); it != pending_.rend(); ++it) stack.push_back(std::move(*it));
            pending_.clear();
            if (plunged) {
                stack.push_back(std::move(plunge_));
            }
        }

        if (have_incumbent_) return finish(minimize_ ? SolveStatus::Optimal : SolveStatus::Feasible);
        return finish(numerical_trouble_ ? SolveStatus::NumericalFailure : SolveStatus::Infeasible);
    }

private:
    double gap_abs(double obj) const {
        return Tolerances::optimality_gap * std::max(1.0, std::abs(obj));
    }

    // The LP value, unless updated-tableau drift leaves it without a certificate.
    double node_bound() const {
        const double z = lp_.objective();
        return minimize_ ? std::min(z, lp_.lagrangian_bound()) : z;
    }

    bool prune_by_bound(double bound) const {
        return minimize_ && bound >= incumbent_obj_ - gap_abs(incumbent_obj_);
    }

    LpStatus reoptimize() {
        const double cutoff = (minimize_ && have_incumbent_) ? incumbent_obj_ - gap_abs(incumbent_obj_) : kInf;
        if (lp_.restore_dual_feasibility()) {
            const LpStatus st = lp_.solve_dual(lp_iteration_cap(p_), deadline_, cutoff);
            if (st == LpStatus::Optimal || st == LpStatus::Infeasible || st == LpStatus::Cutoff ||
                st == LpStatus::TimeLimit)
                return st;
            lp_.reinvert();
        }
        return lp_.solve_primal(lp_iteration_cap(p_), deadline_);
    }

    void apply(const std::vector<BoundChange>& changes) {
        const auto n = static_cast<std::size_t>(p_.num_variables());
        target_lo_ = root_lo_;
        target_hi_ = root_hi_;
        for (const auto& c : changes) {
            target_lo_[static_cast<std::size_t>(c.var)] = c.lower;
            target_hi_[static_cast<std::size_t>(c.var)] = c.upper;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (target_lo_[j] != cur_lo_[j] || target_hi_[j] != cur_hi_[j]) {
                lp_.set_bounds(static_cast<int>(j), target_lo_[j], target_hi_[j]);
                cur_lo_[j] = target_lo_[j];
                cur_hi_[j] = target_hi_[j];
            }
        }
    }

    bool make_child(const Node& parent, const std::vector<BoundChange>& extra, Node& child) {
        std::vector<double> lo = root_lo_;
        std::vector<double> hi = root_hi_;
        for (const auto& c : parent.changes) {
            lo[static_cast<std::size_t>(c.var)] = c.lower;
            hi[static_cast<std::size_t>(c.var)] = c.upper;
        }
        for (const auto& c : extra) {
            const auto k = static_cast<std::size_t>(c.var);
            const double l = std::max(lo[k], c.lower);
            const double h = std::min(hi[k], c.upper);
            if (l > h + Tolerances::feasibility) return false;
            lo[k] = l;
            hi[k] = std::max(l, h);
        }
        if (!propagator_.run(lo, hi)) return false;
        child.changes.clear();
        for (int j = 0; j < p_.num_variables(); ++j) {
            const auto k = static_cast<std::size_t>(j);
            if (lo[k] != root_lo_[k] || hi[k] != root_hi_[k]) child.changes.push_back({j, lo[k], hi[k]});
        }
        return true;
    }

    Branch choose_branch() const {
        constexpr double tol = Tolerances::integrality;
        Branch branch;
        const auto& vars = p_.variables();
        // SOS-1 groups in index order, which for the FDI programs is time order.
        for (const auto& group : p_.sos1_groups()) {
            int nonzero = 0;
            for (int v : group)
                if (std::abs(x_[static_cast<std::size_t>(v)]) > tol) ++nonzero;
            if (nonzero <= 1) continue;
            if (group.size() == 2 && (vars[static_cast<std::size_t>(group[0])].binary ||
                                      vars[static_cast<std::size_t>(group[1])].binary)) {
                int a = group[0];
                int s = group[1];
                if (!vars[static_cast<std::size_t>(a)].binary) std::swap(a, s);
                const auto ka = static_cast<std::size_t>(a);
                const auto ks = static_cast<std::size_t>(s);
                std::vector<BoundChange> on{{a, 1.0, 1.0}, {s, 0.0, 0.0}};
                std::vector<BoundChange> off{{a, 0.0, 0.0}};
                const double reach = std::max({std::abs(cur_lo_[ks]), std::abs(cur_hi_[ks]), 1e-12});
                const bool prefer_on = (1.0 - x_[ka]) <= std::abs(x_[ks]) / reach;
                if (prefer_on) {
                    branch.children = {on, off};
                } else {
                    branch.children = {off, on};
                }
                return branch;
            }
            // General group: zero one half or the other.
            std::vector<BoundChange> left;
            std::vector<BoundChange> right;
            const std::size_t half = group.size() / 2;
            for (std::size_t i = 0; i < group.size(); ++i)
                (i < half ? left : right).push_back({group[i], 0.0, 0.0});
            branch.children = {right, left};
            return branch;
        }
        int best = -1;
        double best_frac = tol;
        for (int j = 0; j < p_.num_variables(); ++j) {
            const auto k = static_cast<std::size_t>(j);
            if (!vars[k].binary) continue;
            const double frac = std::min(x_[k] - std::floor(x_[k]), std::ceil(x_[k]) - x_[k]);
            if (frac > best_frac + 1e-12) {
                best_frac = frac;
                best = j;
            }
        }
        if (best >= 0) {
            const auto k = static_cast<std::size_t>(best);
            std::vector<BoundChange> up{{best, 1.0, 1.0}};
            std::vector<BoundChange> down{{best, 0.0, 0.0}};
            branch.children = x_[k] >= 0.5 ? std::vector{up, down} : std::vector{down, up};
        }
        return branch;
    }

    // Cleans an integral LP point and records it if it passes the independent check.
    bool accept_incumbent() {
        std::vector<double> point = x_;
        const auto& vars = p_.variables();
        for (std::size_t j = 0; j < point.size(); ++j)
            if (vars[j].binary) point[j] = std::round(point[j]);
        if (!check_assignment(p_, point).empty()) {
            if (!polish(point)) {
                numerical_trouble_ = true;
                return false;
            }
        }
        const double obj = objective_of(point);
        if (have_incumbent_ && obj >= incumbent_obj_) return false;
        incumbent_ = std::move(point);
        incumbent_obj_ = obj;
        have_incumbent_ = true;
        return true;
    }

    // Fixes binaries and SOS-1 zeros, re-solves the LP and re-checks.
    bool polish(std::vector<double>& point) {
        constexpr double tol = Tolerances::integrality;
        std::vector<BoundChange> fix;
        const auto& vars = p_.variables();
        std::vector<bool> zero(point.size(), false);
        for (const auto& group : p_.sos1_groups())
            for (int v : group)
                if (std::abs(x_[static_cast<std::size_t>(v)]) <= tol) zero[static_cast<std::size_t>(v)] = true;
        for (std::size_t j = 0; j < point.size(); ++j) {
            if (vars[j].binary) fix.push_back({static_cast<int>(j), point[j], point[j]});
            else if (zero[j]) fix.push_back({static_cast<int>(j), 0.0, 0.0});
        }
        auto saved_lo = cur_lo_;
        auto saved_hi = cur_hi_;
        std::vector<BoundChange> all;
        for (std::size_t j = 0; j < point.size(); ++j)
            if (saved_lo[j] != root_lo_[j] || saved_hi[j] != root_hi_[j])
                all.push_back({static_cast<int>(j), saved_lo[j], saved_hi[j]});
        for (const auto& f : fix) all.push_back(f);
        apply(all);
        lp_.reinvert();
        const LpStatus st = lp_.solve_primal(lp_iteration_cap(p_), deadline_);
        bool ok = false;
        if (st == LpStatus::Optimal) {
            std::vector<double> y = lp_.structural_values();
            for (std::size_t j = 0; j < y.size(); ++j)
                if (vars[j].binary) y[j] = std::round(y[j]);
            if (check_assignment(p_, y).empty()) {
                point = std::move(y);
                ok = true;
            }
        }
        return ok;
    }

    double objective_of(const std::vector<double>& point) const {
        double z = 0.0;
        for (std::size_t j = 0; j < point.size(); ++j) z += cost_[j] * point[j];
        return z;
    }

    SolveOutcome finish(SolveStatus status) {
        SolveOutcome out;
        out.status = status;
        if (have_incumbent_) {
            out.witness = incumbent_;
            out.objective = incumbent_obj_;
            if (status == SolveStatus::TimeLimit || status == SolveStatus::NumericalFailure)
                out.status = minimize_ ? SolveStatus::TimeLimit : SolveStatus::Feasible;
        }
        out.stats.nodes = nodes_;
        out.stats.lp_iterations = lp_.iterations();
        out.stats.wall_seconds = seconds_since(start_);
        return out;
    }

    const MilpProblem& p_;
    SolveOptions options_;
    BoundedSimplex lp_;
    Propagator propagator_;
    Clock::time_point start_;
    Clock::time_point deadline_;
    bool minimize_ = false;
    std::vector<double> cost_;
    std::vector<double> root_lo_, root_hi_, cur_lo_, cur_hi_, target_lo_, target_hi_;
    std::vector<double> x_;
    std::vector<double> incumbent_;
    double incumbent_obj_ = kInf;
    bool have_incumbent_ = false;
    bool numerical_trouble_ = false;
    long nodes_ = 0;
    long order_ = 0;
    bool best_first_ = false;
    Node plunge_;
    std::vector<Node> pending_;
};

}  // namespace

SolveOutcome solve(const MilpProblem& problem, const SolveOptions& options) {
    problem.validate();
    if (options.encoding == Encoding::BigM && !problem.sos1_groups().empty()) {
        const MilpProblem rewritten = rewrite_big_m(problem);
        return Solver(rewritten, options).run();
    }
    return Solver(problem, options).run();
}

SolveOutcome lp_relax_solve(const MilpProblem& problem, double time_limit_seconds) {
    problem.validate();
    const auto start = Clock::now();
    BoundedSimplex lp(problem);
    std::vector<double> cost(static_cast<std::size_t>(problem.num_variables()), 0.0);
    for (const auto& t : problem.objective()) cost[static_cast<std::size_t>(t.var)] += t.coef;
    lp.set_cost(cost);
    const LpStatus st = lp.solve_primal(lp_iteration_cap(problem), deadline_after(time_limit_seconds));
    SolveOutcome out;
    switch (st) {
        case LpStatus::Optimal:
            out.status = problem.sense() == Sense::Minimize ? SolveStatus::Optimal : SolveStatus::Feasible;
            out.witness = lp.structural_values();
            out.objective = lp.objective();
            break;
        case LpStatus::Infeasible: out.status = SolveStatus::Infeasible; break;
        case LpStatus::Unbounded: out.status = SolveStatus::Unbounded; break;
        case LpStatus::TimeLimit: out.status = SolveStatus::TimeLimit; break;
        default: out.status = SolveStatus::NumericalFailure; break;
    }
    out.stats.nodes = 1;
    out.stats.lp_iterations = lp.iterations();
    out.stats.wall_seconds = seconds_since(start);
    return out;
}

}  // namespace swafdi::milp
