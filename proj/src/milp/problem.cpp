#include "swafdi/milp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace swafdi::milp {

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Feasible: return "FEASIBLE";
        case SolveStatus::Infeasible: return "INFEASIBLE";
        case SolveStatus::Optimal: return "OPTIMAL";
        case SolveStatus::TimeLimit: return "TIME_LIMIT";
        case SolveStatus::NumericalFailure: return "NUMERICAL_FAILURE";
        case SolveStatus::Unbounded: return "UNBOUNDED";
    }
    return "UNKNOWN";
}

const char* to_string(Encoding encoding) {
    return encoding == Encoding::Sos1Branching ? "sos1" : "bigm";
}

Encoding parse_encoding(const std::string& text) {
    if (text == "sos1") return Encoding::Sos1Branching;
    if (text == "bigm") return Encoding::BigM;
    throw ProblemError("unknown encoding '" + text + "' (expected sos1 or bigm)");
}

int MilpProblem::add_variable(std::string name, double lower, double upper) {
    variables_.push_back({std::move(name), lower, upper, false});
    return num_variables() - 1;
}

int MilpProblem::add_binary(std::string name) {
    variables_.push_back({std::move(name), 0.0, 1.0, true});
    return num_variables() - 1;
}

void MilpProblem::add_constraint(std::vector<Term> terms, Relation relation, double rhs, std::string name) {
    constraints_.push_back({std::move(terms), relation, rhs});
    constraint_names_.push_back(std::move(name));
}

void MilpProblem::add_sos1(std::vector<int> members) { sos1_groups_.push_back(std::move(members)); }

void MilpProblem::set_objective(std::vector<Term> cost) {
    objective_ = std::move(cost);
    sense_ = Sense::Minimize;
}

void MilpProblem::clear_objective() {
    objective_.clear();
    sense_ = Sense::Feasibility;
}

void MilpProblem::set_bounds(int var, double lower, double upper) {
    variables_.at(static_cast<std::size_t>(var)).lower = lower;
    variables_.at(static_cast<std::size_t>(var)).upper = upper;
}

int MilpProblem::num_binaries() const {
    return static_cast<int>(std::count_if(variables_.begin(), variables_.end(),
                                          [](const Variable& v) { return v.binary; }));
}

void MilpProblem::validate() const {
    const int n = num_variables();
    for (const auto& v : variables_) {
        if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper)
            throw ProblemError("variable '" + v.name + "' has invalid bounds");
        if (v.binary && (v.lower < 0.0 || v.upper > 1.0))
            throw ProblemError("binary variable '" + v.name + "' must have bounds within [0, 1]");
    }
    auto check_terms = [n](const std::vector<Term>& terms, const char* where) {
        for (const auto& t : terms) {
            if (t.var < 0 || t.var >= n) throw ProblemError(std::string("variable index out of range in ") + where);
            if (!std::isfinite(t.coef)) throw ProblemError(std::string("non-finite coefficient in ") + where);
        }
    };
    for (const auto& c : constraints_) {
        check_terms(c.terms, "constraint");
        if (!std::isfinite(c.rhs)) throw ProblemError("non-finite right-hand side");
    }
    check_terms(objective_, "objective");
    for (const auto& group : sos1_groups_) {
        for (int member : group) {
            if (member < 0 || member >= n) throw ProblemError("SOS-1 member index out of range");
            const auto& v = variables_[static_cast<std::size_t>(member)];
            if (!std::isfinite(v.lower) || !std::isfinite(v.upper))
                throw ProblemError("SOS-1 member '" + v.name + "' must have finite bounds");
        }
    }
}

std::vector<std::string> check_assignment(const MilpProblem& problem, std::span<const double> values, double tol) {
    std::vector<std::string> issues;
    const auto& vars = problem.variables();
    if (values.size() != vars.size()) {
        issues.push_back("assignment has wrong length");
        return issues;
    }
    for (std::size_t j = 0; j < vars.size(); ++j) {
        const double x = values[j];
        if (!std::isfinite(x) || x < vars[j].lower - tol || x > vars[j].upper + tol) {
            std::ostringstream msg;
            msg << "bound violated: " << vars[j].name << " = " << x;
            issues.push_back(msg.str());
        }
        if (vars[j].binary && std::min(std::abs(x), std::abs(x - 1.0)) > tol)
            issues.push_back("binary not integral: " + vars[j].name);
    }
    const auto& cons = problem.constraints();
    for (std::size_t i = 0; i < cons.size(); ++i) {
        double activity = 0.0;
        for (const auto& t : cons[i].terms) activity += t.coef * values[static_cast<std::size_t>(t.var)];
        const double excess = activity - cons[i].rhs;
        const bool bad = cons[i].relation == Relation::Equal ? std::abs(excess) > tol : excess > tol;
        if (bad) {
            std::ostringstream msg;
            msg << "constraint " << i;
            if (!problem.constraint_names()[i].empty()) msg << " (" << problem.constraint_names()[i] << ")";
            msg << " violated by " << excess;
            issues.push_back(msg.str());
        }
    }
    for (std::size_t g = 0; g < problem.sos1_groups().size(); ++g) {
        int nonzero = 0;
        for (int member : problem.sos1_groups()[g])
            if (std::abs(values[static_cast<std::size_t>(member)]) > tol) ++nonzero;
        if (nonzero > 1) issues.push_back("SOS-1 group " + std::to_string(g) + " has " + std::to_string(nonzero) + " nonzeros");
    }
    return issues;
}

MilpProblem rewrite_big_m(const MilpProblem& problem) {
    problem.validate();
    MilpProblem out;
    for (const auto& v : problem.variables()) {
        if (v.binary) {
            const int id = out.add_binary(v.name);
            out.set_bounds(id, v.lower, v.upper);
        } else {
            out.add_variable(v.name, v.lower, v.upper);
        }
    }
    for (std::size_t i = 0; i < problem.constraints().size(); ++i) {
        const auto& c = problem.constraints()[i];
        out.add_constraint(c.terms, c.relation, c.rhs, problem.constraint_names()[i]);
    }
    const auto& vars = problem.variables();
    for (const auto& group : problem.sos1_groups()) {
        if (group.size() != 2)
            throw ProblemError("big-M rewrite expects SOS-1 groups of one binary and one continuous variable");
        int a = group[0];
        int s = group[1];
        if (!vars[static_cast<std::size_t>(a)].binary) std::swap(a, s);
        if (!vars[static_cast<std::size_t>(a)].binary || vars[static_cast<std::size_t>(s)].binary)
            throw ProblemError("big-M rewrite expects SOS-1 groups of one binary and one continuous variable");
        const auto& sv = vars[static_cast<std::size_t>(s)];
        if (!std::isfinite(sv.lower) || !std::isfinite(sv.upper))
            throw ProblemError("big-M rewrite needs finite bounds on '" + sv.name + "'");
        const double big_m = std::max(std::abs(sv.lower), std::abs(sv.upper));
        // s + M a <= M and -s + M a <= M
        out.add_constraint({{s, 1.0}, {a, big_m}}, Relation::LessEqual, big_m, "bigm_up_" + sv.name);
        out.add_constraint({{s, -1.0}, {a, big_m}}, Relation::LessEqual, big_m, "bigm_lo_" + sv.name);
    }
    if (problem.sense() == Sense::Minimize) out.set_objective(problem.objective());
    return out;
}

namespace {

std::string lp_name(const MilpProblem& problem, int var) {
    const auto& name = problem.variables()[static_cast<std::size_t>(var)].name;
    std::string clean = name.empty() ? "v" + std::to_string(var) : name;
    for (char& ch : clean)
        if (ch == ',' || ch == ' ' || ch == '[' || ch == ']' || ch == '(' || ch == ')') ch = '_';
    return clean + "#" + std::to_string(var);
}

void write_terms(const MilpProblem& problem, const std::vector<Term>& terms, std::ostream& out) {
    if (terms.empty()) {
        out << " 0 " << lp_name(problem, 0);
        return;
    }
    for (const auto& t : terms) {
        out << (t.coef < 0 ? " - " : " + ") << std::abs(t.coef) << ' ' << lp_name(problem, t.var);
    }
}

}  // namespace

void write_lp(const MilpProblem& problem, std::ostream& out) {
    out.precision(17);
    out << "\\ written by swa-fdi\nMinimize\n obj:";
    if (problem.objective().empty() && problem.num_variables() > 0)
        out << " 0 " << lp_name(problem, 0);
    else
        write_terms(problem, problem.objective(), out);
    out << "\nSubject To\n";
    for (std::size_t i = 0; i < problem.constraints().size(); ++i) {
        const auto& c = problem.constraints()[i];
        out << " c" << i << ':';
        write_terms(problem, c.terms, out);
        out << (c.relation == Relation::Equal ? " = " : " <= ") << c.rhs << '\n';
    }
    out << "Bounds\n";
    for (int j = 0; j < problem.num_variables(); ++j) {
        const auto& v = problem.variables()[static_cast<std::size_t>(j)];
        if (v.binary && v.lower == 0.0 && v.upper == 1.0) continue;
        const std::string name = lp_name(problem, j);
        if (std::isinf(v.lower) && std::isinf(v.upper)) {
            out << ' ' << name << " free\n";
        } else {
            out << ' ';
            if (std::isinf(v.lower)) out << "-inf"; else out << v.lower;
            out << " <= " << name << " <= ";
            if (std::isinf(v.upper)) out << "+inf"; else out << v.upper;
            out << '\n';
        }
    }
    if (problem.num_binaries() > 0) {
        out << "Binaries\n";
        for (int j = 0; j < problem.num_variables(); ++j)
            if (problem.variables()[static_cast<std::size_t>(j)].binary) out << ' ' << lp_name(problem, j) << '\n';
    }
    if (!problem.sos1_groups().empty()) {
        out << "SOS\n";
        for (std::size_t g = 0; g < problem.sos1_groups().size(); ++g) {
            out << " s" << g << ": S1::";
            int weight = 1;
            for (int member : problem.sos1_groups()[g]) out << ' ' << lp_name(problem, member) << ':' << weight++;
            out << '\n';
        }
    }
    out << "End\n";
}

}  // namespace swafdi::milp
