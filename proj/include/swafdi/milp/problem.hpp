#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace swafdi::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal };
enum class Sense { Feasibility, Minimize };
enum class Encoding { Sos1Branching, BigM };
enum class SolveStatus { Feasible, Infeasible, Optimal, TimeLimit, NumericalFailure, Unbounded };

const char* to_string(SolveStatus status);
const char* to_string(Encoding encoding);
Encoding parse_encoding(const std::string& text);

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    bool binary = false;
};

struct Term {
    int var;
    double coef;
};

struct Constraint {
    std::vector<Term> terms;
    Relation relation = Relation::LessEqual;
    double rhs = 0.0;
};

class ProblemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mixed-integer linear program over bounded variables with optional SOS-1 groups.
///
/// An SOS-1 group is a set of variable indices of which at most one may take a
/// nonzero value. Every SOS-1 member must have finite bounds.
class MilpProblem {
public:
    int add_variable(std::string name, double lower, double upper);
    int add_binary(std::string name);
    void add_constraint(std::vector<Term> terms, Relation relation, double rhs, std::string name = {});
    void add_sos1(std::vector<int> members);
    void set_objective(std::vector<Term> cost);
    void clear_objective();

    void set_bounds(int var, double lower, double upper);

    int num_variables() const { return static_cast<int>(variables_.size()); }
    int num_constraints() const { return static_cast<int>(constraints_.size()); }
    int num_binaries() const;

    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const std::vector<std::string>& constraint_names() const { return constraint_names_; }
    const std::vector<std::vector<int>>& sos1_groups() const { return sos1_groups_; }
    const std::vector<Term>& objective() const { return objective_; }
    Sense sense() const { return sense_; }

    /// Throws ProblemError when an invariant is broken.
    void validate() const;

private:
    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
    std::vector<std::string> constraint_names_;
    std::vector<std::vector<int>> sos1_groups_;
    std::vector<Term> objective_;
    Sense sense_ = Sense::Feasibility;
};

struct SolveStats {
    long nodes = 0;
    long lp_iterations = 0;
    double wall_seconds = 0.0;
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> witness;
    SolveStats stats;

    bool has_solution() const {
        return status == SolveStatus::Feasible || status == SolveStatus::Optimal;
    }
};

struct SolveOptions {
    Encoding encoding = Encoding::Sos1Branching;
    double time_limit_seconds = 300.0;
    std::uint64_t seed = 0;
    /// Objective values at or below this are accepted as optimal without further search.
    double known_lower_bound = -kInf;
};

struct Tolerances {
    static constexpr double integrality = 1e-6;
    static constexpr double feasibility = 1e-6;
    static constexpr double pivot = 1e-9;
    static constexpr double optimality_gap = 1e-6;
};

SolveOutcome solve(const MilpProblem& problem, const SolveOptions& options = {});

/// Solves the LP relaxation: binaries range over [0, 1] and SOS-1 groups are ignored.
SolveOutcome lp_relax_solve(const MilpProblem& problem, double time_limit_seconds = 300.0);

/// Replaces every {binary a, continuous s} SOS-1 pair by s <= M(1 - a), -s <= M(1 - a)
/// with M = max(|lb(s)|, |ub(s)|).
MilpProblem rewrite_big_m(const MilpProblem& problem);

/// Independent check of an assignment. Returns one message per violated constraint,
/// bound, integrality condition or SOS-1 group (empty when the point is feasible).
std::vector<std::string> check_assignment(const MilpProblem& problem, std::span<const double> values,
                                          double tol = Tolerances::feasibility);

/// Writes the problem in CPLEX LP text format. SOS-1 groups go into an SOS section.
void write_lp(const MilpProblem& problem, std::ostream& out);

}  // namespace swafdi::milp
