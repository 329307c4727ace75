#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swafdi/milp/problem.hpp"
#include "swafdi/model.hpp"

namespace swafdi {

struct BuildOptions {
    /// Adds the implied rows x+ = A x + B u + sum_i a_i f_i + nu (and the output
    /// analogue) when all modes share A, B (C, D). They do not change the feasible
    /// set, only tighten the relaxation.
    bool aggregate_rows = true;
};

/// The feasibility program for one model and data window, with index maps.
/// Absent variables (nu coordinates without process noise) map to -1.
struct InvalidationInstance {
    milp::MilpProblem problem;
    int horizon = 0;
    std::vector<std::vector<int>> x;                // [t][k]
    std::vector<std::vector<int>> eta;              // [t][l]
    std::vector<std::vector<int>> nu;               // [t][k]
    std::vector<std::vector<int>> a;                // [t][i]
    std::vector<std::vector<std::vector<int>>> s;   // [t][i][k], t <= N-2
    std::vector<std::vector<std::vector<int>>> r;   // [t][i][l]
};

InvalidationInstance build_invalidation(const SwaModel& model, const Trajectory& window,
                                        const BuildOptions& options = {});

enum class InvalidationStatus { Invalidated, NotInvalidated, Unresolved };

const char* to_string(InvalidationStatus status);

struct InvalidationWitness {
    std::vector<Eigen::VectorXd> states;
    std::vector<Eigen::VectorXd> eta;
    std::vector<Eigen::VectorXd> nu;
    std::vector<int> modes;  // 0-based
};

struct InvalidationResult {
    InvalidationStatus status = InvalidationStatus::Unresolved;
    milp::SolveStatus solver_status = milp::SolveStatus::NumericalFailure;
    std::optional<InvalidationWitness> witness;
    milp::SolveStats stats;
    int variables = 0;
    int constraints = 0;
};

struct CheckOptions {
    milp::Encoding encoding = milp::Encoding::Sos1Branching;
    double time_limit_seconds = 300.0;
    BuildOptions build;
    /// When non-empty, the built problem is written here in LP format.
    std::string dump_lp_path;
};

/// Solves the invalidation program. Invalidated iff the program is infeasible.
InvalidationResult check_invalidation(const SwaModel& model, const Trajectory& window,
                                      const CheckOptions& options = {});

/// Reads the solver assignment back into states, noises and modes.
InvalidationWitness extract_witness(const InvalidationInstance& inst, const std::vector<double>& values);

/// Writes a problem in LP format to path; throws on I/O failure.
void dump_lp(const milp::MilpProblem& problem, const std::string& path);

}  // namespace swafdi
