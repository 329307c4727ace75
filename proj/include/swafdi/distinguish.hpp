#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "swafdi/invalidation.hpp"

namespace swafdi {

/// The pair program for horizon T with index maps. Suffix _b refers to the second model.
struct DistinguishInstance {
    milp::MilpProblem problem;
    int horizon = 0;
    int delta = -1;  // -1 in feasibility-only builds
    std::vector<std::vector<int>> u;
    std::vector<std::vector<int>> x, x_b;
    std::vector<std::vector<int>> eta, eta_b;
    std::vector<std::vector<int>> nu, nu_b;
    std::vector<std::vector<int>> a;  // [t][i * m_b + j]
    int modes_a = 0;
    int modes_b = 0;
};

struct DistinguishOptions {
    milp::Encoding encoding = milp::Encoding::Sos1Branching;
    double time_limit_seconds = 300.0;
    BuildOptions build;
    /// Minimize the noise discrepancy to obtain the index; false only decides feasibility.
    bool minimize = true;
    std::string dump_lp_path;
};

DistinguishInstance build_distinguish(const SwaModel& a, const SwaModel& b, int T,
                                      const DistinguishOptions& options = {});

enum class DistinguishStatus { Distinguishable, NotDistinguishable, Unresolved };

const char* to_string(DistinguishStatus status);

struct DistinguishWitness {
    std::vector<Eigen::VectorXd> inputs;
    std::vector<Eigen::VectorXd> outputs;  // the common output trajectory, read off model a
    std::vector<Eigen::VectorXd> states_a, states_b;
    std::vector<Eigen::VectorXd> eta_a, eta_b;
    std::vector<Eigen::VectorXd> nu_a, nu_b;
    std::vector<int> modes_a, modes_b;
};

struct DistinguishResult {
    int T = 0;
    DistinguishStatus status = DistinguishStatus::Unresolved;
    milp::SolveStatus solver_status = milp::SolveStatus::NumericalFailure;
    std::optional<double> delta_bar;
    /// False when delta_bar comes from an incumbent at the time limit.
    bool delta_bar_optimal = false;
    double delta_max = 0.0;
    std::optional<double> delta_star;
    std::optional<DistinguishWitness> witness;
    milp::SolveStats stats;
};

/// Upper bound on the minimal discrepancy; each noise bound enters through its largest entry.
double delta_max(const SwaModel& a, const SwaModel& b);

/// Decides T-distinguishability. Distinguishable iff the pair program is infeasible.
DistinguishResult check_T(const SwaModel& a, const SwaModel& b, int T, const DistinguishOptions& options = {});

enum class SearchOutcome { Found, Plateau, Exhausted, Unresolved };

const char* to_string(SearchOutcome outcome);

struct SearchOptions {
    int T_max = 30;
    double plateau_tol = 0.01;
    int plateau_window = 3;
    /// Step by two while the index is below this value; certification back-tracks.
    double escalate_below = 0.25;
    bool escalate = true;
    DistinguishOptions check;
    /// Called after every solve, for progress reporting.
    std::function<void(const DistinguishResult&)> on_result;
};

struct TSearchReport {
    std::vector<DistinguishResult> results;  // sorted by T
    SearchOutcome outcome = SearchOutcome::Exhausted;
    int T_min = 0;                // Found
    double plateau_delta_star = 0.0;  // Plateau
    int plateau_onset = 0;        // Plateau: first T of the flat run
    int T_last = 0;               // largest T tested
};

TSearchReport find_min_T(const SwaModel& a, const SwaModel& b, const SearchOptions& options = {});

class NotApplicable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NoiseScaling {
    double rho = 0.0;
    SwaModel a, b;
    DistinguishResult verification;
    int bisection_steps = 0;
};

/// Uniform noise scaling rho that makes the pair T-distinguishable, starting from
/// margin * delta_bar / delta_max and halving the gap to zero until a re-solve confirms.
NoiseScaling max_noise_for_distinguishability(const SwaModel& a, const SwaModel& b, int T, double margin,
                                              const DistinguishOptions& options = {});

}  // namespace swafdi
