#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "swafdi/model.hpp"

namespace swafdi {

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mode index per step (0-based); the sequence repeats if shorter than the run.
struct FixedModes {
    std::vector<int> sequence;
};

/// Independent uniform mode draw at every step.
struct RandomModes {};

/// Hysteresis on one state coordinate: switch to on_mode when x[state] >= upper,
/// to off_mode when x[state] <= lower.
struct Thermostat {
    double lower = -5.0;
    double upper = 5.0;
    int state = 0;
    int on_mode = 0;
    int off_mode = 1;
    bool start_on = false;
};

using ModePolicy = std::variant<FixedModes, RandomModes, Thermostat>;

/// Fixed input per step (repeating) or an independent uniform draw in the input box.
struct FixedInputs {
    std::vector<Eigen::VectorXd> sequence;
};
struct RandomInputs {};
using InputPolicy = std::variant<FixedInputs, RandomInputs>;

struct FaultInjection {
    SwaModel model;
    int t_star = 0;  // first step generated by the fault model
};

struct SimConfig {
    int steps = 1;
    std::uint64_t seed = 0;
    Eigen::VectorXd initial_state;
    ModePolicy mode_policy = RandomModes{};
    InputPolicy input_policy = RandomInputs{};
    /// Noise draws are uniform in [-scale * eps, scale * eps]; 0 gives noise-free data.
    double noise_scale = 1.0;
    std::optional<FaultInjection> fault;
    /// Project states back onto the polytope when a step leaves it.
    bool project = true;
};

struct SimResult {
    Trajectory data;
    std::vector<int> modes;               // active mode per step
    std::vector<Eigen::VectorXd> states;  // x_0..x_{N-1}
    std::vector<bool> faulty;             // fault model active per step
    int projections = 0;                  // steps where the state had to be projected
};

SimResult simulate(const SwaModel& model, const SimConfig& cfg);

/// Euclidean projection onto {x | P x <= p} (Dykstra's alternating projections).
Eigen::VectorXd project_onto_polytope(const Eigen::MatrixXd& P, const Eigen::VectorXd& p, const Eigen::VectorXd& x);

/// Sidecar CSV t,mode,faulty,x_1..x_n with 1-based modes; for debugging only.
void write_sidecar_csv(const SimResult& result, std::ostream& out);

/// Sidecar fault flags as read back by the harness (faulty column only).
std::vector<bool> read_sidecar_faulty(std::istream& in);

/// First step flagged faulty, or -1.
int fault_onset(const std::vector<bool>& faulty);

}  // namespace swafdi
