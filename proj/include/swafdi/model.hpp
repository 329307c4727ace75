#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace swafdi {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One affine mode: x+ = A x + B u + f, y = C x + D u + g.
template <typename Scalar>
struct BasicMode {
    MatX<Scalar> A, B, C, D;
    VecX<Scalar> f, g;
};

/// State polytope {x | P x <= p}, elementwise noise bounds and the input bound.
/// An empty input_bound means the model has no inputs at all.
template <typename Scalar>
struct BasicAdmissibleSets {
    MatX<Scalar> P;
    VecX<Scalar> p;
    VecX<Scalar> eps_eta;
    VecX<Scalar> eps_nu;
    std::optional<Scalar> input_bound;

    bool has_inputs() const { return input_bound.has_value(); }
};

template <typename Scalar>
struct BasicSwaModel {
    int n = 0;
    int n_u = 0;
    int n_y = 0;
    std::vector<BasicMode<Scalar>> modes;
    BasicAdmissibleSets<Scalar> sets;
    std::string name;

    int num_modes() const { return static_cast<int>(modes.size()); }
};

/// Input-output samples t = 0..N-1. inputs is empty for models without inputs.
template <typename Scalar>
struct BasicTrajectory {
    std::vector<VecX<Scalar>> inputs;
    std::vector<VecX<Scalar>> outputs;

    int length() const { return static_cast<int>(outputs.size()); }
    bool empty() const { return outputs.empty(); }

    BasicTrajectory window(int start, int len) const {
        BasicTrajectory w;
        w.outputs.assign(outputs.begin() + start, outputs.begin() + start + len);
        if (!inputs.empty()) w.inputs.assign(inputs.begin() + start, inputs.begin() + start + len);
        return w;
    }

    void push_back(const VecX<Scalar>& u, const VecX<Scalar>& y) {
        if (u.size() > 0) inputs.push_back(u);
        outputs.push_back(y);
    }
};

using Mode = BasicMode<double>;
using AdmissibleSets = BasicAdmissibleSets<double>;
using SwaModel = BasicSwaModel<double>;
using Trajectory = BasicTrajectory<double>;

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Box enclosing the state polytope, one interval per coordinate.
struct StateBox {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

/// Every structural problem with the model; empty when it is usable downstream.
std::vector<std::string> validate_model(const SwaModel& model);

/// Throws ModelError listing the problems found by validate_model.
void require_valid(const SwaModel& model);

bool same_interface(const SwaModel& a, const SwaModel& b);

/// Tightest box around {x | P x <= p}, by 2n LPs. Throws when a direction is
/// unbounded or the polytope is empty.
StateBox state_box(const SwaModel& model);

/// Builds the polytope of a box lo <= x <= hi.
void set_box(AdmissibleSets& sets, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

/// Mode with A, B, C, D, f, g zero-filled to the given dimensions.
Mode zero_mode(int n, int n_u, int n_y);

/// Same model with every noise bound multiplied by factor.
SwaModel scale_noise(const SwaModel& model, double factor);

/// Trajectory problems relative to a model (dimension, input bound); empty when fine.
std::vector<std::string> validate_trajectory(const SwaModel& model, const Trajectory& data);

}  // namespace swafdi
