#include "swafdi/hvac.hpp"

namespace swafdi::hvac {

AffineOde continuous_model(const Parameters& q, double flow, double gpm, double sample_period) {
    AffineOde ode;
    ode.A_c = Eigen::MatrixXd::Zero(5, 5);
    ode.b_c = Eigen::VectorXd::Zero(5);
    const double fs = flow / q.V_s;
    const double fh = flow / q.V_he;
    ode.A_c.row(0) << -fs, q.h_fg * flow / (q.C_p * q.V_s), fs, 4.0 / (q.C_p * q.V_s), -4.0 * q.h_fg / (q.C_p * q.V_s);
    ode.A_c.row(1) << 0.0, -fs, 0.0, 0.0, 1.0 / (q.rho * q.V_s);
    ode.A_c.row(2) << 0.75 * fh, -0.75 * flow * q.h_w / (q.C_p * q.V_he), -fh, 0.0, 0.0;
    // Q_o and M_o are held constant.
    ode.b_c[0] = -q.h_fg * flow / (q.C_p * q.V_s) * q.W_s;
    ode.b_c[1] = fs * q.W_s;
    ode.b_c[2] = flow / (4.0 * q.V_he) * (q.T_o - q.h_w / q.C_p * q.W_o) + flow * q.h_w / (q.C_p * q.V_he) * q.W_s -
                 6000.0 * gpm / (q.rho * q.C_p * q.V_he);
    ode.T_s = sample_period;
    return ode;
}

Eigen::MatrixXd reference_A() {
    Eigen::MatrixXd a(5, 5);
    a << 0.98, 229.63, 0.001, 0, -0.0035,
         0, 0.94, 0, 0, 0,
         0.74, -360.61, 0.0008, 0, -0.0030,
         0, 0, 0, 1, 0,
         0, 0, 0, 0, 1;
    return a;
}

Eigen::VectorXd reference_f_off() {
    Eigen::VectorXd f(5);
    f << 0.3886, 0.0001, -22.576, 0, 0;
    return f;
}

namespace {

Mode make_mode(const Eigen::MatrixXd& a, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
    Mode m = zero_mode(5, 0, 2);
    m.A = a;
    m.f = f;
    m.C(0, 0) = 1.0;
    m.C(1, 1) = 1.0;
    m.g = g;
    return m;
}

SwaModel with_modes(std::string name, Mode on, Mode off) {
    SwaModel m;
    m.name = std::move(name);
    m.n = 5;
    m.n_u = 0;
    m.n_y = 2;
    m.modes = {std::move(on), std::move(off)};
    Eigen::VectorXd lo(5), hi(5);
    lo << -100, -0.05, -50, 289800, 150;
    hi << 100, 0.05, 50, 289950, 180;
    set_box(m.sets, lo, hi);
    m.sets.eps_eta = Eigen::Vector2d(0.2, 0.002);
    m.sets.eps_nu = Eigen::VectorXd::Zero(5);
    return m;
}

// Integrated response of the discrete drift to a unit constant input on T_SA.
Eigen::VectorXd supply_air_gain(const Parameters& q, double flow) {
    AffineOde ode = continuous_model(q, flow, 0.0);
    ode.b_c.setZero();
    ode.b_c[2] = 1.0;
    return zoh(ode).f_d;
}

}  // namespace

SwaModel nominal_model() {
    const Eigen::Vector2d g = Eigen::Vector2d::Zero();
    return with_modes("hvac nominal", make_mode(reference_A(), Eigen::VectorXd::Zero(5), g),
                      make_mode(reference_A(), reference_f_off(), g));
}

SwaModel fan_fault(const Parameters& q) {
    // The continuous model does not reproduce the reference drifts, so the fault is
    // applied as a perturbation of the reference model: the change in A and in the
    // pump-independent drift between half and full flow, and the chiller effect
    // (on minus off) scaled by how much more the supply air responds at half flow.
    const double half = q.flow / 2.0;
    const DiscreteAffine full_off = zoh(continuous_model(q, q.flow, 0.0));
    const DiscreteAffine half_off = zoh(continuous_model(q, half, 0.0));
    const double gain = supply_air_gain(q, half)[2] / supply_air_gain(q, q.flow)[2];

    const Eigen::MatrixXd a = reference_A() + (half_off.A_d - full_off.A_d);
    const Eigen::VectorXd off = reference_f_off() + (half_off.f_d - full_off.f_d);
    const Eigen::VectorXd on = off - gain * reference_f_off();
    const Eigen::Vector2d g = Eigen::Vector2d::Zero();
    return with_modes("hvac fault 1 (fan at half speed)", make_mode(a, on, g), make_mode(a, off, g));
}

SwaModel pump_fault() {
    // The pump term is linear in gpm, so half flow puts the on-mode drift halfway
    // between the off drift and the full-flow on drift (zero).
    const Eigen::Vector2d g = Eigen::Vector2d::Zero();
    return with_modes("hvac fault 2 (pump at half speed)", make_mode(reference_A(), 0.5 * reference_f_off(), g),
                      make_mode(reference_A(), reference_f_off(), g));
}

SwaModel humidity_fault() {
    const Eigen::Vector2d g(0.0, 0.005);
    return with_modes("hvac fault 3 (humidity sensor bias)", make_mode(reference_A(), Eigen::VectorXd::Zero(5), g),
                      make_mode(reference_A(), reference_f_off(), g));
}

std::vector<SwaModel> fault_library(const Parameters& params) {
    return {fan_fault(params), pump_fault(), humidity_fault()};
}

}  // namespace swafdi::hvac
