#pragma once

#include <string>

#include "swafdi/io.hpp"
#include "swafdi/model.hpp"

namespace swafdi::test {

inline std::string data_path(const std::string& name) { return std::string(SWAFDI_DATA_DIR) + "/" + name; }

inline SwaModel fixture(const std::string& name) { return load_model(data_path(name)); }

/// Scalar SWA model: x+ = a_i x + b u + f_i, y = c_i x + g_i on the box [-bound, bound].
struct ScalarMode {
    double a = 0.5, b = 0.0, c = 1.0, d = 0.0, f = 0.0, g = 0.0;
};

inline SwaModel scalar_model(const std::vector<ScalarMode>& modes, double bound, double eps_eta, double eps_nu,
                             std::optional<double> input_bound = std::nullopt) {
    SwaModel m;
    m.n = 1;
    m.n_y = 1;
    m.n_u = input_bound ? 1 : 0;
    m.name = "scalar";
    for (const auto& s : modes) {
        Mode md = zero_mode(1, m.n_u, 1);
        md.A(0, 0) = s.a;
        md.C(0, 0) = s.c;
        if (m.n_u) {
            md.B(0, 0) = s.b;
            md.D(0, 0) = s.d;
        }
        md.f[0] = s.f;
        md.g[0] = s.g;
        m.modes.push_back(md);
    }
    set_box(m.sets, Eigen::VectorXd::Constant(1, -bound), Eigen::VectorXd::Constant(1, bound));
    m.sets.eps_eta = Eigen::VectorXd::Constant(1, eps_eta);
    m.sets.eps_nu = Eigen::VectorXd::Constant(1, eps_nu);
    m.sets.input_bound = input_bound;
    return m;
}

}  // namespace swafdi::test
