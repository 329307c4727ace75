#pragma once

// Brute-force references shared by the unit tests and the acceptance checks.

#include <cmath>
#include <random>

#include "support.hpp"
#include "swafdi/invalidation.hpp"

namespace swafdi::test {

// Grid search over (x0, x1) of a scalar model; eta and nu follow from the data, so the
// grid only needs the two states. Returns whether some grid point satisfies every bound
// with the given slack added.
inline bool grid_feasible(const SwaModel& m, const Trajectory& d, double step, double slack) {
    const double lo = -1.0, hi = 1.0;  // the models below use the box [-1, 1]
    const int cells = static_cast<int>(std::lround((hi - lo) / step));
    const double eta = m.sets.eps_eta[0] + slack;
    const double nu = m.sets.eps_nu[0] + slack;
    const double u0 = m.n_u ? d.inputs[0][0] : 0.0;
    const double u1 = m.n_u ? d.inputs[1][0] : 0.0;
    const double y0 = d.outputs[0][0], y1 = d.outputs[1][0];
    for (int i = 0; i <= cells; ++i) {
        const double x0 = lo + i * step;
        for (int s0 = 0; s0 < m.num_modes(); ++s0) {
            const Mode& m0 = m.modes[s0];
            const double r0 = y0 - m0.C(0, 0) * x0 - (m.n_u ? m0.D(0, 0) * u0 : 0.0) - m0.g[0];
            if (std::abs(r0) > eta) continue;
            const double next = m0.A(0, 0) * x0 + (m.n_u ? m0.B(0, 0) * u0 : 0.0) + m0.f[0];
            for (int j = 0; j <= cells; ++j) {
                const double x1 = lo + j * step;
                if (std::abs(x1 - next) > nu) continue;
                for (int s1 = 0; s1 < m.num_modes(); ++s1) {
                    const Mode& m1 = m.modes[s1];
                    const double r1 = y1 - m1.C(0, 0) * x1 - (m.n_u ? m1.D(0, 0) * u1 : 0.0) - m1.g[0];
                    if (std::abs(r1) <= eta) return true;
                }
            }
        }
    }
    return false;
}

inline SwaModel random_scalar(std::mt19937_64& rng, int modes) {
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    std::vector<test::ScalarMode> ms;
    for (int i = 0; i < modes; ++i) ms.push_back({0.9 * ud(rng), 0.5 * ud(rng), 1.0 + 0.5 * ud(rng), 0.0, 0.3 * ud(rng), 0.3 * ud(rng)});
    return test::scalar_model(ms, 1.0, 0.05 + 0.1 * (ud(rng) + 1.0), 0.05 + 0.1 * (ud(rng) + 1.0), 1.0);
}

inline Trajectory random_window(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    Trajectory d;
    for (int t = 0; t < n; ++t) d.push_back(Eigen::VectorXd::Constant(1, ud(rng)), Eigen::VectorXd::Constant(1, 1.6 * ud(rng)));
    return d;
}

/// Random two-state, two-mode model with one input and one output on the unit box.
inline SwaModel random_planar(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    auto fill = [&](Eigen::MatrixXd& m, double scale) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = scale * ud(rng);
    };
    SwaModel m;
    m.n = 2;
    m.n_u = 1;
    m.n_y = 1;
    for (int i = 0; i < 2; ++i) {
        Mode md = zero_mode(2, 1, 1);
        fill(md.A, 0.5);
        fill(md.B, 1.0);
        fill(md.C, 1.0);
        md.f = Eigen::Vector2d(0.3 * ud(rng), 0.3 * ud(rng));
        md.g = Eigen::VectorXd::Constant(1, 0.3 * ud(rng));
        m.modes.push_back(md);
    }
    set_box(m.sets, Eigen::Vector2d::Constant(-1.0), Eigen::Vector2d::Constant(1.0));
    m.sets.eps_eta = Eigen::VectorXd::Constant(1, 0.1);
    m.sets.eps_nu = Eigen::Vector2d::Constant(0.05);
    m.sets.input_bound = 1.0;
    return m;
}

/// Feasibility by trying every assignment of the mode binaries on the big-M form,
/// each as a plain LP.
inline bool enumerate_modes(const InvalidationInstance& inst) {
    const milp::MilpProblem big_m = milp::rewrite_big_m(inst.problem);
    std::vector<int> binaries;
    for (const auto& row : inst.a) binaries.insert(binaries.end(), row.begin(), row.end());
    const int k = static_cast<int>(binaries.size());
    for (long mask = 0; mask < (1L << k); ++mask) {
        milp::MilpProblem fixed = big_m;
        for (int b = 0; b < k; ++b) {
            const double v = static_cast<double>((mask >> b) & 1);
            fixed.set_bounds(binaries[static_cast<std::size_t>(b)], v, v);
        }
        if (milp::lp_relax_solve(fixed).has_solution()) return true;
    }
    return false;
}

}  // namespace swafdi::test
