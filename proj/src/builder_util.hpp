#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "swafdi/milp/problem.hpp"
#include "swafdi/model.hpp"

namespace swafdi::detail {

/// Range of M x over the box lo <= x <= hi.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> interval_product(const Eigen::MatrixXd& m,
                                                                    const Eigen::VectorXd& lo,
                                                                    const Eigen::VectorXd& hi) {
    const Eigen::MatrixXd pos = m.cwiseMax(0.0);
    const Eigen::MatrixXd neg = m.cwiseMin(0.0);
    return {pos * lo + neg * hi, pos * hi + neg * lo};
}

inline std::vector<int> add_vector(milp::MilpProblem& p, const std::string& name, const Eigen::VectorXd& lo,
                                   const Eigen::VectorXd& hi) {
    std::vector<int> ids;
    ids.reserve(static_cast<std::size_t>(lo.size()));
    for (Eigen::Index k = 0; k < lo.size(); ++k)
        ids.push_back(p.add_variable(name + "[" + std::to_string(k + 1) + "]", lo[k], hi[k]));
    return ids;
}

/// Rows of P x <= p with more than one nonzero; single-entry rows are already
/// enforced by the variable bounds taken from the state box.
inline void add_polytope_rows(milp::MilpProblem& prob, const AdmissibleSets& sets, const std::vector<int>& x,
                              const std::string& tag) {
    for (Eigen::Index r = 0; r < sets.P.rows(); ++r) {
        std::vector<milp::Term> terms;
        for (Eigen::Index j = 0; j < sets.P.cols(); ++j)
            if (sets.P(r, j) != 0.0) terms.push_back({x[static_cast<std::size_t>(j)], sets.P(r, j)});
        if (terms.size() > 1) prob.add_constraint(terms, milp::Relation::LessEqual, sets.p[r], tag);
    }
}

/// Appends coef * M.row(k) * vars to terms, skipping zeros.
inline void append_row(std::vector<milp::Term>& terms, const Eigen::MatrixXd& m, Eigen::Index k,
                       const std::vector<int>& vars, double coef) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        if (m(k, c) != 0.0) terms.push_back({vars[static_cast<std::size_t>(c)], coef * m(k, c)});
}

inline bool shares_dynamics(const SwaModel& m) {
    for (const auto& md : m.modes)
        if (md.A != m.modes.front().A || md.B != m.modes.front().B) return false;
    return true;
}

inline bool shares_outputs(const SwaModel& m) {
    for (const auto& md : m.modes)
        if (md.C != m.modes.front().C || md.D != m.modes.front().D) return false;
    return true;
}

/// Interval-arithmetic slack range, padded so rounding never cuts off a value
/// that is exactly attainable (such as s = 0 at an interval endpoint).
inline std::pair<double, double> slack_bounds(double lo, double hi) {
    return {lo - 1e-9 * (1.0 + std::abs(lo)), hi + 1e-9 * (1.0 + std::abs(hi))};
}

}  // namespace swafdi::detail
