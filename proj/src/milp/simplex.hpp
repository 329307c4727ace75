#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

#include "swafdi/milp/problem.hpp"

namespace swafdi::milp::detail {

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, Free };

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, TimeLimit, NumericalFailure, Cutoff };

using Clock = std::chrono::steady_clock;

/// Bounded-variable simplex on a dense tableau.
///
/// Row i of the constraint matrix reads a_i x - w_i = 0 where the logical w_i carries
/// the row bounds, so every basis has a zero right-hand side and basic values follow
/// from x_B = -T_N x_N. Columns [0, n) are structural, [n, n + m) logical.
class BoundedSimplex {
public:
    explicit BoundedSimplex(const MilpProblem& problem);

    int num_structural() const { return n_; }
    int num_rows() const { return m_; }

    double lower(int j) const { return lo_[static_cast<std::size_t>(j)]; }
    double upper(int j) const { return hi_[static_cast<std::size_t>(j)]; }
    void set_bounds(int j, double lower, double upper);

    /// Structural cost vector (length n).
    void set_cost(std::span<const double> cost);

    LpStatus solve_primal(long max_iterations, Clock::time_point deadline);
    /// Requires a dual feasible basis; call restore_dual_feasibility() first.
    LpStatus solve_dual(long max_iterations, Clock::time_point deadline, double cutoff = kInf);

    /// Moves nonbasic variables to the bound matching their reduced-cost sign.
    /// Returns false when that needs an infinite bound.
    bool restore_dual_feasibility();

    double objective() const;
    /// A valid lower bound on the LP optimum from the current basis multipliers, or -inf.
    double lagrangian_bound() const;
    std::vector<double> structural_values() const;
    double value(int j) const { return x_[static_cast<std::size_t>(j)]; }
    long iterations() const { return iterations_; }

    /// Largest violation of a_i x - w_i = 0 with the current values.
    double row_residual() const;
    void reinvert();

private:
    bool basic_infeasible(int i, double tol) const;
    bool certify_infeasible(const Eigen::RowVectorXd& y) const;
    void pivot(int row, int col);
    void recompute_basic_values();
    void recompute_reduced_costs();
    void reset_to_slack_basis();
    void place_nonbasic(int j);
    int choose_dual_entering(int row, bool to_lower, bool bland) const;

    int m_ = 0;
    int n_ = 0;
    Eigen::SparseMatrix<double> a_;  // m x n structural columns
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> tab_;
    Eigen::RowVectorXd d_;
    std::vector<double> lo_, hi_, x_, cost_;
    std::vector<int> head_;
    std::vector<int> row_of_;
    std::vector<VarState> state_;
    long iterations_ = 0;
    long pivots_since_reinvert_ = 0;
};

}  // namespace swafdi::milp::detail
