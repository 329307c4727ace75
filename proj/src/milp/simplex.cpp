#include "simplex.hpp"

#include <algorithm>
#include <cmath>

namespace swafdi::milp::detail {

namespace {

constexpr double kPrimalTol = 1e-7;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-14;
constexpr long kMaintenanceInterval = 400;
constexpr int kBlandAfterStalls = 60;

bool finite(double v) { return std::isfinite(v); }

}  // namespace

BoundedSimplex::BoundedSimplex(const MilpProblem& problem) {
    n_ = problem.num_variables();
    m_ = problem.num_constraints();
    const int total = n_ + m_;

    std::vector<Eigen::Triplet<double>> triplets;
    for (int i = 0; i < m_; ++i)
        for (const auto& t : problem.constraints()[static_cast<std::size_t>(i)].terms)
            triplets.emplace_back(i, t.var, t.coef);
    a_.resize(m_, n_);
    a_.setFromTriplets(triplets.begin(), triplets.end());
    a_.makeCompressed();

    lo_.assign(static_cast<std::size_t>(total), 0.0);
    hi_.assign(static_cast<std::size_t>(total), 0.0);
    for (int j = 0; j < n_; ++j) {
        lo_[static_cast<std::size_t>(j)] = problem.variables()[static_cast<std::size_t>(j)].lower;
        hi_[static_cast<std::size_t>(j)] = problem.variables()[static_cast<std::size_t>(j)].upper;
    }
    // Logical bounds. A <= row gets its implied minimum activity as lower bound so that
    // as many columns as possible stay boxed.
    std::vector<double> min_act(static_cast<std::size_t>(m_), 0.0);
    for (int j = 0; j < n_; ++j) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(a_, j); it; ++it) {
            const double c = it.value();
            const double l = lo_[static_cast<std::size_t>(j)];
            const double h = hi_[static_cast<std::size_t>(j)];
            const double low = c > 0 ? c * l : c * h;
            min_act[static_cast<std::size_t>(it.row())] += std::isnan(low) ? 0.0 : low;
        }
    }
    for (int i = 0; i < m_; ++i) {
        const auto& c = problem.constraints()[static_cast<std::size_t>(i)];
        const auto k = static_cast<std::size_t>(n_ + i);
        hi_[k] = c.rhs;
        if (c.relation == Relation::Equal) {
            lo_[k] = c.rhs;
        } else {
            double l = min_act[static_cast<std::size_t>(i)];
            lo_[k] = finite(l) ? std::min(l, c.rhs) : -kInf;
        }
    }

    x_.assign(static_cast<std::size_t>(total), 0.0);
    cost_.assign(static_cast<std::size_t>(total), 0.0);
    state_.assign(static_cast<std::size_t>(total), VarState::AtLower);
    head_.assign(static_cast<std::size_t>(m_), -1);
    row_of_.assign(static_cast<std::size_t>(total), -1);
    reset_to_slack_basis();
}

void BoundedSimplex::reset_to_slack_basis() {
    const int total = n_ + m_;
    tab_.setZero(m_, total);
    tab_.leftCols(n_) = -Eigen::MatrixXd(a_);
    for (int i = 0; i < m_; ++i) tab_(i, n_ + i) = 1.0;
    std::fill(row_of_.begin(), row_of_.end(), -1);
    for (int i = 0; i < m_; ++i) {
        head_[static_cast<std::size_t>(i)] = n_ + i;
        row_of_[static_cast<std::size_t>(n_ + i)] = i;
        state_[static_cast<std::size_t>(n_ + i)] = VarState::Basic;
    }
    for (int j = 0; j < n_; ++j) {
        state_[static_cast<std::size_t>(j)] = VarState::AtLower;
        place_nonbasic(j);
    }
    recompute_reduced_costs();
    recompute_basic_values();
    pivots_since_reinvert_ = 0;
}

void BoundedSimplex::place_nonbasic(int j) {
    const auto k = static_cast<std::size_t>(j);
    const double l = lo_[k];
    const double h = hi_[k];
    VarState s = state_[k];
    if (s == VarState::AtLower && !finite(l)) s = finite(h) ? VarState::AtUpper : VarState::Free;
    if (s == VarState::AtUpper && !finite(h)) s = finite(l) ? VarState::AtLower : VarState::Free;
    if (s == VarState::Free && (finite(l) || finite(h))) s = finite(l) ? VarState::AtLower : VarState::AtUpper;
    state_[k] = s;
    x_[k] = s == VarState::AtLower ? l : s == VarState::AtUpper ? h : 0.0;
}

void BoundedSimplex::set_bounds(int j, double lower, double upper) {
    const auto k = static_cast<std::size_t>(j);
    lo_[k] = lower;
    hi_[k] = upper;
    if (state_[k] == VarState::Basic) return;
    const double old = x_[k];
    place_nonbasic(j);
    const double delta = x_[k] - old;
    if (delta != 0.0) {
        for (int i = 0; i < m_; ++i) {
            const double a = tab_(i, j);
            if (a != 0.0) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(i)])] -= a * delta;
        }
    }
}

void BoundedSimplex::set_cost(std::span<const double> cost) {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    std::copy(cost.begin(), cost.end(), cost_.begin());
    recompute_reduced_costs();
}

double BoundedSimplex::objective() const {
    double z = 0.0;
    for (int j = 0; j < n_; ++j) z += cost_[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
    return z;
}

double BoundedSimplex::lagrangian_bound() const {
    // With y = c_B B^-1 read off the tableau, c x = (c - y [A -I]) x on the constraint
    // set, so minimizing the right side over the box bounds the LP for any y.
    Eigen::RowVectorXd y = Eigen::RowVectorXd::Zero(m_);
    for (int i = 0; i < m_; ++i) {
        const int b = head_[static_cast<std::size_t>(i)];
        if (b < n_ && cost_[static_cast<std::size_t>(b)] != 0.0) y -= cost_[static_cast<std::size_t>(b)] * tab_.row(i).tail(m_);
    }
    double bound = 0.0;
    auto add = [&](double r, std::size_t k) {
        if (std::abs(r) <= 1e-12) r = 0.0;
        if (r == 0.0) return;
        bound += r * (r > 0 ? lo_[k] : hi_[k]);
    };
    for (int j = 0; j < n_; ++j) {
        double r = cost_[static_cast<std::size_t>(j)];
        for (Eigen::SparseMatrix<double>::InnerIterator it(a_, j); it; ++it) r -= y[it.row()] * it.value();
        add(r, static_cast<std::size_t>(j));
    }
    for (int i = 0; i < m_; ++i) add(y[i], static_cast<std::size_t>(n_ + i));
    return std::isnan(bound) ? -kInf : bound;
}

std::vector<double> BoundedSimplex::structural_values() const {
    return {x_.begin(), x_.begin() + n_};
}

void BoundedSimplex::recompute_basic_values() {
    const int total = n_ + m_;
    Eigen::VectorXd xn(total);
    for (int j = 0; j < total; ++j)
        xn[j] = state_[static_cast<std::size_t>(j)] == VarState::Basic ? 0.0 : x_[static_cast<std::size_t>(j)];
    const Eigen::VectorXd xb = -(tab_ * xn);
    for (int i = 0; i < m_; ++i) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(i)])] = xb[i];
}

void BoundedSimplex::recompute_reduced_costs() {
    const int total = n_ + m_;
    Eigen::RowVectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb[i] = cost_[static_cast<std::size_t>(head_[static_cast<std::size_t>(i)])];
    d_ = Eigen::Map<const Eigen::RowVectorXd>(cost_.data(), total) - cb * tab_;
    for (int i = 0; i < m_; ++i) d_[head_[static_cast<std::size_t>(i)]] = 0.0;
}

double BoundedSimplex::row_residual() const {
    Eigen::VectorXd xs(n_);
    for (int j = 0; j < n_; ++j) xs[j] = x_[static_cast<std::size_t>(j)];
    const Eigen::VectorXd act = a_ * xs;
    double worst = 0.0;
    for (int i = 0; i < m_; ++i) {
        const double scale = 1.0 + std::abs(x_[static_cast<std::size_t>(n_ + i)]);
        worst = std::max(worst, std::abs(act[i] - x_[static_cast<std::size_t>(n_ + i)]) / scale);
    }
    return worst;
}

void BoundedSimplex::reinvert() {
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) {
        const int col = head_[static_cast<std::size_t>(i)];
        if (col < n_) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(a_, col); it; ++it) basis(it.row(), i) = it.value();
        } else {
            basis(col - n_, i) = -1.0;
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
    if (!(std::abs(lu.determinant()) > 0.0) || lu.rcond() < 1e-13) {
        reset_to_slack_basis();
        return;
    }
    const Eigen::MatrixXd inv = lu.inverse();
    tab_.leftCols(n_) = inv * a_;
    tab_.rightCols(m_) = -inv;
    // Basic columns are exactly the identity.
    for (int i = 0; i < m_; ++i) {
        const int col = head_[static_cast<std::size_t>(i)];
        tab_.col(col).setZero();
        tab_(i, col) = 1.0;
    }
    recompute_reduced_costs();
    recompute_basic_values();
    pivots_since_reinvert_ = 0;
}

void BoundedSimplex::pivot(int row, int col) {
    const int total = n_ + m_;
    const double piv = tab_(row, col);
    tab_.row(row) /= piv;
    tab_(row, col) = 1.0;

    std::vector<int> nz;
    nz.reserve(static_cast<std::size_t>(total));
    const double* prow = tab_.row(row).data();
    for (int j = 0; j < total; ++j)
        if (std::abs(prow[j]) > kDropTol) nz.push_back(j);
    const bool sparse = static_cast<int>(nz.size()) * 3 < total;

    for (int i = 0; i < m_; ++i) {
        if (i == row) continue;
        const double f = tab_(i, col);
        if (std::abs(f) <= kDropTol) {
            tab_(i, col) = 0.0;
            continue;
        }
        if (sparse) {
            double* r = tab_.row(i).data();
            for (int j : nz) r[j] -= f * prow[j];
        } else {
            tab_.row(i).noalias() -= f * tab_.row(row);
        }
        tab_(i, col) = 0.0;
    }
    const double dq = d_[col];
    if (dq != 0.0) {
        if (sparse) {
            for (int j : nz) d_[j] -= dq * prow[j];
        } else {
            d_.noalias() -= dq * tab_.row(row);
        }
    }
    d_[col] = 0.0;

    const int leaving = head_[static_cast<std::size_t>(row)];
    row_of_[static_cast<std::size_t>(leaving)] = -1;
    head_[static_cast<std::size_t>(row)] = col;
    row_of_[static_cast<std::size_t>(col)] = row;
    state_[static_cast<std::size_t>(col)] = VarState::Basic;
    ++pivots_since_reinvert_;
}

bool BoundedSimplex::basic_infeasible(int i, double tol) const {
    const auto b = static_cast<std::size_t>(head_[static_cast<std::size_t>(i)]);
    return x_[b] < lo_[b] - tol || x_[b] > hi_[b] + tol;
}

bool BoundedSimplex::certify_infeasible(const Eigen::RowVectorXd& y) const {
    // y^T (A x - w) = 0 holds for every point; the range of its left side over the box
    // must contain zero for the LP to be feasible. Valid for any y, however inaccurate.
    double lo = 0.0, hi = 0.0, scale = 0.0;
    auto add = [&](double c, std::size_t k) {
        if (c == 0.0) return;
        const double a = c > 0 ? lo_[k] : hi_[k];
        const double b = c > 0 ? hi_[k] : lo_[k];
        lo += c * a;
        hi += c * b;
        if (finite(a)) scale = std::max(scale, std::abs(c * a));
        if (finite(b)) scale = std::max(scale, std::abs(c * b));
    };
    for (int j = 0; j < n_; ++j) {
        double c = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(a_, j); it; ++it) c += y[it.row()] * it.value();
        add(c, static_cast<std::size_t>(j));
    }
    for (int i = 0; i < m_; ++i) add(-y[i], static_cast<std::size_t>(n_ + i));
    const double tol = 1e-9 * scale + kPrimalTol;
    return lo > tol || hi < -tol;
}

LpStatus BoundedSimplex::solve_primal(long max_iterations, Clock::time_point deadline) {
    const int total = n_ + m_;
    recompute_basic_values();
    Eigen::RowVectorXd phase_d(total);
    int degenerate_run = 0;
    long maintenance_mark = iterations_;

    for (long it = 0;; ++it) {
        if (it >= max_iterations) return LpStatus::IterationLimit;
        if ((it & 63) == 0 && Clock::now() > deadline) return LpStatus::TimeLimit;
        if (iterations_ - maintenance_mark >= kMaintenanceInterval) {
            maintenance_mark = iterations_;
            recompute_basic_values();
            if (row_residual() > 1e-9) reinvert();
        }
        const bool bland = degenerate_run > kBlandAfterStalls;

        bool phase1 = false;
        phase_d.setZero();
        for (int i = 0; i < m_; ++i) {
            const auto b = static_cast<std::size_t>(head_[static_cast<std::size_t>(i)]);
            double sign = 0.0;
            if (x_[b] < lo_[b] - kPrimalTol) sign = -1.0;
            else if (x_[b] > hi_[b] + kPrimalTol) sign = 1.0;
            if (sign != 0.0) {
                phase1 = true;
                phase_d.noalias() -= sign * tab_.row(i);
            }
        }
        if (phase1)
            for (int i = 0; i < m_; ++i) phase_d[head_[static_cast<std::size_t>(i)]] = 0.0;
        const Eigen::RowVectorXd& dj = phase1 ? phase_d : d_;

        // Pricing.
        int enter = -1;
        double enter_dir = 0.0;
        double best = 0.0;
        for (int j = 0; j < total; ++j) {
            const auto k = static_cast<std::size_t>(j);
            const VarState s = state_[k];
            if (s == VarState::Basic || lo_[k] == hi_[k]) continue;
            const double d = dj[j];
            double dir = 0.0;
            if (d < -kDualTol && (s == VarState::AtLower || s == VarState::Free)) dir = 1.0;
            else if (d > kDualTol && (s == VarState::AtUpper || s == VarState::Free)) dir = -1.0;
            if (dir == 0.0) continue;
            if (bland) {
                enter = j;
                enter_dir = dir;
                break;
            }
            if (std::abs(d) > best) {
                best = std::abs(d);
                enter = j;
                enter_dir = dir;
            }
        }
        if (enter < 0) {
            if (phase1) {
                recompute_basic_values();
                bool still = false;
                for (int i = 0; i < m_ && !still; ++i) still = basic_infeasible(i, kPrimalTol);
                if (!still) continue;
                Eigen::RowVectorXd y = Eigen::RowVectorXd::Zero(m_);
                for (int i = 0; i < m_; ++i) {
                    const auto b = static_cast<std::size_t>(head_[static_cast<std::size_t>(i)]);
                    if (x_[b] < lo_[b] - kPrimalTol) y -= tab_.row(i).tail(m_);
                    else if (x_[b] > hi_[b] + kPrimalTol) y += tab_.row(i).tail(m_);
                }
                if (certify_infeasible(y) || pivots_since_reinvert_ == 0) return LpStatus::Infeasible;
                reinvert();
                continue;
            }
            return LpStatus::Optimal;
        }

        // Ratio test (two-pass, Harris).
        const auto q = static_cast<std::size_t>(enter);
        const double flip = (finite(lo_[q]) && finite(hi_[q])) ? hi_[q] - lo_[q] : kInf;
        double relaxed_min = kInf;
        auto limit_for = [&](int i, double rate, double slack_tol, double& target) -> double {
            const auto b = static_cast<std::size_t>(head_[static_cast<std::size_t>(i)]);
            const double xb = x_[b];
            if (rate > 0.0) {
                if (phase1 && xb < lo_[b] - kPrimalTol) {
                    target = lo_[b];
                    return (lo_[b] - xb + slack_tol) / rate;
                }
                if (xb > hi_[b] + kPrimalTol || !finite(hi_[b])) return kInf;
                target = hi_[b];
                return (hi_[b] - xb + slack_tol) / rate;
            }
            if (phase1 && xb > hi_[b] + kPrimalTol) {
                target = hi_[b];
                return (xb - hi_[b] + slack_tol) / -rate;
            }
            if (xb < lo_[b] - kPrimalTol || !finite(lo_[b])) return kInf;
            target = lo_[b];
            return (xb - lo_[b] + slack_tol) / -rate;
        };
        double target = 0.0;
        for (int i = 0; i < m_; ++i) {
            const double rate = -tab_(i, enter) * enter_dir;
            if (std::abs(rate) <= kPivotTol) continue;
            relaxed_min = std::min(relaxed_min, limit_for(i, rate, bland ? 0.0 : kPrimalTol, target));
        }
        if (!finite(relaxed_min) && !finite(flip)) {
            if (phase1) return LpStatus::NumericalFailure;
            return LpStatus::Unbounded;
        }
        double step = 0.0;
        int leave_row = -1;
        double leave_target = 0.0;
        if (flip <= relaxed_min) {
            step = flip;
        } else {
            double best_rate = 0.0;
            double best_ratio = kInf;
            for (int i = 0; i < m_; ++i) {
                const double rate = -tab_(i, enter) * enter_dir;
                if (std::abs(rate) <= kPivotTol) continue;
                double tgt = 0.0;
                const double ratio = limit_for(i, rate, 0.0, tgt);
                if (ratio > relaxed_min) continue;
                const bool better = bland ? (ratio < best_ratio - 1e-15 ||
                                             (ratio <= best_ratio + 1e-15 && leave_row >= 0 &&
                                              head_[static_cast<std::size_t>(i)] < head_[static_cast<std::size_t>(leave_row)]))
                                          : std::abs(rate) > best_rate;
                if (leave_row < 0 || better) {
                    best_rate = std::abs(rate);
                    best_ratio = ratio;
                    leave_row = i;
                    leave_target = tgt;
                }
            }
            step = std::max(0.0, best_ratio);
        }

        ++iterations_;
        degenerate_run = step < 1e-12 ? degenerate_run + 1 : 0;
        x_[q] += enter_dir * step;
        if (step != 0.0) {
            for (int i = 0; i < m_; ++i) {
                const double a = tab_(i, enter);
                if (a != 0.0) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(i)])] -= a * enter_dir * step;
            }
        }
        if (leave_row < 0) {
            state_[q] = state_[q] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
            x_[q] = state_[q] == VarState::AtLower ? lo_[q] : hi_[q];
            continue;
        }
        const auto leaving = static_cast<std::size_t>(head_[static_cast<std::size_t>(leave_row)]);
        pivot(leave_row, enter);
        x_[leaving] = leave_target;
        state_[leaving] = leave_target == lo_[leaving] ? VarState::AtLower : VarState::AtUpper;
    }
}

bool BoundedSimplex::restore_dual_feasibility() {
    const int total = n_ + m_;
    bool ok = true;
    for (int j = 0; j < total; ++j) {
        const auto k = static_cast<std::size_t>(j);
        if (state_[k] == VarState::Basic) continue;
        const double d = d_[j];
        if (lo_[k] == hi_[k]) {
            state_[k] = VarState::AtLower;
        } else if (d > kDualTol) {
            if (!finite(lo_[k])) ok = false;
            state_[k] = VarState::AtLower;
        } else if (d < -kDualTol) {
            if (!finite(hi_[k])) ok = false;
            state_[k] = VarState::AtUpper;
        }
        place_nonbasic(j);
    }
    recompute_basic_values();
    return ok;
}

int BoundedSimplex::choose_dual_entering(int row, bool to_lower, bool bland) const {
    const int total = n_ + m_;
    const double* r = tab_.row(row).data();
    // Moving nonbasic j by +1 changes the leaving variable by -r[j].
    auto eligible = [&](int j, double& ratio, double& relaxed) -> bool {
        const auto k = static_cast<std::size_t>(j);
        const VarState s = state_[k];
        if (s == VarState::Basic || lo_[k] == hi_[k]) return false;
        const double a = r[j];
        if (std::abs(a) <= kPivotTol) return false;
        const double d = d_[j];
        // Increasing the leaving variable needs -a * dir > 0.
        const double want = to_lower ? 1.0 : -1.0;
        const bool can_up = s == VarState::AtLower || s == VarState::Free;
        const bool can_down = s == VarState::AtUpper || s == VarState::Free;
        double dir = 0.0;
        if (-a * want > 0.0 && can_up) dir = 1.0;
        else if (-a * want < 0.0 && can_down) dir = -1.0;
        if (dir == 0.0) return false;
        // Reduced cost slack in the direction of motion.
        const double slack = s == VarState::Free ? 0.0 : std::max(0.0, dir * d);
        ratio = slack / std::abs(a);
        relaxed = (slack + kDualTol) / std::abs(a);
        return true;
    };
    double relaxed_min = kInf;
    for (int j = 0; j < total; ++j) {
        double ratio = 0.0;
        double relaxed = 0.0;
        if (eligible(j, ratio, relaxed)) relaxed_min = std::min(relaxed_min, bland ? ratio : relaxed);
    }
    if (!finite(relaxed_min)) return -1;
    int best = -1;
    double best_abs = 0.0;
    for (int j = 0; j < total; ++j) {
        double ratio = 0.0;
        double relaxed = 0.0;
        if (!eligible(j, ratio, relaxed) || ratio > relaxed_min + (bland ? 1e-15 : 0.0)) continue;
        if (bland) return j;
        if (std::abs(r[j]) > best_abs) {
            best_abs = std::abs(r[j]);
            best = j;
        }
    }
    return best;
}

LpStatus BoundedSimplex::solve_dual(long max_iterations, Clock::time_point deadline, double cutoff) {
    int stalls = 0;
    double last = objective();
    long maintenance_mark = iterations_;
    for (long it = 0;; ++it) {
        if (it >= max_iterations) return LpStatus::IterationLimit;
        if ((it & 63) == 0 && Clock::now() > deadline) return LpStatus::TimeLimit;
        if (iterations_ - maintenance_mark >= kMaintenanceInterval) {
            maintenance_mark = iterations_;
            recompute_basic_values();
            if (row_residual() > 1e-9) reinvert();
        }
        const double z = objective();
        if (finite(cutoff) && z > cutoff) return lagrangian_bound() > cutoff ? LpStatus::Cutoff : LpStatus::NumericalFailure;
        stalls = z > last + 1e-12 ? 0 : stalls + 1;
        last = std::max(last, z);
        const bool bland = stalls > kBlandAfterStalls;

        int leave = -1;
        double worst = kPrimalTol;
        for (int i = 0; i < m_; ++i) {
            const auto b = static_cast<std::size_t>(head_[static_cast<std::size_t>(i)]);
            const double v = std::max(lo_[b] - x_[b], x_[b] - hi_[b]);
            if (v <= kPrimalTol) continue;
            if (bland) {
                if (leave < 0 || head_[static_cast<std::size_t>(i)] < head_[static_cast<std::size_t>(leave)]) leave = i;
            } else if (v > worst) {
                worst = v;
                leave = i;
            }
        }
        if (leave < 0) return LpStatus::Optimal;

        const auto b = static_cast<std::size_t>(head_[static_cast<std::size_t>(leave)]);
        const bool to_lower = x_[b] < lo_[b];
        const int enter = choose_dual_entering(leave, to_lower, bland);
        if (enter < 0) {
            // Confirm with every nonbasic entry (including tiny ones) that the bound is unreachable.
            const double* r = tab_.row(leave).data();
            double reach = 0.0;
            const int total = n_ + m_;
            for (int j = 0; j < total; ++j) {
                const auto k = static_cast<std::size_t>(j);
                if (state_[k] == VarState::Basic || r[j] == 0.0) continue;
                const double room = to_lower ? (r[j] < 0 ? hi_[k] - x_[k] : x_[k] - lo_[k])
                                             : (r[j] > 0 ? hi_[k] - x_[k] : x_[k] - lo_[k]);
                reach += std::abs(r[j]) * room;
                if (!finite(reach)) break;
            }
            const double gap = to_lower ? lo_[b] - x_[b] : x_[b] - hi_[b];
            if (!(reach < gap - kPrimalTol)) return LpStatus::NumericalFailure;
            // Drift in an updated tableau can fake the proof; the caller then falls back to primal.
            return certify_infeasible(-tab_.row(leave).tail(m_)) ? LpStatus::Infeasible : LpStatus::NumericalFailure;
        }
        const auto q = static_cast<std::size_t>(enter);
        const double target = to_lower ? lo_[b] : hi_[b];
        const double alpha = tab_(leave, enter);
        const double dxq = -(target - x_[b]) / alpha;
        x_[q] += dxq;
        for (int i = 0; i < m_; ++i) {
            const double a = tab_(i, enter);
            if (a != 0.0) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(i)])] -= a * dxq;
        }
        ++iterations_;
        pivot(leave, enter);
        x_[b] = target;
        state_[b] = to_lower ? VarState::AtLower : VarState::AtUpper;
    }
}

}  // namespace swafdi::milp::detail
