#include "swafdi/model.hpp"

#include <cmath>
#include <sstream>

#include "swafdi/milp/problem.hpp"

namespace swafdi {

namespace {

std::string shape(const Eigen::MatrixXd& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void check_matrix(std::vector<std::string>& out, const std::string& what, const Eigen::MatrixXd& m, int rows,
                  int cols) {
    if (m.rows() != rows || m.cols() != cols) {
        out.push_back(what + " is " + shape(m) + ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
        return;
    }
    if (!m.allFinite()) out.push_back(what + " has non-finite entries");
}

void check_bound(std::vector<std::string>& out, const std::string& what, const Eigen::VectorXd& v, int len) {
    if (v.size() != len) {
        out.push_back(what + " has length " + std::to_string(v.size()) + ", expected " + std::to_string(len));
        return;
    }
    if (!v.allFinite() || (v.array() < 0.0).any()) out.push_back(what + " must be finite and nonnegative");
}

}  // namespace

std::vector<std::string> validate_model(const SwaModel& model) {
    std::vector<std::string> errors;
    const int n = model.n;
    const int nu = model.n_u;
    const int ny = model.n_y;
    if (n < 1 || nu < 0 || ny < 1) {
        errors.push_back("dimensions must satisfy n >= 1, n_u >= 0, n_y >= 1");
        return errors;
    }
    if (model.modes.empty()) errors.push_back("model has no modes");
    for (std::size_t i = 0; i < model.modes.size(); ++i) {
        const auto& md = model.modes[i];
        const std::string tag = "mode " + std::to_string(i + 1) + ": ";
        check_matrix(errors, tag + "A", md.A, n, n);
        check_matrix(errors, tag + "B", md.B, n, nu);
        check_matrix(errors, tag + "C", md.C, ny, n);
        check_matrix(errors, tag + "D", md.D, ny, nu);
        check_matrix(errors, tag + "f", md.f, n, 1);
        check_matrix(errors, tag + "g", md.g, ny, 1);
    }
    const auto& s = model.sets;
    if (s.P.cols() != n || s.P.rows() != s.p.size() || s.P.rows() == 0) {
        errors.push_back("state polytope P is " + shape(s.P) + " with p of length " + std::to_string(s.p.size()));
    } else if (!s.P.allFinite() || !s.p.allFinite()) {
        errors.push_back("state polytope has non-finite entries");
    }
    check_bound(errors, "eps_eta", s.eps_eta, ny);
    check_bound(errors, "eps_nu", s.eps_nu, n);
    if (s.input_bound) {
        if (!std::isfinite(*s.input_bound) || *s.input_bound < 0.0) errors.push_back("input bound U must be >= 0");
    } else if (nu > 0) {
        errors.push_back("model declares inputs but has no input bound");
    }
    if (errors.empty()) {
        try {
            (void)state_box(model);
        } catch (const ModelError& e) {
            errors.emplace_back(e.what());
        }
    }
    return errors;
}

void require_valid(const SwaModel& model) {
    const auto errors = validate_model(model);
    if (errors.empty()) return;
    std::ostringstream msg;
    msg << "invalid model";
    if (!model.name.empty()) msg << " '" << model.name << "'";
    for (const auto& e : errors) msg << "; " << e;
    throw ModelError(msg.str());
}

bool same_interface(const SwaModel& a, const SwaModel& b) {
    return a.n == b.n && a.n_u == b.n_u && a.n_y == b.n_y;
}

StateBox state_box(const SwaModel& model) {
    const auto& P = model.sets.P;
    const auto& p = model.sets.p;
    const int n = static_cast<int>(P.cols());
    StateBox box{Eigen::VectorXd::Constant(n, -milp::kInf), Eigen::VectorXd::Constant(n, milp::kInf)};

    // Single-entry rows are plain bounds; anything else needs the LP.
    bool general = false;
    for (int r = 0; r < P.rows(); ++r) {
        int count = 0;
        int col = -1;
        for (int j = 0; j < n; ++j)
            if (P(r, j) != 0.0) {
                ++count;
                col = j;
            }
        if (count == 0) {
            if (p[r] < 0.0) throw ModelError("state polytope is empty (row 0 <= negative)");
            continue;
        }
        if (count > 1) {
            general = true;
            continue;
        }
        const double v = p[r] / P(r, col);
        if (P(r, col) > 0) box.upper[col] = std::min(box.upper[col], v);
        else box.lower[col] = std::max(box.lower[col], v);
    }
    if (general) {
        milp::MilpProblem lp;
        for (int j = 0; j < n; ++j) lp.add_variable("x" + std::to_string(j), box.lower[j], box.upper[j]);
        for (int r = 0; r < P.rows(); ++r) {
            std::vector<milp::Term> terms;
            for (int j = 0; j < n; ++j)
                if (P(r, j) != 0.0) terms.push_back({j, P(r, j)});
            if (terms.size() > 1) lp.add_constraint(terms, milp::Relation::LessEqual, p[r]);
        }
        for (int j = 0; j < n; ++j) {
            for (double sign : {1.0, -1.0}) {
                lp.set_objective({{j, sign}});
                const auto out = milp::lp_relax_solve(lp, 60.0);
                if (out.status == milp::SolveStatus::Infeasible) throw ModelError("state polytope is empty");
                if (out.status == milp::SolveStatus::Unbounded)
                    throw ModelError("state polytope is unbounded in coordinate " + std::to_string(j + 1));
                if (out.status != milp::SolveStatus::Optimal)
                    throw ModelError("could not bound the state polytope (LP failure)");
                if (sign > 0) box.lower[j] = std::max(box.lower[j], out.objective);
                else box.upper[j] = std::min(box.upper[j], -out.objective);
            }
        }
    }
    for (int j = 0; j < n; ++j) {
        if (!std::isfinite(box.lower[j]) || !std::isfinite(box.upper[j]))
            throw ModelError("state polytope is unbounded in coordinate " + std::to_string(j + 1));
        if (box.lower[j] > box.upper[j] + 1e-9) throw ModelError("state polytope is empty");
    }
    return box;
}

void set_box(AdmissibleSets& sets, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    const auto n = lower.size();
    sets.P.setZero(2 * n, n);
    sets.p.resize(2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        sets.P(j, j) = 1.0;
        sets.p[j] = upper[j];
        sets.P(n + j, j) = -1.0;
        sets.p[n + j] = -lower[j];
    }
}

Mode zero_mode(int n, int n_u, int n_y) {
    Mode m;
    m.A = Eigen::MatrixXd::Zero(n, n);
    m.B = Eigen::MatrixXd::Zero(n, n_u);
    m.C = Eigen::MatrixXd::Zero(n_y, n);
    m.D = Eigen::MatrixXd::Zero(n_y, n_u);
    m.f = Eigen::VectorXd::Zero(n);
    m.g = Eigen::VectorXd::Zero(n_y);
    return m;
}

SwaModel scale_noise(const SwaModel& model, double factor) {
    SwaModel out = model;
    out.sets.eps_eta *= factor;
    out.sets.eps_nu *= factor;
    return out;
}

std::vector<std::string> validate_trajectory(const SwaModel& model, const Trajectory& data) {
    std::vector<std::string> errors;
    if (data.empty()) errors.push_back("trajectory is empty");
    const bool inputs = model.n_u > 0;
    if (inputs && static_cast<int>(data.inputs.size()) != data.length())
        errors.push_back("trajectory has " + std::to_string(data.inputs.size()) + " inputs for " +
                         std::to_string(data.length()) + " outputs");
    if (!inputs && !data.inputs.empty()) errors.push_back("trajectory has inputs but the model has none");
    for (int t = 0; t < data.length(); ++t) {
        if (data.outputs[static_cast<std::size_t>(t)].size() != model.n_y) {
            errors.push_back("output at t=" + std::to_string(t) + " has wrong dimension");
            break;
        }
    }
    if (inputs) {
        const double U = model.sets.input_bound.value_or(0.0);
        for (std::size_t t = 0; t < data.inputs.size(); ++t) {
            const auto& u = data.inputs[t];
            if (u.size() != model.n_u) {
                errors.push_back("input at t=" + std::to_string(t) + " has wrong dimension");
                break;
            }
            if (u.lpNorm<Eigen::Infinity>() > U + 1e-12) {
                errors.push_back("input at t=" + std::to_string(t) + " exceeds the input bound");
                break;
            }
        }
    }
    return errors;
}

}  // namespace swafdi
