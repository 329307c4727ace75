#include "swafdi/simulate.hpp"

#include <cstdio>
#include <random>
#include <sstream>

namespace swafdi {

namespace {

bool inside(const Eigen::MatrixXd& P, const Eigen::VectorXd& p, const Eigen::VectorXd& x, double tol) {
    return ((P * x - p).array() <= tol).all();
}

class ModeChooser {
public:
    ModeChooser(const ModePolicy& policy, std::mt19937_64& rng) : policy_(policy), rng_(rng) {
        if (const auto* th = std::get_if<Thermostat>(&policy_)) on_ = th->start_on;
    }

    int next(int t, int num_modes, const Eigen::VectorXd& x) {
        if (const auto* fixed = std::get_if<FixedModes>(&policy_)) {
            if (fixed->sequence.empty()) throw SimulationError("fixed mode sequence is empty");
            const int m = fixed->sequence[static_cast<std::size_t>(t) % fixed->sequence.size()];
            if (m < 0 || m >= num_modes) throw SimulationError("mode index out of range in fixed sequence");
            return m;
        }
        if (std::holds_alternative<RandomModes>(policy_)) {
            std::uniform_int_distribution<int> pick(0, num_modes - 1);
            return pick(rng_);
        }
        const auto& th = std::get<Thermostat>(policy_);
        if (th.state < 0 || th.state >= x.size() || th.on_mode >= num_modes || th.off_mode >= num_modes)
            throw SimulationError("thermostat refers to a missing state or mode");
        if (x[th.state] >= th.upper) on_ = true;
        else if (x[th.state] <= th.lower) on_ = false;
        return on_ ? th.on_mode : th.off_mode;
    }

private:
    const ModePolicy& policy_;
    std::mt19937_64& rng_;
    bool on_ = false;
};

Eigen::VectorXd uniform_box(std::mt19937_64& rng, const Eigen::VectorXd& bound, double scale) {
    Eigen::VectorXd v(bound.size());
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (Eigen::Index i = 0; i < bound.size(); ++i) {
        // Always draw so that the random stream does not depend on the bounds.
        const double r = unit(rng);
        v[i] = bound[i] > 0.0 ? scale * bound[i] * r : 0.0;
    }
    return v;
}

constexpr int kRedraws = 2000;

}  // namespace

Eigen::VectorXd project_onto_polytope(const Eigen::MatrixXd& P, const Eigen::VectorXd& p, const Eigen::VectorXd& x) {
    if (inside(P, p, x, 0.0)) return x;
    const auto rows = P.rows();
    Eigen::VectorXd z = x;
    Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(x.size(), rows);
    for (int sweep = 0; sweep < 5000; ++sweep) {
        Eigen::VectorXd before = z;
        for (Eigen::Index r = 0; r < rows; ++r) {
            const Eigen::VectorXd w = z + corr.col(r);
            const double nn = P.row(r).squaredNorm();
            const double excess = P.row(r).dot(w) - p[r];
            Eigen::VectorXd proj = w;
            if (excess > 0.0 && nn > 0.0) proj -= (excess / nn) * P.row(r).transpose();
            corr.col(r) = w - proj;
            z = proj;
        }
        if ((z - before).lpNorm<Eigen::Infinity>() < 1e-13 && inside(P, p, z, 1e-12)) break;
    }
    // Finish exactly on the feasible side of any row still violated by rounding.
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double excess = P.row(r).dot(z) - p[r];
        const double nn = P.row(r).squaredNorm();
        if (excess > 0.0 && nn > 0.0) z -= (excess / nn) * P.row(r).transpose();
    }
    return z;
}

SimResult simulate(const SwaModel& model, const SimConfig& cfg) {
    require_valid(model);
    if (cfg.steps < 1) throw SimulationError("simulation needs at least one step");
    if (cfg.initial_state.size() != model.n) throw SimulationError("initial state has wrong dimension");
    if (!inside(model.sets.P, model.sets.p, cfg.initial_state, 1e-9))
        throw SimulationError("initial state lies outside the state polytope");
    if (cfg.fault) {
        require_valid(cfg.fault->model);
        if (!same_interface(model, cfg.fault->model)) throw SimulationError("fault model has a different interface");
        if (cfg.fault->t_star < 0 || cfg.fault->t_star >= cfg.steps)
            throw SimulationError("fault injection time must satisfy 0 <= t* < N");
    }

    std::mt19937_64 rng(cfg.seed);
    ModeChooser chooser(cfg.mode_policy, rng);
    SimResult out;
    Eigen::VectorXd x = cfg.initial_state;
    for (int t = 0; t < cfg.steps; ++t) {
        const bool faulty = cfg.fault && t >= cfg.fault->t_star;
        const SwaModel& active = faulty ? cfg.fault->model : model;
        const int sigma = chooser.next(t, active.num_modes(), x);
        const Mode& md = active.modes[static_cast<std::size_t>(sigma)];

        const auto* fixed = std::get_if<FixedInputs>(&cfg.input_policy);
        if (fixed && model.n_u > 0 && fixed->sequence.empty()) throw SimulationError("fixed input sequence is empty");
        auto draw_input = [&] {
            if (model.n_u == 0) return Eigen::VectorXd(Eigen::VectorXd::Zero(0));
            if (!fixed) return uniform_box(rng, Eigen::VectorXd::Constant(model.n_u, *model.sets.input_bound), 1.0);
            Eigen::VectorXd u = fixed->sequence[static_cast<std::size_t>(t) % fixed->sequence.size()];
            if (u.size() != model.n_u) throw SimulationError("fixed input has wrong dimension");
            if (u.lpNorm<Eigen::Infinity>() > *model.sets.input_bound + 1e-12)
                throw SimulationError("fixed input exceeds the input bound");
            return u;
        };
        const SwaModel& next_model = (cfg.fault && t + 1 >= cfg.fault->t_star) ? cfg.fault->model : model;
        auto contained = [&](const Eigen::VectorXd& z) { return inside(next_model.sets.P, next_model.sets.p, z, 1e-9); };

        // Inputs and process noise are redrawn until the successor stays in X, so the
        // data remain in the behavior set; this conditions the uniform draws on containment.
        Eigen::VectorXd u = draw_input();
        Eigen::VectorXd nu = uniform_box(rng, active.sets.eps_nu, cfg.noise_scale);
        Eigen::VectorXd next = md.A * x + md.B * u + md.f + nu;
        for (int attempt = 0; attempt < kRedraws && !contained(next); ++attempt) {
            u = draw_input();
            nu = uniform_box(rng, active.sets.eps_nu, cfg.noise_scale);
            next = md.A * x + md.B * u + md.f + nu;
        }
        if (!contained(next) && model.n_u > 0 && !fixed) {
            for (double shrink = 0.5; shrink > 1e-6 && !contained(next); shrink *= 0.5) {
                u *= 0.5;
                next = md.A * x + md.B * u + md.f + nu;
            }
            if (!contained(next)) {
                u.setZero();
                next = md.A * x + md.f + nu;
            }
        }
        const Eigen::VectorXd eta = uniform_box(rng, active.sets.eps_eta, cfg.noise_scale);

        const Eigen::VectorXd y = md.C * x + md.D * u + md.g + eta;
        out.data.push_back(u, y);
        out.modes.push_back(sigma);
        out.states.push_back(x);
        out.faulty.push_back(faulty);

        if (!contained(next)) {
            if (!cfg.project)
                throw SimulationError("state left the admissible polytope at t=" + std::to_string(t + 1));
            next = project_onto_polytope(next_model.sets.P, next_model.sets.p, next);
            ++out.projections;
        }
        x = next;
    }
    if (out.projections > 0)
        std::fprintf(stderr, "warning: state projected onto the polytope at %d step(s)\n", out.projections);
    return out;
}

void write_sidecar_csv(const SimResult& result, std::ostream& out) {
    const auto n = result.states.empty() ? 0 : result.states.front().size();
    out << "t,mode,faulty";
    for (Eigen::Index i = 1; i <= n; ++i) out << ",x_" << i;
    out << '\n';
    char buf[40];
    for (std::size_t t = 0; t < result.states.size(); ++t) {
        out << t << ',' << result.modes[t] + 1 << ',' << (result.faulty[t] ? 1 : 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", result.states[t][i]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

std::vector<bool> read_sidecar_faulty(std::istream& in) {
    std::string line;
    std::vector<bool> flags;
    if (!std::getline(in, line)) return flags;
    int column = -1;
    {
        std::stringstream header(line);
        std::string cell;
        for (int c = 0; std::getline(header, cell, ','); ++c)
            if (cell == "faulty") column = c;
    }
    if (column < 0) throw SimulationError("sidecar has no 'faulty' column");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        for (int c = 0; std::getline(row, cell, ','); ++c)
            if (c == column) flags.push_back(cell == "1");
    }
    return flags;
}

int fault_onset(const std::vector<bool>& faulty) {
    for (std::size_t t = 0; t < faulty.size(); ++t)
        if (faulty[t]) return static_cast<int>(t);
    return -1;
}

}  // namespace swafdi
