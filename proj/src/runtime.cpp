#include "swafdi/runtime.hpp"

#include <algorithm>
#include <future>
#include <ostream>

namespace swafdi {

const char* to_string(BankState state) {
    switch (state) {
        case BankState::Nominal: return "NOMINAL";
        case BankState::Detected: return "DETECTED";
        case BankState::Isolated: return "ISOLATED";
    }
    return "?";
}

MonitorBank::MonitorBank(SwaModel system, std::vector<SwaModel> faults, FdiIndices indices, RuntimeOptions options)
    : system_(std::move(system)), faults_(std::move(faults)), indices_(std::move(indices)), options_(options) {
    require_valid(system_);
    if (faults_.empty()) throw ModelError("the fault library is empty");
    if (indices_.num_faults != static_cast<int>(faults_.size()))
        throw ModelError("indices were computed for " + std::to_string(indices_.num_faults) + " faults, library has " +
                         std::to_string(faults_.size()));
    for (const auto& f : faults_) {
        require_valid(f);
        if (!same_interface(system_, f)) throw ModelError("fault model '" + f.name + "' has a different interface");
    }
    capacity_ = indices_.detection_window();
    for (int j = 1; j <= indices_.num_faults; ++j) capacity_ = std::max(capacity_, indices_.window(j));
    alive_.assign(faults_.size(), true);
}

Trajectory MonitorBank::last(int len) const {
    const int n = buffered();
    len = std::min(len, n);
    return buffer_.window(n - len, len);
}

std::vector<InvalidationStatus> MonitorBank::check_faults(const std::vector<int>& which, const std::vector<int>& windows) {
    std::vector<InvalidationStatus> out(which.size(), InvalidationStatus::Unresolved);
    auto solve = [&](std::size_t k) {
        const SwaModel& m = faults_[static_cast<std::size_t>(which[k] - 1)];
        CheckOptions opts = options_.check;
        opts.dump_lp_path.clear();
        return check_invalidation(m, last(windows[k]), opts).status;
    };
    if (options_.jobs <= 1 || which.size() <= 1) {
        for (std::size_t k = 0; k < which.size(); ++k) out[k] = solve(k);
        return out;
    }
    // Monitors only read the buffer, so they can run side by side.
    std::size_t k = 0;
    while (k < which.size()) {
        std::vector<std::future<InvalidationStatus>> batch;
        const std::size_t end = std::min(which.size(), k + static_cast<std::size_t>(options_.jobs));
        for (std::size_t i = k; i < end; ++i) batch.push_back(std::async(std::launch::async, solve, i));
        for (std::size_t i = k; i < end; ++i) out[i] = batch[i - k].get();
        k = end;
    }
    return out;
}

std::vector<Likelihood> MonitorBank::likelihoods(const std::vector<int>& alive) const {
    std::vector<Likelihood> out;
    for (std::size_t a = 0; a < alive.size(); ++a)
        for (std::size_t b = a + 1; b < alive.size(); ++b)
            out.push_back({alive[a], alive[b], indices_.pair(alive[a], alive[b]).last_delta_star});
    return out;
}

void MonitorBank::plain_isolation(FdiVerdict& v) {
    std::vector<int> which, windows;
    bool all_post = true;
    for (int j = 1; j <= static_cast<int>(faults_.size()); ++j) {
        which.push_back(j);
        const int w = indices_.window(j);
        windows.push_back(w);
        if (t_ - w + 1 < *t_detect_) all_post = false;
    }
    const auto res = check_faults(which, windows);
    for (std::size_t k = 0; k < res.size(); ++k) {
        if (res[k] == InvalidationStatus::NotInvalidated) v.alive.push_back(which[k]);
        if (res[k] == InvalidationStatus::Unresolved) v.unresolved = true;
    }
    if (!v.unresolved && v.alive.size() == 1) v.F = v.alive.front();
    else if (!v.unresolved && v.alive.empty() && all_post) v.F = 0;
    v.likelihoods = likelihoods(v.alive);

    if (v.F && *v.F > 0) {
        if (isolated_ != v.F) {
            isolated_ = v.F;
            t_isolate_ = t_;
        }
        state_ = BankState::Isolated;
    } else {
        isolated_.reset();
        t_isolate_.reset();
        state_ = BankState::Detected;
    }
}

void MonitorBank::adaptive_isolation(FdiVerdict& v) {
    if (state_ == BankState::Isolated || (isolated_ && *isolated_ == 0)) {
        v.F = isolated_;
        if (*isolated_ > 0) v.alive = {*isolated_};
        return;
    }
    // Only post-detection data; the horizon grows until the buffer is full.
    const int h = t_ - *t_detect_ + 1;
    std::vector<int> which, windows;
    for (int j = 1; j <= static_cast<int>(faults_.size()); ++j)
        if (alive_[static_cast<std::size_t>(j - 1)]) {
            which.push_back(j);
            windows.push_back(std::min(h, capacity_));
        }
    const auto res = check_faults(which, windows);
    for (std::size_t k = 0; k < res.size(); ++k) {
        if (res[k] == InvalidationStatus::Invalidated) alive_[static_cast<std::size_t>(which[k] - 1)] = false;
        if (res[k] == InvalidationStatus::Unresolved) v.unresolved = true;
    }
    for (int j = 1; j <= static_cast<int>(faults_.size()); ++j)
        if (alive_[static_cast<std::size_t>(j - 1)]) v.alive.push_back(j);
    v.likelihoods = likelihoods(v.alive);
    if (v.alive.empty()) {
        v.F = 0;
        isolated_ = 0;
        t_isolate_ = t_;
    } else if (v.alive.size() == 1 && !v.unresolved) {
        v.F = v.alive.front();
        isolated_ = v.F;
        t_isolate_ = t_;
        state_ = BankState::Isolated;
    }
}

FdiVerdict MonitorBank::step(const Eigen::VectorXd& u, const Eigen::VectorXd& y) {
    if (y.size() != system_.n_y || u.size() != system_.n_u) throw ModelError("sample has wrong dimension");
    ++t_;
    buffer_.push_back(u, y);
    if (buffered() > capacity_) {
        buffer_.outputs.erase(buffer_.outputs.begin());
        if (!buffer_.inputs.empty()) buffer_.inputs.erase(buffer_.inputs.begin());
    }

    FdiVerdict v;
    v.t = t_;
    if (state_ == BankState::Nominal) {
        const InvalidationResult r =
            check_invalidation(system_, last(indices_.detection_window()), [&] {
                CheckOptions o = options_.check;
                o.dump_lp_path.clear();
                return o;
            }());
        if (r.status == InvalidationStatus::Unresolved) {
            v.unresolved = true;
            return v;
        }
        if (r.status == InvalidationStatus::NotInvalidated) return v;
        t_detect_ = t_;
        state_ = BankState::Detected;
    }
    v.H = 1;
    if (options_.mode == IsolationMode::Plain) plain_isolation(v);
    else adaptive_isolation(v);
    return v;
}

RunLog run_offline(const SwaModel& system, const std::vector<SwaModel>& faults, const Trajectory& data,
                   const FdiIndices& indices, const RuntimeOptions& options, std::optional<int> t_star) {
    if (const auto problems = validate_trajectory(system, data); !problems.empty() && !data.empty())
        throw ModelError("trajectory does not fit the model: " + problems.front());
    RunLog log;
    log.t_star = t_star;
    MonitorBank bank(system, faults, indices, options);
    for (int t = 0; t < data.length(); ++t) {
        const Eigen::VectorXd u =
            system.n_u > 0 ? data.inputs[static_cast<std::size_t>(t)] : Eigen::VectorXd::Zero(0);
        log.steps.push_back(bank.step(u, data.outputs[static_cast<std::size_t>(t)]));
        if (log.steps.back().unresolved) ++log.unresolved_steps;
    }
    log.t_detect = bank.detection_time();
    log.t_isolate = bank.isolation_time();
    log.fault = log.steps.empty() ? std::nullopt : log.steps.back().F;
    if (log.fault && *log.fault == 0) log.t_isolate.reset();
    if (t_star) {
        if (log.t_detect) log.tau_T = *log.t_detect - *t_star;
        if (log.t_isolate && log.fault && *log.fault > 0) log.tau_I = *log.t_isolate - *t_star;
    }
    return log;
}

void write_verdict_csv(const RunLog& log, std::ostream& out) {
    out << "t,H,F,alive_set,tau_T,tau_I,status\n";
    for (const auto& v : log.steps) {
        out << v.t << ',' << v.H << ',';
        if (v.F) out << *v.F;
        else if (v.H) out << '-';
        out << ',';
        for (std::size_t k = 0; k < v.alive.size(); ++k) out << (k ? "|" : "") << v.alive[k];
        out << ',';
        if (log.tau_T && log.t_detect && v.t >= *log.t_detect) out << *log.tau_T;
        out << ',';
        if (log.tau_I && log.t_isolate && v.t >= *log.t_isolate) out << *log.tau_I;
        out << ',' << (v.unresolved ? "unresolved" : "ok") << '\n';
    }
}

nlohmann::json run_summary(const RunLog& log) {
    using nlohmann::json;
    auto opt = [](const std::optional<int>& v) { return v ? json(*v) : json(nullptr); };
    json j;
    j["steps"] = log.steps.size();
    j["t_detect"] = opt(log.t_detect);
    j["t_isolate"] = opt(log.t_isolate);
    j["fault"] = opt(log.fault);
    j["t_star"] = opt(log.t_star);
    j["tau_T"] = opt(log.tau_T);
    j["tau_I"] = opt(log.tau_I);
    j["false_alarm"] = log.t_star && log.t_detect ? json(*log.t_detect < *log.t_star) : json(nullptr);
    j["unresolved_steps"] = log.unresolved_steps;
    if (!log.steps.empty()) {
        const auto& v = log.steps.back();
        j["final_alive"] = v.alive;
        j["final_likelihoods"] = json::array();
        for (const auto& l : v.likelihoods)
            j["final_likelihoods"].push_back({{"pair", {l.first, l.second}}, {"delta_star", l.delta_star}});
    }
    return j;
}

}  // namespace swafdi
