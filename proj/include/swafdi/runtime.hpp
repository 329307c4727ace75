#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swafdi/indices.hpp"
#include "swafdi/invalidation.hpp"

namespace swafdi {

enum class BankState { Nominal, Detected, Isolated };
enum class IsolationMode { Plain, Adaptive };

const char* to_string(BankState state);

struct RuntimeOptions {
    IsolationMode mode = IsolationMode::Plain;
    CheckOptions check;
    /// Fault monitors solved concurrently per step.
    int jobs = 1;
};

/// Pairwise index between two faults that both match the data.
struct Likelihood {
    int first = 0;
    int second = 0;
    double delta_star = 0.0;
};

struct FdiVerdict {
    int t = 0;
    int H = 0;
    /// 1..N_f when isolated, 0 when no fault model matches; empty while undecided.
    std::optional<int> F;
    std::vector<int> alive;  // fault models matching the data at this step (1-based)
    std::vector<Likelihood> likelihoods;
    bool unresolved = false;  // a solver hit its limit; the verdict is not a certificate
};

/// The online monitor bank: nominal monitor over the last T samples, fault monitors
/// over their own windows once the nominal model is invalidated.
class MonitorBank {
public:
    MonitorBank(SwaModel system, std::vector<SwaModel> faults, FdiIndices indices, RuntimeOptions options = {});

    FdiVerdict step(const Eigen::VectorXd& u, const Eigen::VectorXd& y);

    BankState state() const { return state_; }
    std::optional<int> detection_time() const { return t_detect_; }
    std::optional<int> isolation_time() const { return t_isolate_; }
    std::optional<int> isolated_fault() const { return isolated_; }
    int capacity() const { return capacity_; }
    int buffered() const { return static_cast<int>(buffer_.outputs.size()); }

private:
    Trajectory last(int len) const;
    std::vector<InvalidationStatus> check_faults(const std::vector<int>& which, const std::vector<int>& windows);
    std::vector<Likelihood> likelihoods(const std::vector<int>& alive) const;
    void plain_isolation(FdiVerdict& v);
    void adaptive_isolation(FdiVerdict& v);

    SwaModel system_;
    std::vector<SwaModel> faults_;
    FdiIndices indices_;
    RuntimeOptions options_;
    int capacity_ = 1;
    Trajectory buffer_;
    int t_ = -1;
    BankState state_ = BankState::Nominal;
    std::optional<int> t_detect_, t_isolate_, isolated_;
    std::vector<bool> alive_;  // adaptive elimination state
};

struct RunLog {
    std::vector<FdiVerdict> steps;
    std::optional<int> t_detect;
    std::optional<int> t_isolate;
    std::optional<int> fault;  // final isolation verdict (0 = no match)
    std::optional<int> t_star;
    std::optional<int> tau_T;
    std::optional<int> tau_I;
    int unresolved_steps = 0;
};

/// Replays a recorded trajectory through a fresh bank. When t_star is given the delays
/// are measured; the bank itself never sees it.
RunLog run_offline(const SwaModel& system, const std::vector<SwaModel>& faults, const Trajectory& data,
                   const FdiIndices& indices, const RuntimeOptions& options = {},
                   std::optional<int> t_star = std::nullopt);

/// Per-step log t,H,F,alive_set,tau_T,tau_I,status.
void write_verdict_csv(const RunLog& log, std::ostream& out);
nlohmann::json run_summary(const RunLog& log);

}  // namespace swafdi
