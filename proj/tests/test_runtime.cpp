#include <doctest.h>

#include <sstream>

#include "support.hpp"
#include "swafdi/runtime.hpp"
#include "swafdi/simulate.hpp"

using namespace swafdi;

namespace {

// Scalar models on a small box whose output offsets separate them in one sample.
SwaModel offset_model(double g) {
    return test::scalar_model({{0.5, 0.0, 1.0, 0.0, 0.0, g}, {-0.5, 0.0, 1.0, 0.0, 0.02, g}}, 0.1, 0.1, 0.02);
}

struct Library {
    SwaModel system = offset_model(0.0);
    std::vector<SwaModel> faults{offset_model(0.5), offset_model(-0.5)};
    FdiIndices indices;

    Library() {
        IndicesOptions o;
        o.search.T_max = 6;
        indices = compute_indices(system, faults, o);
    }
};

Trajectory run_sim(const SwaModel& g, int steps, std::uint64_t seed, std::optional<FaultInjection> fault = {}) {
    SimConfig cfg;
    cfg.steps = steps;
    cfg.seed = seed;
    cfg.initial_state = Eigen::VectorXd::Zero(g.n);
    cfg.fault = std::move(fault);
    return simulate(g, cfg).data;
}

}  // namespace

TEST_CASE("offset library indices are all one") {
    const Library lib;
    CHECK(lib.indices.T == 1);
    CHECK(lib.indices.I == 1);
    CHECK(lib.indices.K == 1);
}

TEST_CASE("a nominal stream never raises the flag") {
    const Library lib;
    const RunLog log = run_offline(lib.system, lib.faults, run_sim(lib.system, 200, 3), lib.indices);
    REQUIRE(log.steps.size() == 200);
    for (const auto& v : log.steps) {
        CHECK(v.H == 0);
        CHECK_FALSE(v.F);
        CHECK(v.alive.empty());
    }
    CHECK_FALSE(log.t_detect);
}

TEST_CASE("an in-library fault is detected and isolated within its bounds") {
    const Library lib;
    for (auto mode : {IsolationMode::Plain, IsolationMode::Adaptive})
        for (int k = 1; k <= 2; ++k) {
            const int t_star = 10;
            const Trajectory d = run_sim(lib.system, 25, 10 + k, FaultInjection{lib.faults[k - 1], t_star});
            RuntimeOptions ro;
            ro.mode = mode;
            ro.jobs = 2;
            const RunLog log = run_offline(lib.system, lib.faults, d, lib.indices, ro, t_star);
            REQUIRE(log.t_detect);
            CHECK(*log.tau_T >= 0);
            CHECK(*log.tau_T <= *lib.indices.T_j[k - 1]);
            CHECK(log.fault == k);
            REQUIRE(log.tau_I);
            CHECK(*log.tau_I <= *lib.indices.K_i[k - 1]);
            for (const auto& v : log.steps)
                if (v.F && *v.F > 0) CHECK(v.alive.size() == 1);
        }
}

TEST_CASE("a fault outside the library ends with F = 0") {
    const Library lib;
    const int t_star = 5;
    const Trajectory d = run_sim(lib.system, 15, 4, FaultInjection{offset_model(1.5), t_star});
    for (auto mode : {IsolationMode::Plain, IsolationMode::Adaptive}) {
        RuntimeOptions ro;
        ro.mode = mode;
        const RunLog log = run_offline(lib.system, lib.faults, d, lib.indices, ro, t_star);
        CHECK(log.t_detect == t_star);
        CHECK(log.fault == 0);
        CHECK(log.steps.back().alive.empty());
        CHECK_FALSE(log.tau_I);
    }
}

TEST_CASE("the buffer never exceeds the memory length") {
    const Library lib;
    MonitorBank bank(lib.system, lib.faults, lib.indices);
    const Trajectory d = run_sim(lib.system, 10, 1);
    for (int t = 0; t < 10; ++t) {
        bank.step(Eigen::VectorXd(), d.outputs[t]);
        CHECK(bank.buffered() <= bank.capacity());
    }
    CHECK(bank.capacity() == 1);
    CHECK(bank.state() == BankState::Nominal);
    CHECK_THROWS_AS(bank.step(Eigen::VectorXd(), Eigen::Vector2d::Zero()), ModelError);
}

TEST_CASE("a single-fault library isolates at the first post-detection check") {
    const SwaModel g = test::fixture("vi_a_system.json");
    const SwaModel f = test::fixture("vi_a_fault.json");
    FdiIndices idx;
    idx.num_faults = 1;
    idx.T_max = 20;
    IndexEntry e;
    e.first = 0;
    e.second = 1;
    e.outcome = SearchOutcome::Found;
    e.horizon = 12;
    idx.detection = {e};
    aggregate(idx);

    const int t_star = 8;
    const Trajectory d = run_sim(g, 24, 6, FaultInjection{f, t_star});
    RuntimeOptions ro;
    ro.mode = IsolationMode::Adaptive;
    const RunLog adaptive = run_offline(g, {f}, d, idx, ro, t_star);
    REQUIRE(adaptive.t_detect);
    CHECK(*adaptive.tau_T <= 12);
    CHECK(adaptive.t_isolate == adaptive.t_detect);
    CHECK(adaptive.fault == 1);

    const RunLog plain = run_offline(g, {f}, d, idx, {}, t_star);
    CHECK(plain.t_detect == adaptive.t_detect);
    REQUIRE(plain.tau_I);
    CHECK(*plain.tau_I <= 12);
    CHECK(*adaptive.tau_I <= *plain.tau_I);
}

TEST_CASE("empty trajectory gives an empty log") {
    const Library lib;
    const RunLog log = run_offline(lib.system, lib.faults, Trajectory{}, lib.indices);
    CHECK(log.steps.empty());
    std::stringstream ss;
    write_verdict_csv(log, ss);
    CHECK(ss.str() == "t,H,F,alive_set,tau_T,tau_I,status\n");
    CHECK(run_summary(log)["steps"] == 0);
}

TEST_CASE("verdict log columns") {
    const Library lib;
    const Trajectory d = run_sim(lib.system, 6, 2, FaultInjection{lib.faults[1], 3});
    const RunLog log = run_offline(lib.system, lib.faults, d, lib.indices, {}, 3);
    std::stringstream ss;
    write_verdict_csv(log, ss);
    std::string line;
    std::getline(ss, line);
    std::vector<std::string> rows;
    while (std::getline(ss, line)) rows.push_back(line);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == "0,0,,,,,ok");
    CHECK(rows[3] == "3,1,2,2,0,0,ok");
    const auto s = run_summary(log);
    CHECK(s["fault"] == 2);
    CHECK(s["false_alarm"] == false);
}

TEST_CASE("indices for another library size are rejected") {
    const Library lib;
    CHECK_THROWS_AS(MonitorBank(lib.system, {lib.faults[0]}, lib.indices), ModelError);
}
