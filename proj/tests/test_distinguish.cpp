#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "swafdi/distinguish.hpp"

using namespace swafdi;

namespace {

void check_index_bounds(const DistinguishResult& r) {
    if (!r.delta_bar) return;
    CHECK(*r.delta_bar >= 0.0);
    CHECK(*r.delta_bar <= r.delta_max + 1e-6);
    REQUIRE(r.delta_star);
    CHECK(*r.delta_star >= 0.0);
    CHECK(*r.delta_star <= 1.0);
}

}  // namespace

TEST_CASE("delta_max uses the max entries of each bound") {
    const SwaModel a = test::fixture("index_pair_a.json");
    const SwaModel b = test::fixture("index_pair_b.json");
    // eps_eta = 0.25 and eps_nu = 0.2 on both sides.
    CHECK(delta_max(a, b) == doctest::Approx(std::min(std::max(0.5, 0.4), 0.25 + 0.25)));
    const SwaModel g = test::fixture("vi_a_system.json");
    const SwaModel f = test::fixture("vi_a_fault.json");
    CHECK(delta_max(g, f) == doctest::Approx(0.1));
}

TEST_CASE("a model is never distinguishable from itself") {
    for (const char* name : {"index_pair_a.json", "vi_a_system.json"}) {
        const SwaModel m = test::fixture(name);
        for (int T : {1, 4}) {
            const DistinguishResult r = check_T(m, m, T);
            CHECK(r.status == DistinguishStatus::NotDistinguishable);
            REQUIRE(r.delta_bar);
            CHECK(*r.delta_bar == doctest::Approx(0.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("the index is symmetric in the pair") {
    const SwaModel a = test::fixture("index_pair_a.json");
    const SwaModel b = test::fixture("index_pair_b.json");
    for (int T = 1; T <= 4; ++T) {
        const DistinguishResult ab = check_T(a, b, T);
        const DistinguishResult ba = check_T(b, a, T);
        CHECK(ab.status == ba.status);
        REQUIRE(ab.delta_bar);
        REQUIRE(ba.delta_bar);
        CHECK(std::abs(*ab.delta_bar - *ba.delta_bar) <= 1e-6);
    }
}

TEST_CASE("status and index are monotone in the horizon") {
    const SwaModel a = test::fixture("index_pair_a.json");
    const SwaModel b = test::fixture("index_pair_b.json");
    double prev = 0.0;
    for (int T = 1; T <= 6; ++T) {
        const DistinguishResult r = check_T(a, b, T);
        check_index_bounds(r);
        REQUIRE(r.delta_bar);
        CHECK(r.delta_bar_optimal);
        CHECK(*r.delta_bar >= prev - 1e-6);
        prev = *r.delta_bar;
    }

    const SwaModel g = test::fixture("vi_a_system.json");
    const SwaModel f = test::fixture("vi_a_fault.json");
    DistinguishOptions decide;
    decide.minimize = false;
    bool seen = false;
    for (int T = 9; T <= 14; ++T) {
        const DistinguishResult r = check_T(g, f, T, decide);
        REQUIRE(r.status != DistinguishStatus::Unresolved);
        if (seen) CHECK(r.status == DistinguishStatus::Distinguishable);
        seen = seen || r.status == DistinguishStatus::Distinguishable;
    }
    CHECK(seen);
}

TEST_CASE("Eq9 index curve is frozen") {
    // Reference values from the own solver, cross-checked with an external MILP solver.
    const SwaModel a = test::fixture("index_pair_a.json");
    const SwaModel b = test::fixture("index_pair_b.json");
    const double expected[] = {0.0, 0.0698, 0.1818, 0.1948, 0.2071, 0.2133};
    for (int T = 1; T <= 6; ++T) {
        const DistinguishResult r = check_T(a, b, T);
        REQUIRE(r.delta_star);
        CHECK(*r.delta_star == doctest::Approx(expected[T - 1]).epsilon(1e-3));
    }
}

TEST_CASE("the 12-distinguishable pair") {
    const SwaModel g = test::fixture("vi_a_system.json");
    const SwaModel f = test::fixture("vi_a_fault.json");
    DistinguishOptions decide;
    decide.minimize = false;
    const DistinguishResult r11 = check_T(g, f, 11, decide);
    CHECK(r11.status == DistinguishStatus::NotDistinguishable);
    CHECK(check_T(g, f, 12, decide).status == DistinguishStatus::Distinguishable);

    // The intersection witness is an actual trajectory of both models.
    REQUIRE(r11.witness);
    Trajectory d;
    for (int t = 0; t < 11; ++t) d.push_back(r11.witness->inputs[t], r11.witness->outputs[t]);
    CHECK(check_invalidation(g, d).status == InvalidationStatus::NotInvalidated);
    CHECK(check_invalidation(f, d).status == InvalidationStatus::NotInvalidated);
}

TEST_CASE("both encodings agree on the pair program") {
    const SwaModel a = test::fixture("index_pair_a.json");
    const SwaModel b = test::fixture("index_pair_b.json");
    for (int T = 1; T <= 3; ++T) {
        DistinguishOptions o;
        o.encoding = milp::Encoding::BigM;
        const DistinguishResult big = check_T(a, b, T, o);
        const DistinguishResult sos = check_T(a, b, T);
        CHECK(big.status == sos.status);
        REQUIRE(big.delta_bar);
        CHECK(*big.delta_bar == doctest::Approx(*sos.delta_bar).epsilon(1e-5));
    }
}

TEST_CASE("interface mismatch is an error") {
    const SwaModel a = test::fixture("index_pair_a.json");
    const SwaModel g = test::fixture("vi_a_system.json");
    CHECK_THROWS_AS(check_T(a, g, 2), ModelError);
    CHECK_THROWS_AS(check_T(a, a, 0), ModelError);
}

TEST_CASE("find_min_T outcomes") {
    const SwaModel a = test::fixture("index_pair_a.json");
    const SwaModel b = test::fixture("index_pair_b.json");
    SearchOptions so;
    so.T_max = 12;

    SUBCASE("identical models plateau at zero") {
        const TSearchReport rep = find_min_T(a, a, so);
        CHECK(rep.outcome == SearchOutcome::Plateau);
        CHECK(rep.plateau_delta_star == 0.0);
        CHECK(rep.plateau_onset == 1);
    }
    SUBCASE("Eq9 pair plateaus below one") {
        const TSearchReport rep = find_min_T(a, b, so);
        CHECK(rep.outcome == SearchOutcome::Plateau);
        CHECK(rep.plateau_delta_star > 0.0);
        CHECK(rep.plateau_delta_star < 1.0);
        CHECK(rep.plateau_onset >= 4);
        CHECK(rep.plateau_onset <= 7);
        for (const auto& r : rep.results) check_index_bounds(r);
    }
    SUBCASE("a zero run does not hide a later separation") {
        const SwaModel g = test::fixture("vi_a_system.json");
        const SwaModel f = test::fixture("vi_a_fault.json");
        so.T_max = 14;
        const TSearchReport rep = find_min_T(g, f, so);
        CHECK(rep.outcome == SearchOutcome::Found);
        CHECK(rep.T_min == 12);
    }
    SUBCASE("a small budget is exhausted") {
        so.T_max = 2;
        so.escalate = false;
        const TSearchReport rep = find_min_T(a, b, so);
        CHECK(rep.outcome == SearchOutcome::Exhausted);
        CHECK(rep.T_last == 2);
    }
}

TEST_CASE("noise scaling separates the Eq9 pair") {
    const SwaModel a = test::fixture("index_pair_a.json");
    const SwaModel b = test::fixture("index_pair_b.json");
    const NoiseScaling ns = max_noise_for_distinguishability(a, b, 6, 0.9);
    CHECK(ns.rho > 0.0);
    CHECK(ns.rho < 1.0);
    CHECK(ns.verification.status == DistinguishStatus::Distinguishable);
    DistinguishOptions decide;
    decide.minimize = false;
    CHECK(check_T(ns.a, ns.b, 6, decide).status == DistinguishStatus::Distinguishable);

    CHECK_THROWS_AS(max_noise_for_distinguishability(a, a, 3, 0.9), NotApplicable);
}
