#include <doctest.h>

#include "support.hpp"
#include "swafdi/indices.hpp"

using namespace swafdi;

namespace {

IndexEntry found(int m, int n, int h) {
    IndexEntry e;
    e.first = m;
    e.second = n;
    e.outcome = SearchOutcome::Found;
    e.horizon = h;
    return e;
}

IndexEntry plateau(int m, int n, double d) {
    IndexEntry e;
    e.first = m;
    e.second = n;
    e.outcome = SearchOutcome::Plateau;
    e.last_delta_star = d;
    e.plateau_onset = 3;
    return e;
}

FdiIndices table_one() {
    FdiIndices idx;
    idx.num_faults = 3;
    idx.T_max = 30;
    idx.detection = {found(0, 1, 4), found(0, 2, 8), found(0, 3, 16)};
    idx.isolation = {found(1, 2, 4), found(1, 3, 4), found(2, 3, 16)};
    aggregate(idx);
    return idx;
}

}  // namespace

TEST_CASE("aggregates follow the max formulas") {
    const FdiIndices idx = table_one();
    CHECK(idx.T == 16);
    CHECK(idx.I == 16);
    CHECK(idx.K == 16);
    CHECK(idx.K_i[0] == 4);
    CHECK(idx.K_i[1] == 16);
    CHECK(idx.K_i[2] == 16);
    CHECK(idx.I_tilde[0] == 4);
    CHECK(idx.a1);
    CHECK(idx.a2);
    CHECK(idx.isolation_index(3, 2) == 16);
    CHECK(idx.window(1) == 4);
    CHECK(idx.detection_window() == 16);
    for (int i = 0; i < 3; ++i) {
        CHECK(*idx.K >= *idx.K_i[i]);
        CHECK(*idx.K_i[i] >= *idx.T_j[i]);
    }
}

TEST_CASE("missing entries leave aggregates undefined") {
    FdiIndices idx = table_one();
    idx.isolation[2] = plateau(2, 3, 0.3);
    aggregate(idx);
    CHECK(idx.a1);
    CHECK_FALSE(idx.a2);
    CHECK_FALSE(idx.I);
    CHECK_FALSE(idx.K);
    CHECK(idx.K_i[0] == 4);
    CHECK_FALSE(idx.K_i[1]);
    CHECK(idx.window(2) == 30);

    idx.detection[0] = plateau(0, 1, 0.0);
    aggregate(idx);
    CHECK_FALSE(idx.a1);
    CHECK_FALSE(idx.T);
    CHECK(idx.detection_window() == 30);
}

TEST_CASE("a single fault has no isolation entries") {
    FdiIndices idx;
    idx.num_faults = 1;
    idx.T_max = 20;
    idx.detection = {found(0, 1, 7)};
    aggregate(idx);
    CHECK_FALSE(idx.I);
    CHECK_FALSE(idx.I_tilde[0]);
    CHECK(idx.T == 7);
    CHECK(idx.K == 7);
    CHECK(idx.K_i[0] == 7);
    CHECK(idx.a2);
}

TEST_CASE("indices JSON round trip") {
    FdiIndices idx = table_one();
    idx.isolation[1] = plateau(1, 3, 0.25);
    idx.isolation[1].curve = {{1, 0.1}, {2, 0.25}};
    aggregate(idx);
    const FdiIndices back = indices_from_json(indices_to_json(idx));
    CHECK(indices_to_json(back) == indices_to_json(idx));
    CHECK(back.pair(1, 3).curve.size() == 2);

    auto j = indices_to_json(idx);
    j["isolation"].erase(0);
    CHECK_THROWS(indices_from_json(j));
}

TEST_CASE("the table names every entry") {
    FdiIndices idx = table_one();
    idx.isolation[2] = plateau(2, 3, 0.3);
    aggregate(idx);
    const std::string t = format_table(idx);
    CHECK(t.find("T_3 = 16") != std::string::npos);
    CHECK(t.find("I_2,3 = plateau") != std::string::npos);
    CHECK(t.find("A2 violated") != std::string::npos);
}

TEST_CASE("duplicate faults violate isolability") {
    const SwaModel g = test::fixture("index_pair_a.json");
    const SwaModel b = test::fixture("index_pair_b.json");
    IndicesOptions o;
    o.search.T_max = 6;
    o.jobs = 2;
    const FdiIndices idx = compute_indices(g, {b, b}, o);
    REQUIRE(idx.isolation.size() == 1);
    CHECK(idx.isolation[0].outcome == SearchOutcome::Plateau);
    CHECK(idx.isolation[0].last_delta_star == 0.0);
    CHECK_FALSE(idx.a2);
    CHECK_FALSE(idx.I);
}

TEST_CASE("found entries certify and are minimal; reruns are identical") {
    const SwaModel g = test::fixture("vi_a_system.json");
    const SwaModel f = test::fixture("vi_a_fault.json");
    IndicesOptions o;
    o.search.T_max = 14;
    const FdiIndices idx = compute_indices(g, {f}, o);
    REQUIRE(idx.T_j[0]);
    const int T1 = *idx.T_j[0];
    CHECK(T1 == 12);
    DistinguishOptions decide;
    decide.minimize = false;
    CHECK(check_T(g, f, T1, decide).status == DistinguishStatus::Distinguishable);
    CHECK(check_T(g, f, T1 - 1, decide).status == DistinguishStatus::NotDistinguishable);

    const FdiIndices again = compute_indices(g, {f}, o);
    CHECK(again.T_j == idx.T_j);
    CHECK(again.detection[0].curve == idx.detection[0].curve);
}
