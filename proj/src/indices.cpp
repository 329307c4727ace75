#include "swafdi/indices.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "swafdi/io.hpp"

namespace swafdi {

using nlohmann::json;

const IndexEntry& FdiIndices::pair(int m, int n) const {
    if (m > n) std::swap(m, n);
    for (const auto& e : isolation)
        if (e.first == m && e.second == n) return e;
    throw std::out_of_range("no isolation entry for faults " + std::to_string(m) + ", " + std::to_string(n));
}

std::optional<int> FdiIndices::isolation_index(int m, int n) const { return pair(m, n).horizon; }

int FdiIndices::window(int i) const {
    const auto& k = K_i.at(static_cast<std::size_t>(i - 1));
    return k ? *k : T_max;
}

int FdiIndices::detection_window() const { return T ? *T : T_max; }

namespace {

std::optional<int> max_of(const std::vector<std::optional<int>>& values) {
    std::optional<int> out = 0;
    for (const auto& v : values) {
        if (!v) return std::nullopt;
        out = std::max(*out, *v);
    }
    return out;
}

}  // namespace

void aggregate(FdiIndices& idx) {
    const int nf = idx.num_faults;
    idx.T_j.clear();
    for (const auto& e : idx.detection) idx.T_j.push_back(e.horizon);
    idx.T = max_of(idx.T_j);
    idx.a1 = idx.T.has_value();

    std::vector<std::optional<int>> all;
    for (const auto& e : idx.isolation) all.push_back(e.horizon);
    idx.a2 = max_of(all).has_value();
    idx.I = nf >= 2 ? max_of(all) : std::nullopt;

    idx.I_tilde.assign(static_cast<std::size_t>(nf), std::nullopt);
    idx.K_i.assign(static_cast<std::size_t>(nf), std::nullopt);
    for (int i = 1; i <= nf; ++i) {
        std::vector<std::optional<int>> row;
        for (int j = 1; j <= nf; ++j)
            if (j != i) row.push_back(idx.isolation_index(i, j));
        const auto t_i = idx.T_j[static_cast<std::size_t>(i - 1)];
        // With a single fault there is nothing to isolate against; the max is empty.
        const auto it = nf >= 2 ? max_of(row) : std::optional<int>{};
        idx.I_tilde[static_cast<std::size_t>(i - 1)] = it;
        if (t_i && (it || nf == 1)) idx.K_i[static_cast<std::size_t>(i - 1)] = std::max(*t_i, it.value_or(0));
    }
    if (idx.T && (idx.I || nf == 1)) idx.K = std::max(*idx.T, idx.I.value_or(0));
    else idx.K = std::nullopt;
}

FdiIndices compute_indices(const SwaModel& system, const std::vector<SwaModel>& faults, const IndicesOptions& options) {
    if (faults.empty()) throw ModelError("the fault library is empty");
    for (const auto& f : faults)
        if (!same_interface(system, f)) throw ModelError("fault model '" + f.name + "' has a different interface");

    FdiIndices idx;
    idx.num_faults = static_cast<int>(faults.size());
    idx.T_max = options.search.T_max;
    std::vector<IndexEntry> jobs;
    auto add_job = [&jobs](int m, int n) {
        IndexEntry e;
        e.first = m;
        e.second = n;
        jobs.push_back(std::move(e));
    };
    for (int j = 1; j <= idx.num_faults; ++j) add_job(0, j);
    for (int m = 1; m <= idx.num_faults; ++m)
        for (int n = m + 1; n <= idx.num_faults; ++n) add_job(m, n);

    auto model = [&](int k) -> const SwaModel& { return k == 0 ? system : faults[static_cast<std::size_t>(k - 1)]; };
    std::atomic<std::size_t> next{0};
    std::mutex report;
    std::exception_ptr failure;
    auto worker = [&] {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            IndexEntry& e = jobs[k];
            try {
                const auto start = std::chrono::steady_clock::now();
                SearchOptions so = options.search;
                so.on_result = nullptr;
                const TSearchReport rep = find_min_T(model(e.first), model(e.second), so);
                e.outcome = rep.outcome;
                if (rep.outcome == SearchOutcome::Found) e.horizon = rep.T_min;
                e.plateau_onset = rep.plateau_onset;
                for (const auto& r : rep.results)
                    if (r.delta_star) {
                        e.curve.emplace_back(r.T, *r.delta_star);
                        e.last_delta_star = *r.delta_star;
                    }
                e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                if (options.on_entry) {
                    std::lock_guard lock(report);
                    options.on_entry(e);
                }
            } catch (...) {
                std::lock_guard lock(report);
                if (!failure) failure = std::current_exception();
                next = jobs.size();
            }
        }
    };
    const int n_workers = std::clamp(options.jobs, 1, static_cast<int>(jobs.size()));
    std::vector<std::thread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    for (auto& e : jobs) (e.first == 0 ? idx.detection : idx.isolation).push_back(std::move(e));
    aggregate(idx);
    return idx;
}

namespace {

json opt(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

std::optional<int> opt_int(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<int>();
}

SearchOutcome parse_outcome(const std::string& s) {
    for (auto o : {SearchOutcome::Found, SearchOutcome::Plateau, SearchOutcome::Exhausted, SearchOutcome::Unresolved})
        if (s == to_string(o)) return o;
    throw IoError("unknown search outcome '" + s + "'");
}

json entry_to_json(const IndexEntry& e) {
    json j;
    j["pair"] = {e.first, e.second};
    j["outcome"] = to_string(e.outcome);
    j["horizon"] = opt(e.horizon);
    j["last_delta_star"] = e.last_delta_star;
    if (e.outcome == SearchOutcome::Plateau) j["plateau_onset"] = e.plateau_onset;
    j["curve"] = json::array();
    for (const auto& [t, d] : e.curve) j["curve"].push_back({t, d});
    j["seconds"] = e.seconds;
    return j;
}

IndexEntry entry_from_json(const json& j) {
    IndexEntry e;
    e.first = j.at("pair").at(0).get<int>();
    e.second = j.at("pair").at(1).get<int>();
    e.outcome = parse_outcome(j.at("outcome").get<std::string>());
    e.horizon = opt_int(j.at("horizon"));
    e.last_delta_star = j.value("last_delta_star", 0.0);
    e.plateau_onset = j.value("plateau_onset", 0);
    if (j.contains("curve"))
        for (const auto& p : j["curve"]) e.curve.emplace_back(p.at(0).get<int>(), p.at(1).get<double>());
    e.seconds = j.value("seconds", 0.0);
    return e;
}

}  // namespace

json indices_to_json(const FdiIndices& idx) {
    json j;
    j["num_faults"] = idx.num_faults;
    j["T_max"] = idx.T_max;
    j["detection"] = json::array();
    for (const auto& e : idx.detection) j["detection"].push_back(entry_to_json(e));
    j["isolation"] = json::array();
    for (const auto& e : idx.isolation) j["isolation"].push_back(entry_to_json(e));
    json agg;
    agg["T_j"] = json::array();
    for (const auto& v : idx.T_j) agg["T_j"].push_back(opt(v));
    agg["I_tilde"] = json::array();
    for (const auto& v : idx.I_tilde) agg["I_tilde"].push_back(opt(v));
    agg["K_i"] = json::array();
    for (const auto& v : idx.K_i) agg["K_i"].push_back(opt(v));
    agg["T"] = opt(idx.T);
    agg["I"] = opt(idx.I);
    agg["K"] = opt(idx.K);
    agg["A1"] = idx.a1;
    agg["A2"] = idx.a2;
    j["aggregates"] = std::move(agg);
    return j;
}

FdiIndices indices_from_json(const json& j) {
    try {
        FdiIndices idx;
        idx.num_faults = j.at("num_faults").get<int>();
        idx.T_max = j.at("T_max").get<int>();
        for (const auto& e : j.at("detection")) idx.detection.push_back(entry_from_json(e));
        for (const auto& e : j.at("isolation")) idx.isolation.push_back(entry_from_json(e));
        const auto nf = static_cast<std::size_t>(idx.num_faults);
        if (idx.detection.size() != nf || idx.isolation.size() != nf * (nf - 1) / 2)
            throw IoError("entry count does not match num_faults");
        // Aggregates are derived data; recompute instead of trusting the file.
        aggregate(idx);
        return idx;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed indices JSON: ") + e.what());
    }
}

void save_indices(const FdiIndices& idx, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << indices_to_json(idx).dump(2) << '\n';
}

FdiIndices load_indices(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open indices file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("cannot parse '" + path + "': " + e.what());
    }
    return indices_from_json(j);
}

namespace {

std::string cell(const IndexEntry& e) {
    char buf[64];
    switch (e.outcome) {
        case SearchOutcome::Found: return std::to_string(*e.horizon);
        case SearchOutcome::Plateau:
            std::snprintf(buf, sizeof buf, "plateau(d*=%.3g@%d)", e.last_delta_star, e.plateau_onset);
            return buf;
        case SearchOutcome::Exhausted:
            std::snprintf(buf, sizeof buf, ">%d(d*=%.3g)", e.curve.empty() ? 0 : e.curve.back().first, e.last_delta_star);
            return buf;
        case SearchOutcome::Unresolved: return "unresolved";
    }
    return "?";
}

std::string value(const std::optional<int>& v) { return v ? std::to_string(*v) : "undefined"; }

}  // namespace

std::string format_table(const FdiIndices& idx) {
    std::ostringstream out;
    out << "Detectability indices\n";
    for (const auto& e : idx.detection) out << "  T_" << e.second << " = " << cell(e) << '\n';
    if (!idx.isolation.empty()) {
        out << "Isolability indices\n";
        for (const auto& e : idx.isolation) out << "  I_" << e.first << ',' << e.second << " = " << cell(e) << '\n';
    }
    out << "Aggregates\n";
    out << "  T = " << value(idx.T) << ", I = " << value(idx.I) << ", K = " << value(idx.K) << '\n';
    for (int i = 1; i <= idx.num_faults; ++i)
        out << "  K_" << i << " = " << value(idx.K_i[static_cast<std::size_t>(i - 1)])
            << " (I~_" << i << " = " << value(idx.I_tilde[static_cast<std::size_t>(i - 1)]) << ")\n";
    out << "  A1 " << (idx.a1 ? "holds" : "violated") << ", A2 " << (idx.a2 ? "holds" : "violated") << '\n';
    return out.str();
}

}  // namespace swafdi
