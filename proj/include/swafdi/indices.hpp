#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swafdi/distinguish.hpp"

namespace swafdi {

/// One searched pair. Model 0 is the nominal system, 1..N_f are the faults.
struct IndexEntry {
    int first = 0;
    int second = 0;
    SearchOutcome outcome = SearchOutcome::Exhausted;
    std::optional<int> horizon;       // set when outcome is Found
    double last_delta_star = 0.0;     // at the largest feasible horizon tested
    int plateau_onset = 0;
    std::vector<std::pair<int, double>> curve;  // (T, delta*) of the feasible horizons
    double seconds = 0.0;
};

/// Detectability and isolability indices with the aggregates used online.
/// Aggregates are empty when an entry they depend on is missing.
struct FdiIndices {
    int num_faults = 0;
    int T_max = 0;
    std::vector<IndexEntry> detection;  // one per fault, in fault order
    std::vector<IndexEntry> isolation;  // pairs m < n in lexicographic order
    std::vector<std::optional<int>> T_j;
    std::vector<std::optional<int>> I_tilde;
    std::vector<std::optional<int>> K_i;
    std::optional<int> T, I, K;
    bool a1 = false;  // every fault detectable
    bool a2 = false;  // every fault pair isolable

    /// Faults are numbered from 1 here, as in the output.
    const IndexEntry& pair(int m, int n) const;
    std::optional<int> isolation_index(int m, int n) const;
    /// Window for fault monitor i, falling back to T_max when undefined.
    int window(int i) const;
    /// Detection window, falling back to T_max when undefined.
    int detection_window() const;
};

/// Recomputes T_j, I_tilde, K_i, T, I, K and the assumption flags from the entries.
void aggregate(FdiIndices& idx);

struct IndicesOptions {
    SearchOptions search;
    int jobs = 1;
    std::function<void(const IndexEntry&)> on_entry;
};

FdiIndices compute_indices(const SwaModel& system, const std::vector<SwaModel>& faults,
                           const IndicesOptions& options = {});

nlohmann::json indices_to_json(const FdiIndices& idx);
FdiIndices indices_from_json(const nlohmann::json& j);
void save_indices(const FdiIndices& idx, const std::string& path);
FdiIndices load_indices(const std::string& path);

/// Plain-text table of the indices and aggregates.
std::string format_table(const FdiIndices& idx);

}  // namespace swafdi
