// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "latsim/crypto.hpp"

namespace latsim {

class ScenarioInvalid : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PartitionWindow {
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::vector<std::vector<NodeId>> groups;
};

enum class AdvBehavior { Silent, EquivocateInit, DelayRelease, LeaderHog };

struct AdversarySpec {
    std::vector<NodeId> byzantine;
    AdvBehavior behavior = AdvBehavior::Silent;
    std::int64_t corrupt_at = 0;  // node flips to Byzantine at this time
};

struct ConfigChangeSpec {
    std::int64_t at_time = 0;   // boundary T
    std::uint32_t chains = 0;   // chain count in round r2 (>= current)
    std::uint32_t phi = 0;      // 0 keeps the default rule
};

struct MembershipChange {
    std::uint64_t epoch = 0;
    std::vector<NodeId> node_set;
};

struct MempoolSpec {
    std::uint64_t tx_count = 0;
    std::int64_t inject_every = 0;  // arrival spacing
};

enum class DelayModel { Constant, Uniform };

/// Full simulation input. Everything a run does is a pure function of this
/// structure (the seed covers all sampling).
struct Scenario {
    std::string name = "unnamed";
    std::uint64_t seed = 1;
    std::uint32_t nodes = 4;
    std::uint32_t chains = 1;
    std::int64_t lambda = 100'000'000;  // ns
    DelayModel delay_model = DelayModel::Constant;
    std::int64_t delay_min = 0;  // uniform model only
    std::int64_t delay_max = 0;
    Fraction delta{1, 1};
    std::uint32_t phi = 0;  // 0 -> 2*f_max+1
    std::uint64_t epoch_length = 10;
    std::uint32_t crs_committee = 0;     // 0 -> all nodes
    std::uint32_t notary_committee = 0;  // 0 -> all nodes
    std::uint64_t horizon_heights = 4;
    std::int64_t max_sim_time = 600'000'000'000;  // 10 simulated minutes
    std::int64_t start_skew = 0;
    AdversarySpec adversary;
    std::vector<PartitionWindow> partitions;
    bool adversarial_reorder = false;
    bool crs_update_only_on_join = false;
    bool monotone_timestamps_global = false;
    std::optional<ConfigChangeSpec> config_change;
    MempoolSpec mempool;
    std::vector<MembershipChange> membership;
    bool emit_transcript = false;

    std::uint32_t crs_size() const { return crs_committee == 0 ? nodes : crs_committee; }
    std::uint32_t notary_size() const {
        return notary_committee == 0 ? nodes : notary_committee;
    }
    bool is_configured_byzantine(NodeId n) const;

    void validate() const;  // throws ScenarioInvalid
    static Scenario from_json_text(const std::string& text);
    static Scenario from_json_file(const std::string& path);
    std::string to_json_text() const;
};

}  // namespace latsim
