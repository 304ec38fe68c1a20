// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latsim/scenario.hpp"
#include "latsim/timestamp.hpp"

namespace latsim {

struct HeightStat {
    std::uint32_t chain = 0;
    std::uint64_t height = 0;
    std::uint64_t decide_round_max = 0;   // round of the deciding quorum, worst node
    std::uint64_t max_round_entered = 0;  // deepest round any correct node entered
    std::int64_t first_start = 0;
    std::int64_t last_decide = 0;
    std::int64_t latency_max = 0;          // per-node decide - start, worst node
    std::uint64_t rounds_after_heal_max = 0;  // 0 when no partition overlapped
};

struct Metrics {
    std::uint64_t proposals = 0;
    std::uint64_t abstentions = 0;
    std::uint64_t empty_blocks = 0;
    std::uint64_t equivocations_detected = 0;
    std::uint64_t messages_gossiped = 0;
    std::uint64_t deliveries = 0;
    std::uint64_t compaction_entries = 0;
    std::uint64_t compaction_notarized = 0;
    std::uint64_t txs_injected = 0;
    std::uint64_t txs_packed = 0;
    std::uint64_t tx_duplicates = 0;
    double notarization_latency_mean_ms = 0;
};

struct TimestampRow {
    std::uint64_t index = 0;
    std::uint32_t chain = 0;
    std::uint64_t height = 0;
    Digest block_hash;
    std::int64_t block_timestamp = 0;
    std::int64_t consensus_timestamp = 0;
};

/// Everything a run produces; serializable as a diffable directory.
struct RunReport {
    Scenario scenario;
    bool agreement_ok = true;
    bool liveness_ok = true;
    bool integrity_ok = true;
    bool ordering_agreement_ok = true;
    bool timestamps_ok = true;
    bool tx_unique_ok = true;
    bool notarization_coverage_ok = true;
    bool boundary_monotone_ok = true;
    std::vector<std::string> violations;
    std::vector<HeightStat> heights;
    std::vector<std::vector<std::string>> node_batch_lines;  // per node
    std::vector<std::vector<TimestampRow>> node_timestamps;  // per node
    Metrics metrics;
    std::int64_t end_time = 0;
    std::vector<std::string> transcript;  // optional

    bool all_ok() const {
        return agreement_ok && liveness_ok && integrity_ok && ordering_agreement_ok &&
               timestamps_ok && tx_unique_ok && notarization_coverage_ok &&
               boundary_monotone_ok;
    }

    /// Writes summary.txt, verdicts.txt, ba_stats.csv, metrics.csv,
    /// scenario.json, per-node batch logs and timestamp CSVs, and the
    /// transcript when captured.
    void write(const std::string& dir) const;
};

/// Compares batch logs and timestamp files across report directories.
/// Returns an empty string when identical, else a first-divergence pointer.
std::string compare_report_dirs(const std::vector<std::string>& dirs);

}  // namespace latsim
