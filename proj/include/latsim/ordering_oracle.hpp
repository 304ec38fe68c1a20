// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include "latsim/ordering.hpp"

namespace latsim {

/// Reference total ordering: recomputes every potential function from
/// scratch on each event, straight from the definitions (DAG reachability,
/// full acking-height vectors, per-pair counting). Exists to check the
/// incremental structure; shares none of its state or shortcuts.
class OrderingOracle {
public:
    explicit OrderingOracle(OrderingParams params, std::uint64_t first_batch_index = 0);

    void preload_delivered(const Digest& h, std::uint32_t chain, std::uint64_t height);
    std::vector<DeliveryBatch> receive_block(BlockPtr b);
    std::vector<DeliveryBatch> flush_all();

    // definition-level queries, for cross-checking the incremental state
    std::vector<std::uint32_t> ans_of(const Digest& candidate) const;
    std::vector<HeightEntry> ahv_of(const Digest& candidate) const;
    std::uint64_t pair_count(const Digest& b1, const Digest& b2) const;
    std::vector<BlockPtr> candidate_blocks() const;
    std::size_t pending_count() const { return pending_.size(); }

private:
    struct View {
        std::vector<BlockPtr> candidates;
        std::vector<std::vector<HeightEntry>> ahv;   // per candidate
        std::vector<std::uint64_t> ans;              // per candidate, chain bitmask
        std::uint64_t global_ans = 0;
    };

    bool reaches(const Block& from, const Digest& target,
                 std::unordered_map<Digest, bool, U256Hash>& memo) const;
    View compute_view() const;
    std::uint64_t count_less(const View& v, std::size_t i, std::size_t j) const;
    std::optional<int> grade_of(const View& v, std::size_t i, std::size_t j) const;
    std::vector<std::size_t> stable_indices(const View& v) const;
    Criteria classify(const View& v, const std::vector<std::size_t>& stable) const;
    DeliveryBatch emit(const std::vector<BlockPtr>& blocks, DeliveryMode mode);
    std::vector<DeliveryBatch> drain();

    OrderingParams params_;
    std::uint32_t phi_;
    std::vector<BlockPtr> pending_;  // arrival order
    std::unordered_map<Digest, BlockPtr, U256Hash> by_hash_;
    std::unordered_set<Digest, U256Hash> delivered_;
    std::uint64_t batch_index_ = 0;
};

}  // namespace latsim
