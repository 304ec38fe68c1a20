// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "latsim/lattice.hpp"

namespace latsim {

/// One slot of an acking block-height vector.
struct HeightEntry {
    enum Kind { Undefined, Height, Infinite } kind = Undefined;
    std::uint64_t height = 0;

    static HeightEntry undefined() { return {Undefined, 0}; }
    static HeightEntry at(std::uint64_t h) { return {Height, h}; }
    static HeightEntry infinite() { return {Infinite, 0}; }
    friend bool operator==(const HeightEntry&, const HeightEntry&) = default;
};

/// Strict comparison used by the precedence counts: heights compare by
/// value, a height beats infinity, and undefined entries never compare.
inline bool entry_lt(const HeightEntry& a, const HeightEntry& b) {
    if (a.kind == HeightEntry::Undefined || b.kind == HeightEntry::Undefined) return false;
    if (a.kind == HeightEntry::Height && b.kind == HeightEntry::Infinite) return true;
    if (a.kind == HeightEntry::Height && b.kind == HeightEntry::Height) {
        return a.height < b.height;
    }
    return false;
}

enum class DeliveryMode { Normal, Early, Flush };

struct DeliveryBatch {
    std::vector<BlockPtr> blocks;  // ascending hash order
    DeliveryMode mode = DeliveryMode::Normal;
    std::uint64_t batch_index = 0;
};

struct OrderingParams {
    std::uint32_t num_chains = 0;
    std::uint32_t phi = 0;  // 0 selects the default 2*f_max+1

    std::uint32_t f_max() const { return (num_chains - 1) / 3; }
    std::uint32_t resolved_phi() const;
};

class NotCandidate : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Criteria { NoOutput, Normal, Early };

/// Event-driven total ordering over one node's causally released blocks.
///
/// The per-candidate potential functions collapse to per-chain bitsets:
/// every chain contributes at most one finite AHV value (its lowest pending
/// height), so AHV(b)[q] is determined by GAHV[q] and whether chain q's
/// lowest pending block reaches b. Pairwise precedence counts live in an
/// incrementally maintained matrix; per-event work is O(n^2).
///
/// Delivery uses the future-stable preceding set (no candidate can ever
/// come to precede a member), which is what makes batches arrival-order
/// independent. preceding_set() exposes the weaker "not currently
/// preceded" set that the worked example in the protocol description uses.
class OrderingState {
public:
    explicit OrderingState(OrderingParams params, std::uint64_t first_batch_index = 0);

    /// Registers a block as already output (baseline for mid-run starts).
    void preload_delivered(const Digest& h, std::uint32_t chain, std::uint64_t height);

    /// Feeds one causally complete block; returns any batches it unlocks.
    std::vector<DeliveryBatch> receive_block(BlockPtr b);

    /// Drains all pending blocks as deterministic topological batches
    /// (candidate set, ascending hash), flushing a retiring configuration.
    std::vector<DeliveryBatch> flush_all();

    // -- queries over the current state --
    std::vector<std::uint32_t> ans_of(const Digest& candidate) const;
    std::vector<HeightEntry> ahv_of(const Digest& candidate) const;
    std::uint32_t ahv_count(const Digest& candidate) const;
    int precede(const Digest& b1, const Digest& b2) const;          // 1 / -1 / 0
    std::optional<int> grade(const Digest& b1, const Digest& b2) const;  // 1 / 0 / nullopt
    std::vector<BlockPtr> preceding_set() const;
    Criteria check_criteria() const;

    std::vector<BlockPtr> candidates() const;  // ascending chain order
    std::uint32_t global_ans_size() const { return (std::uint32_t)pending_chain_count(); }
    std::uint64_t matrix_count(const Digest& b1, const Digest& b2) const;
    std::size_t pending_count() const;
    std::uint64_t op_count() const { return ops_; }
    std::uint64_t next_batch_index() const { return batch_index_; }
    const OrderingParams& params() const { return params_; }

private:
    struct Cand {
        BlockPtr blk;
        std::uint64_t w = 0;    // chains whose lowest pending block reaches blk
        std::uint64_t ans = 0;  // chains with any pending block reaching blk
        std::vector<std::int64_t> first_acker;  // lowest acking height per chain, -1 unset
    };

    std::uint32_t chain_of(const Digest& candidate) const;
    std::size_t pending_chain_count() const;
    std::uint64_t stable_set_mask() const;  // grade-based preceding set
    Criteria classify(std::uint64_t stable_mask) const;
    DeliveryBatch emit(std::uint64_t chain_mask, DeliveryMode mode);
    void rebuild();
    std::vector<DeliveryBatch> drain_deliveries();

    OrderingParams params_;
    std::uint32_t phi_;
    std::vector<std::deque<BlockPtr>> pend_;
    std::vector<std::optional<Cand>> cand_;
    std::uint64_t cand_mask_ = 0;
    std::uint64_t pending_mask_ = 0;
    std::unordered_map<Digest, std::uint64_t, U256Hash> reach_;  // block -> candidate chains
    std::unordered_set<Digest, U256Hash> delivered_;
    std::vector<std::int64_t> delivered_tip_;
    std::vector<BlockPtr> arrival_;  // insertion order, delivered entries skipped lazily
    std::vector<std::vector<std::uint16_t>> matrix_;  // pairwise |W(i) \ W(j)|
    std::uint64_t batch_index_ = 0;
    std::uint64_t ops_ = 0;
};

}  // namespace latsim
