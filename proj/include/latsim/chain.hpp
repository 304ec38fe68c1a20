// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <map>
#include <set>

#include "latsim/netsim.hpp"
#include "latsim/ordering.hpp"
#include "latsim/timestamp.hpp"

namespace latsim {

/// Load-balancer admission: a transaction may only be packed by the chain
/// matching its digest modulo the chain count.
bool load_balancer_admit(const Digest& tx_digest, std::uint32_t chain_id,
                         std::uint32_t n_chains);

/// Sigma_h over a decided block hash: t_max+1 verified shares combined.
ThresholdSignature notarize(const KeyChain& kc, const GroupId& group,
                            const Digest& block_hash,
                            std::span<const ShareSignature> shares, std::uint32_t t);

/// Canonical digest of a compaction-chain entry (height, block hash,
/// consensus timestamp); the unit the compaction notarization signs.
Digest compaction_entry_digest(std::uint64_t entry_index, const Digest& block_hash,
                               std::int64_t consensus_timestamp);

/// One correct node: per-chain height lifecycle (propose via the delta
/// threshold, run agreement, collect notarization shares), epoch
/// transitions, lattice maintenance, total ordering, timestamping, and
/// configuration changes.
class Node {
public:
    Node(NodeId id, const Scenario& sc, const KeyChain& kc, NodeEnv& env);

    void bootstrap(std::int64_t now);
    void on_height_start(std::int64_t now, std::uint32_t chain, std::uint64_t height);
    void on_tick(std::int64_t now, std::uint32_t chain, std::uint64_t height,
                 std::uint64_t round, int step);
    void on_message(std::int64_t now, const SimMessage& msg);

    struct HeightRecord {
        std::int64_t start = -1;
        std::int64_t decide = -1;
        std::int64_t commit = -1;
        std::uint64_t decide_round = 0;
        std::uint64_t max_round = 0;
        std::vector<std::pair<std::uint64_t, std::int64_t>> round_log;
        bool committed = false;
        Digest committed_hash;
    };

    // report surface
    NodeId id() const { return id_; }
    std::uint64_t committed_count(std::uint32_t chain) const;
    BlockPtr committed_block(std::uint32_t chain, std::uint64_t height) const;
    const HeightRecord* height_record(std::uint32_t chain, std::uint64_t height) const;
    const std::vector<std::string>& batch_lines() const { return batch_lines_; }
    const std::vector<TimestampRow>& timestamp_rows() const { return timestamp_rows_; }
    std::uint64_t proposals() const { return proposals_; }
    std::uint64_t abstentions() const { return abstentions_; }
    std::uint64_t empty_blocks() const { return empty_blocks_; }
    std::uint64_t equivocations_seen() const { return equivocations_seen_; }
    std::uint64_t compaction_entries() const { return (std::uint64_t)compaction_.size(); }
    std::uint64_t compaction_notarized() const { return (std::uint64_t)centry_sig_.size(); }
    double notarization_latency_mean_ms() const;
    std::uint32_t active_chain_count() const { return active_chains_; }
    bool verify_chain_integrity(std::string* why) const;
    const ThresholdSignature* notarization_of(std::uint32_t chain,
                                              std::uint64_t height) const;
    const ThresholdSignature* compaction_notarization_of(std::uint64_t index) const;
    std::vector<Digest> committed_payload_union() const;
    std::uint64_t records_embedded() const { return records_embedded_; }
    /// (crs, notary committee) for an instance, once the epoch is ready.
    std::optional<std::pair<Digest, std::vector<NodeId>>> election_view(
        std::uint32_t chain, std::uint64_t height) const;

private:
    struct HeightCtx {
        std::unique_ptr<BaInstance> ba;
        std::optional<Block> proposal;
        bool started = false;
        bool decided_handled = false;
        std::optional<BaValue> decided_value;
        std::optional<Digest> awaiting_body;
        std::vector<BaMessage> pending_msgs;  // arrived before our start
        HeightRecord rec;
    };
    struct ChainState {
        std::vector<BlockPtr> committed;  // by height
        std::map<std::uint64_t, HeightCtx> heights;
        std::set<Digest> packed_txs;
    };

    std::uint64_t epoch_of(std::uint64_t height) const {
        return height / sc_->epoch_length;
    }
    std::vector<NodeId> node_set_for_epoch(std::uint64_t epoch) const;
    std::uint32_t crs_threshold() const { return (sc_->crs_size() - 1) / 3 + 1; }
    std::uint32_t notary_quorum_t() const { return (sc_->notary_size() - 1) / 3 + 1; }
    bool epoch_ready(std::uint64_t epoch) const;
    void enter_epochs_up_to(std::int64_t now, std::uint64_t epoch);
    void try_build_epoch(std::int64_t now, std::uint64_t epoch);
    const EpochConfig& epoch_config(std::uint64_t epoch) const;
    int notary_index_of(std::uint64_t epoch, std::uint32_t chain, NodeId n) const;

    Block build_proposal(std::int64_t now, std::uint32_t chain, std::uint64_t height,
                         std::uint64_t epoch);
    void dispatch_ba(std::int64_t now, std::uint32_t chain, std::uint64_t height,
                     const BaActions& actions);
    void check_decision(std::int64_t now, std::uint32_t chain, std::uint64_t height);
    void try_commit(std::int64_t now, std::uint32_t chain, std::uint64_t height);
    void commit_block(std::int64_t now, std::uint32_t chain, std::uint64_t height,
                      const Block& block);
    void try_materialize_sigma(std::int64_t now, std::uint32_t chain,
                               std::uint64_t height);
    void feed_ordering(std::int64_t now, const BlockPtr& block);
    void process_batches(std::int64_t now, const std::vector<DeliveryBatch>& batches);
    void maybe_complete_round_one(std::int64_t now);
    void try_materialize_centry(std::uint64_t index);
    bool is_r2_block(const Block& b) const;

    NodeId id_;
    const Scenario* sc_;
    const KeyChain* kc_;
    NodeEnv* env_;

    // epochs
    std::vector<CrsValue> crs_;
    std::vector<std::optional<EpochConfig>> epochs_;
    std::map<std::uint64_t, std::map<std::uint32_t, ShareSignature>> crs_pool_;
    std::vector<MsgCrsShare> stashed_crs_shares_;
    std::uint64_t epochs_entered_ = 0;
    bool entered_any_ = false;

    // chains
    std::vector<ChainState> chains_;
    std::uint32_t active_chains_;

    // notarization
    std::map<std::pair<std::uint32_t, std::uint64_t>,
             std::map<std::uint32_t, ShareSignature>>
        notary_pool_;
    std::map<std::pair<std::uint32_t, std::uint64_t>, ThresholdSignature> notary_sig_;

    // bodies received by gossip, keyed by hash
    std::unordered_map<Digest, Block, U256Hash> bodies_;

    // lattice + ordering + timestamps
    LatticeView lattice_;
    std::unique_ptr<OrderingState> ordering_;
    bool in_r2_ = false;
    bool r2_pending_ = false;  // config change configured and not yet switched
    std::vector<BlockPtr> r2_buffer_;
    std::map<std::uint32_t, std::uint64_t> last_r1_height_;
    std::map<std::uint32_t, std::uint64_t> r1_fed_;  // chain -> blocks fed
    TimestampAssigner assigner_;
    std::vector<TimestampedBlock> compaction_;
    std::vector<TimestampRow> timestamp_rows_;
    std::vector<std::string> batch_lines_;
    std::int64_t last_consensus_ts_ = 0;

    // compaction notarization
    std::map<std::uint64_t, std::map<std::uint32_t, ShareSignature>> centry_pool_;
    std::map<std::uint64_t, Digest> centry_digest_;
    std::map<std::uint64_t, std::uint64_t> centry_epoch_;
    std::map<std::uint64_t, ThresholdSignature> centry_sig_;
    std::vector<Digest> pending_records_;
    std::uint64_t records_embedded_ = 0;

    // mempool
    std::vector<std::pair<std::int64_t, Digest>> txs_;

    // metrics
    std::uint64_t proposals_ = 0;
    std::uint64_t abstentions_ = 0;
    std::uint64_t empty_blocks_ = 0;
    std::uint64_t equivocations_seen_ = 0;
    std::int64_t notarization_latency_sum_ = 0;
    std::uint64_t notarization_latency_cnt_ = 0;
};

/// The deterministic transaction schedule for a scenario: digest i is
/// hash(seed, i), arriving at i * inject_every.
std::vector<std::pair<std::int64_t, Digest>> mempool_schedule(const Scenario& sc);

}  // namespace latsim
