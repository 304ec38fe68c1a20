// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0

#include "latsim/chain.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace latsim {

bool load_balancer_admit(const Digest& tx_digest, std::uint32_t chain_id,
                         std::uint32_t n_chains) {
    return tx_digest.mod_u64(n_chains) == chain_id;
}

ThresholdSignature notarize(const KeyChain& kc, const GroupId& group,
                            const Digest& block_hash,
                            std::span<const ShareSignature> shares, std::uint32_t t) {
    return kc.combine(group, block_hash, shares, t);
}

Digest compaction_entry_digest(std::uint64_t entry_index, const Digest& block_hash,
                               std::int64_t consensus_timestamp) {
    Enc e;
    e.raw("lat.centry.v1");
    e.u64(entry_index);
    e.digest(block_hash);
    e.i64(consensus_timestamp);
    return sha256(e.bytes());
}

std::vector<std::pair<std::int64_t, Digest>> mempool_schedule(const Scenario& sc) {
    std::vector<std::pair<std::int64_t, Digest>> out;
    out.reserve(sc.mempool.tx_count);
    for (std::uint64_t i = 0; i < sc.mempool.tx_count; ++i) {
        Enc e;
        e.raw("lat.tx.v1");
        e.u64(sc.seed);
        e.u64(i);
        out.emplace_back((std::int64_t)i * sc.mempool.inject_every, sha256(e.bytes()));
    }
    return out;
}

namespace {

constexpr std::uint32_t kMaxTxPerBlock = 128;
constexpr std::uint32_t kMaxRecordsPerBlock = 64;

Digest record_digest(const Digest& entry_digest, const Digest& sig_tag) {
    Enc e;
    e.raw("lat.crecord.v1");
    e.digest(entry_digest);
    e.digest(sig_tag);
    return sha256(e.bytes());
}

}  // namespace

Node::Node(NodeId id, const Scenario& sc, const KeyChain& kc, NodeEnv& env)
    : id_(id),
      sc_(&sc),
      kc_(&kc),
      env_(&env),
      active_chains_(sc.chains),
      lattice_(LatticeParams{&kc, sc.epoch_length, true}),
      assigner_(sc.chains, 0, sc.monotone_timestamps_global),
      txs_(mempool_schedule(sc)) {
    std::uint32_t max_chains =
        sc.config_change ? std::max(sc.chains, sc.config_change->chains) : sc.chains;
    chains_.resize(max_chains);
    crs_.push_back(genesis_crs(sc.seed));
    epochs_.resize(1);
    CommitteeSizes sizes{sc.crs_size(), sc.notary_size(), max_chains};
    epochs_[0] = elect_committees(crs_[0], node_set_for_epoch(0), sizes);
    ordering_ = std::make_unique<OrderingState>(OrderingParams{sc.chains, sc.phi});
    r2_pending_ = sc.config_change.has_value();
}

std::vector<NodeId> Node::node_set_for_epoch(std::uint64_t epoch) const {
    // membership changes apply from their epoch onward
    const MembershipChange* latest = nullptr;
    for (const auto& m : sc_->membership) {
        if (m.epoch <= epoch && (latest == nullptr || m.epoch > latest->epoch)) {
            latest = &m;
        }
    }
    if (latest) return latest->node_set;
    std::vector<NodeId> all(sc_->nodes);
    for (std::uint32_t i = 0; i < sc_->nodes; ++i) all[i] = i;
    return all;
}

bool Node::epoch_ready(std::uint64_t epoch) const {
    return epoch < epochs_.size() && epochs_[epoch].has_value();
}

const EpochConfig& Node::epoch_config(std::uint64_t epoch) const {
    return *epochs_.at(epoch);
}

int Node::notary_index_of(std::uint64_t epoch, std::uint32_t chain, NodeId n) const {
    return epoch_config(epoch).notary_index(chain, n);
}

void Node::enter_epochs_up_to(std::int64_t now, std::uint64_t epoch) {
    // epochs_entered_ is the next epoch this node has not yet entered
    while (epochs_entered_ <= epoch) {
        std::uint64_t e = epochs_entered_;
        if (!epoch_ready(e)) return;
        bool update_crs = !sc_->crs_update_only_on_join ||
                          node_set_for_epoch(e + 1) != node_set_for_epoch(e);
        if (!update_crs) {
            if (crs_.size() <= e + 1) crs_.push_back(CrsValue{e + 1, crs_[e].value});
            try_build_epoch(now, e + 1);
        } else if (epoch_config(e).in_crs_committee(id_)) {
            auto members = epoch_config(e).crs_committee;
            auto it = std::find(members.begin(), members.end(), id_);
            std::uint32_t index = (std::uint32_t)(it - members.begin());
            GroupId g{kGroupCrs, 0, e};
            auto share = kc_->share_sign(g, index, crs_[e].value);
            crs_pool_[e][index] = share;
            env_->gossip(id_, MsgCrsShare{e, share});
            try_build_epoch(now, e + 1);
        }
        epochs_entered_ = e + 1;
    }
}

void Node::try_build_epoch(std::int64_t now, std::uint64_t epoch) {
    if (epoch == 0 || epoch_ready(epoch)) return;
    if (!epoch_ready(epoch - 1)) return;
    if (crs_.size() <= epoch) {
        bool update_crs = !sc_->crs_update_only_on_join ||
                          node_set_for_epoch(epoch) != node_set_for_epoch(epoch - 1);
        if (!update_crs) {
            crs_.push_back(CrsValue{epoch, crs_[epoch - 1].value});
        } else {
            auto pool = crs_pool_.find(epoch - 1);
            if (pool == crs_pool_.end() || pool->second.size() < crs_threshold()) return;
            std::vector<ShareSignature> shares;
            for (const auto& [idx, sh] : pool->second) shares.push_back(sh);
            crs_.push_back(next_crs(*kc_, crs_[epoch - 1], shares, crs_threshold()));
        }
    }
    std::uint32_t max_chains = (std::uint32_t)chains_.size();
    CommitteeSizes sizes{sc_->crs_size(), sc_->notary_size(), max_chains};
    if (epochs_.size() <= epoch) epochs_.resize(epoch + 1);
    epochs_[epoch] = elect_committees(crs_[epoch], node_set_for_epoch(epoch), sizes);
    // shares that arrived before we knew R_{epoch} can be validated now
    auto stashed = std::move(stashed_crs_shares_);
    stashed_crs_shares_.clear();
    for (const auto& m : stashed) on_message(now, m);
}

void Node::on_height_start(std::int64_t now, std::uint32_t chain, std::uint64_t height) {
    auto& cs = chains_[chain];
    auto& ctx = cs.heights[height];
    if (ctx.started) return;
    std::uint64_t epoch = epoch_of(height);
    if (!epoch_ready(epoch)) {
        env_->schedule_height_start(id_, sc_->lambda, chain, height);
        return;
    }
    if (height > 0 && !notary_sig_.count({chain, height - 1})) {
        // parent notarization not yet combinable here; try again shortly
        env_->schedule_height_start(id_, sc_->lambda, chain, height);
        return;
    }
    enter_epochs_up_to(now, epoch);

    ctx.started = true;
    ctx.rec.start = now;
    const auto& committee = epoch_config(epoch).notary_committees.at(chain);
    bool member = std::find(committee.begin(), committee.end(), id_) != committee.end();

    std::optional<BaValue> my_value;
    if (member) {
        auto status = compute_status(0, chain, height);
        if (should_propose(*kc_, id_, status, crs_[epoch].value, sc_->delta)) {
            Block proposal = build_proposal(now, chain, height, epoch);
            ctx.proposal = proposal;
            bodies_[proposal.hash] = proposal;
            env_->gossip(id_, MsgBlock{proposal});
            my_value = BaValue::value(proposal.hash);
            ++proposals_;
        } else {
            ++abstentions_;
        }
    }

    BaParams params;
    params.chain = chain;
    params.height = height;
    params.lambda = sc_->lambda;
    params.crs = crs_[epoch].value;
    params.committee = committee;
    ctx.ba = std::make_unique<BaInstance>(params, kc_, id_, my_value, member);
    if (member) {
        dispatch_ba(now, chain, height, ctx.ba->start(now));
    }
    // replay whatever arrived before this instance existed
    auto pending = std::move(ctx.pending_msgs);
    ctx.pending_msgs.clear();
    for (const auto& m : pending) {
        auto it = chains_[chain].heights.find(height);
        if (it == chains_[chain].heights.end() || !it->second.ba) break;
        dispatch_ba(now, chain, height, it->second.ba->on_message(now, m));
    }
}

Block Node::build_proposal(std::int64_t now, std::uint32_t chain, std::uint64_t height,
                           std::uint64_t epoch) {
    (void)epoch;
    auto& cs = chains_[chain];
    const Block* parent = height > 0 ? cs.committed[height - 1].get() : nullptr;
    Block b;
    b.chain_id = chain;
    b.height = height;
    b.proposer_id = id_;
    b.block_timestamp = parent ? std::max(parent->block_timestamp + 1, now) : now;
    if (parent) {
        b.parent_hash = parent->hash;
        b.parent_notarization = notary_sig_.at({chain, height - 1});
    }
    bool r2 = is_r2_block(b);

    // ack the latest notarized block of every other chain we have; blocks
    // after the configuration boundary only ack post-boundary blocks
    std::uint32_t ack_span =
        sc_->config_change && r2 ? sc_->config_change->chains : sc_->chains;
    for (std::uint32_t j = 0; j < ack_span; ++j) {
        if (j == chain) continue;
        const auto& other = chains_[j];
        for (std::size_t h = other.committed.size(); h-- > 0;) {
            if (!notary_sig_.count({j, (std::uint64_t)h})) continue;
            const BlockPtr& target = other.committed[h];
            if (r2 && !is_r2_block(*target)) break;  // r2 acks stay in r2
            b.acks.push_back(AckField{target->proposer_id, target->hash, target->height});
            break;
        }
    }

    std::uint32_t n_chains_for_lb =
        sc_->config_change && r2 ? sc_->config_change->chains : sc_->chains;
    std::uint32_t packed = 0;
    for (const auto& [at, tx] : txs_) {
        if (at > now || packed >= kMaxTxPerBlock) break;
        if (!load_balancer_admit(tx, chain, n_chains_for_lb)) continue;
        if (cs.packed_txs.count(tx)) continue;
        b.payload.push_back(tx);
        ++packed;
    }

    std::uint32_t records = 0;
    while (!pending_records_.empty() && records < kMaxRecordsPerBlock) {
        b.records.push_back(pending_records_.front());
        pending_records_.erase(pending_records_.begin());
        ++records;
        ++records_embedded_;
    }

    b.finalize_hash();
    return b;
}

void Node::dispatch_ba(std::int64_t now, std::uint32_t chain, std::uint64_t height,
                       const BaActions& actions) {
    for (const auto& m : actions.gossip) {
        env_->gossip(id_, MsgBa{m});
    }
    if (actions.tick) {
        env_->schedule_tick(id_, actions.tick->delay, chain, height, actions.tick->round,
                            actions.tick->step);
    }
    check_decision(now, chain, height);
}

void Node::on_tick(std::int64_t now, std::uint32_t chain, std::uint64_t height,
                   std::uint64_t round, int step) {
    auto& cs = chains_[chain];
    auto it = cs.heights.find(height);
    if (it == cs.heights.end() || !it->second.ba) return;
    dispatch_ba(now, chain, height, it->second.ba->on_tick(now, round, step));
}

void Node::check_decision(std::int64_t now, std::uint32_t chain, std::uint64_t height) {
    auto& cs = chains_[chain];
    auto it = cs.heights.find(height);
    if (it == cs.heights.end()) return;
    HeightCtx& ctx = it->second;
    if (!ctx.ba || !ctx.ba->decided() || ctx.decided_handled) return;
    ctx.decided_handled = true;
    ctx.rec.decide = now;
    ctx.rec.decide_round = ctx.ba->decide_round();
    ctx.rec.max_round = ctx.ba->max_round();
    ctx.rec.round_log = ctx.ba->round_log();
    ctx.decided_value = ctx.ba->decision();
    equivocations_seen_ += ctx.ba->ledger().init_equivocators().size();
    try_commit(now, chain, height);
}

void Node::try_commit(std::int64_t now, std::uint32_t chain, std::uint64_t height) {
    auto& cs = chains_[chain];
    auto it = cs.heights.find(height);
    if (it == cs.heights.end()) return;
    HeightCtx& ctx = it->second;
    if (!ctx.decided_handled || ctx.rec.committed) return;
    if (cs.committed.size() != height) return;  // commits are sequential

    const BaValue& decided = *ctx.decided_value;
    if (decided.kind == BaValue::Bottom) {
        ThresholdSignature parent_sig;
        const Block* parent = nullptr;
        if (height > 0) {
            auto sig = notary_sig_.find({chain, height - 1});
            if (sig == notary_sig_.end()) return;  // empty block embeds Sigma
            parent_sig = sig->second;
            parent = cs.committed[height - 1].get();
        }
        commit_block(now, chain, height, make_empty_block(chain, height, parent, parent_sig));
        return;
    }
    auto body = bodies_.find(decided.hash);
    if (body == bodies_.end()) {
        ctx.awaiting_body = decided.hash;  // fetch-then-commit
        return;
    }
    commit_block(now, chain, height, body->second);
}

void Node::commit_block(std::int64_t now, std::uint32_t chain, std::uint64_t height,
                        const Block& block) {
    auto& cs = chains_[chain];
    auto& ctx = cs.heights[height];
    if (ctx.rec.committed) return;
    assert(cs.committed.size() == height && "commits must be sequential");
    auto ptr = std::make_shared<Block>(block);
    cs.committed.push_back(ptr);
    ctx.rec.committed = true;
    ctx.rec.commit = now;
    ctx.rec.committed_hash = block.hash;
    if (block.is_empty_block()) ++empty_blocks_;
    for (const auto& tx : block.payload) cs.packed_txs.insert(tx);
    env_->record_commit(id_, chain, height, block.hash);

    // structural + notarization validation happens on the lattice path
    auto released = lattice_.insert_block(block);
    for (const auto& r : released) feed_ordering(now, r);

    std::uint64_t epoch = epoch_of(height);
    int index = notary_index_of(epoch, chain, id_);
    if (index >= 0) {
        GroupId g{kGroupNotary, chain, epoch};
        auto share = kc_->share_sign(g, (std::uint32_t)index, block.hash);
        notary_pool_[{chain, height}][(std::uint32_t)index] = share;
        env_->gossip(id_, MsgNotaryShare{chain, height, block.hash, share});
    }
    try_materialize_sigma(now, chain, height);

    ctx.ba.reset();  // height done; gossip relays keep serving laggards
    if (height + 1 < sc_->horizon_heights) {
        env_->schedule_height_start(id_, 2 * sc_->lambda, chain, height + 1);
    }
    // an already-decided successor may have been waiting on sequentiality
    try_commit(now, chain, height + 1);
}

void Node::try_materialize_sigma(std::int64_t now, std::uint32_t chain,
                                 std::uint64_t height) {
    if (notary_sig_.count({chain, height})) return;
    auto& cs = chains_[chain];
    if (cs.committed.size() <= height) return;  // need the agreed hash
    const Digest& hash = cs.committed[height]->hash;
    auto pool = notary_pool_.find({chain, height});
    if (pool == notary_pool_.end()) return;
    std::vector<ShareSignature> matching;
    for (const auto& [idx, sh] : pool->second) {
        if (sh.message_digest == hash) matching.push_back(sh);
    }
    std::uint32_t t = notary_quorum_t();
    if (matching.size() < t) return;
    GroupId g{kGroupNotary, chain, epoch_of(height)};
    notary_sig_[{chain, height}] = notarize(*kc_, g, hash, matching, t);
    auto rec = cs.heights.find(height);
    if (rec != cs.heights.end() && rec->second.rec.commit >= 0) {
        notarization_latency_sum_ += now - rec->second.rec.commit;
        ++notarization_latency_cnt_;
    }
    // a bottom decision at the next height may be blocked on this Sigma
    try_commit(now, chain, height + 1);
}

bool Node::is_r2_block(const Block& b) const {
    return sc_->config_change && b.block_timestamp > sc_->config_change->at_time;
}

void Node::feed_ordering(std::int64_t now, const BlockPtr& block) {
    if (r2_pending_ && is_r2_block(*block)) {
        if (block->chain_id < sc_->chains && !last_r1_height_.count(block->chain_id)) {
            // first post-boundary block of an original chain: the count of
            // r1 blocks on that chain equals its height
            last_r1_height_[block->chain_id] = block->height;
        }
        if (in_r2_) {
            process_batches(now, ordering_->receive_block(block));
        } else {
            r2_buffer_.push_back(block);
            maybe_complete_round_one(now);
        }
        return;
    }
    r1_fed_[block->chain_id] += 1;
    process_batches(now, ordering_->receive_block(block));
    if (r2_pending_ && !in_r2_) maybe_complete_round_one(now);
}

void Node::maybe_complete_round_one(std::int64_t now) {
    // every original chain must have revealed its boundary block, and all
    // of its r1 blocks must have been fed
    for (std::uint32_t c = 0; c < sc_->chains; ++c) {
        auto it = last_r1_height_.find(c);
        if (it == last_r1_height_.end()) return;
        if (r1_fed_[c] != it->second) return;
    }
    // flush whatever the criteria left behind, in deterministic batches
    process_batches(now, ordering_->flush_all());
    in_r2_ = true;

    const auto& cc = *sc_->config_change;
    ordering_ = std::make_unique<OrderingState>(OrderingParams{cc.chains, cc.phi});
    // hand the new ordering the whole r1 history as its delivered baseline
    for (std::uint32_t c = 0; c < sc_->chains; ++c) {
        for (std::uint64_t h = 0; h < last_r1_height_[c]; ++h) {
            ordering_->preload_delivered(chains_[c].committed[h]->hash, c, h);
        }
    }
    assigner_.extend_chains(cc.chains, last_consensus_ts_);
    assigner_.force_floor(last_consensus_ts_);
    active_chains_ = cc.chains;

    auto buffered = std::move(r2_buffer_);
    r2_buffer_.clear();
    for (const auto& b : buffered) {
        process_batches(now, ordering_->receive_block(b));
    }
}

void Node::process_batches(std::int64_t now, const std::vector<DeliveryBatch>& batches) {
    (void)now;
    for (const auto& batch : batches) {
        std::ostringstream line;
        std::uint64_t index = (std::uint64_t)batch_lines_.size();
        line << index << ',';
        switch (batch.mode) {
            case DeliveryMode::Normal: line << "normal,"; break;
            case DeliveryMode::Early: line << "early,"; break;
            case DeliveryMode::Flush: line << "flush,"; break;
        }
        for (std::size_t i = 0; i < batch.blocks.size(); ++i) {
            if (i) line << ';';
            line << batch.blocks[i]->hash.hex();
        }
        batch_lines_.push_back(line.str());

        for (const auto& blk : batch.blocks) {
            lattice_.mark_delivered(blk->hash);
            std::int64_t ts = assigner_.assign(*blk);
            std::uint64_t entry = (std::uint64_t)compaction_.size();
            compaction_.push_back({blk, ts});
            timestamp_rows_.push_back(
                {entry, blk->chain_id, blk->height, blk->hash, blk->block_timestamp, ts});
            last_consensus_ts_ = ts;

            Digest ed = compaction_entry_digest(entry, blk->hash, ts);
            std::uint64_t epoch = epoch_of(blk->height);
            centry_digest_[entry] = ed;
            centry_epoch_[entry] = epoch;
            int index0 = notary_index_of(epoch, 0, id_);
            if (index0 >= 0) {
                GroupId g{kGroupNotary, 0, epoch};
                auto share = kc_->share_sign(g, (std::uint32_t)index0, ed);
                centry_pool_[entry][(std::uint32_t)index0] = share;
                env_->gossip(id_, MsgCompactionShare{entry, ed, epoch, share});
            }
            try_materialize_centry(entry);
        }
    }
}

void Node::try_materialize_centry(std::uint64_t index) {
    if (centry_sig_.count(index) || !centry_digest_.count(index)) return;
    auto pool = centry_pool_.find(index);
    if (pool == centry_pool_.end()) return;
    const Digest& ed = centry_digest_.at(index);
    std::vector<ShareSignature> matching;
    for (const auto& [idx, sh] : pool->second) {
        if (sh.message_digest == ed) matching.push_back(sh);
    }
    std::uint32_t t = notary_quorum_t();
    if (matching.size() < t) return;
    GroupId g{kGroupNotary, 0, centry_epoch_.at(index)};
    centry_sig_[index] = kc_->combine(g, ed, matching, t);
    pending_records_.push_back(record_digest(ed, centry_sig_[index].tag));
}

void Node::on_message(std::int64_t now, const SimMessage& msg) {
    if (const auto* ba = std::get_if<MsgBa>(&msg)) {
        if (ba->m.chain >= chains_.size() || ba->m.height >= sc_->horizon_heights) return;
        auto& cs = chains_[ba->m.chain];
        auto& ctx = cs.heights[ba->m.height];
        if (!ctx.started) {
            // our instance does not exist yet (we are behind); keep the
            // message so the eventual start can catch up from old evidence
            if (ctx.pending_msgs.size() < 100000) ctx.pending_msgs.push_back(ba->m);
            return;
        }
        if (!ctx.ba) return;  // already committed
        dispatch_ba(now, ba->m.chain, ba->m.height, ctx.ba->on_message(now, ba->m));
        return;
    }
    if (const auto* blk = std::get_if<MsgBlock>(&msg)) {
        Block copy = blk->b;
        Digest claimed = copy.hash;
        copy.finalize_hash();
        if (!(copy.hash == claimed)) return;  // malformed body
        if (copy.chain_id >= chains_.size()) return;
        bodies_.emplace(copy.hash, copy);
        auto& cs = chains_[copy.chain_id];
        auto it = cs.heights.find(copy.height);
        if (it != cs.heights.end() && it->second.awaiting_body.has_value() &&
            *it->second.awaiting_body == copy.hash) {
            it->second.awaiting_body.reset();
            try_commit(now, copy.chain_id, copy.height);
        }
        return;
    }
    if (const auto* ns = std::get_if<MsgNotaryShare>(&msg)) {
        if (ns->chain >= chains_.size()) return;
        if (ns->share.share_index >= sc_->notary_size()) return;
        GroupId g{kGroupNotary, ns->chain, epoch_of(ns->height)};
        if (!kc_->verify_share(g, ns->block_hash, ns->share)) return;
        notary_pool_[{ns->chain, ns->height}][ns->share.share_index] = ns->share;
        try_materialize_sigma(now, ns->chain, ns->height);
        return;
    }
    if (const auto* cr = std::get_if<MsgCrsShare>(&msg)) {
        if (cr->share.share_index >= sc_->crs_size()) return;
        if (crs_.size() <= cr->epoch) {
            stashed_crs_shares_.push_back(*cr);  // cannot verify yet
            return;
        }
        GroupId g{kGroupCrs, 0, cr->epoch};
        if (!kc_->verify_share(g, crs_[cr->epoch].value, cr->share)) return;
        crs_pool_[cr->epoch][cr->share.share_index] = cr->share;
        try_build_epoch(now, cr->epoch + 1);
        return;
    }
    if (const auto* cp = std::get_if<MsgCompactionShare>(&msg)) {
        if (cp->share.share_index >= sc_->notary_size()) return;
        GroupId g{kGroupNotary, 0, cp->epoch};
        if (!kc_->verify_share(g, cp->entry_digest, cp->share)) return;
        centry_pool_[cp->entry_index][cp->share.share_index] = cp->share;
        try_materialize_centry(cp->entry_index);
        return;
    }
}

std::uint64_t Node::committed_count(std::uint32_t chain) const {
    return (std::uint64_t)chains_[chain].committed.size();
}

BlockPtr Node::committed_block(std::uint32_t chain, std::uint64_t height) const {
    const auto& c = chains_[chain].committed;
    return height < c.size() ? c[height] : nullptr;
}

const Node::HeightRecord* Node::height_record(std::uint32_t chain,
                                              std::uint64_t height) const {
    auto it = chains_[chain].heights.find(height);
    return it == chains_[chain].heights.end() ? nullptr : &it->second.rec;
}

double Node::notarization_latency_mean_ms() const {
    if (notarization_latency_cnt_ == 0) return 0;
    return (double)notarization_latency_sum_ / (double)notarization_latency_cnt_ / 1e6;
}

bool Node::verify_chain_integrity(std::string* why) const {
    for (std::uint32_t c = 0; c < chains_.size(); ++c) {
        const auto& committed = chains_[c].committed;
        for (std::uint64_t h = 1; h < committed.size(); ++h) {
            GroupId g{kGroupNotary, c, epoch_of(h - 1)};
            if (!kc_->verify_threshold(g, committed[h - 1]->hash,
                                       committed[h]->parent_notarization)) {
                if (why) {
                    *why = "chain " + std::to_string(c) + " height " + std::to_string(h) +
                           ": embedded notarization does not verify";
                }
                return false;
            }
        }
    }
    return true;
}

const ThresholdSignature* Node::notarization_of(std::uint32_t chain,
                                                std::uint64_t height) const {
    auto it = notary_sig_.find({chain, height});
    return it == notary_sig_.end() ? nullptr : &it->second;
}

const ThresholdSignature* Node::compaction_notarization_of(std::uint64_t index) const {
    auto it = centry_sig_.find(index);
    return it == centry_sig_.end() ? nullptr : &it->second;
}

std::optional<std::pair<Digest, std::vector<NodeId>>> Node::election_view(
    std::uint32_t chain, std::uint64_t height) const {
    std::uint64_t epoch = epoch_of(height);
    if (!epoch_ready(epoch)) return std::nullopt;
    return std::make_pair(crs_[epoch].value,
                          epoch_config(epoch).notary_committees.at(chain));
}

std::vector<Digest> Node::committed_payload_union() const {
    std::vector<Digest> out;
    for (const auto& cs : chains_) {
        for (const auto& b : cs.committed) {
            out.insert(out.end(), b->payload.begin(), b->payload.end());
        }
    }
    return out;
}

}  // namespace latsim
