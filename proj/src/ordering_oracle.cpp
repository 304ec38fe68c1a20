// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0

#include "latsim/ordering_oracle.hpp"

#include <algorithm>
#include <bit>

namespace latsim {

OrderingOracle::OrderingOracle(OrderingParams params, std::uint64_t first_batch_index)
    : params_(params), phi_(params.resolved_phi()), batch_index_(first_batch_index) {}

void OrderingOracle::preload_delivered(const Digest& h, std::uint32_t, std::uint64_t) {
    delivered_.insert(h);
}

bool OrderingOracle::reaches(const Block& from, const Digest& target,
                             std::unordered_map<Digest, bool, U256Hash>& memo) const {
    if (from.hash == target) return true;
    auto it = memo.find(from.hash);
    if (it != memo.end()) return it->second;
    memo[from.hash] = false;  // DAG: no cycles, placeholder guards reentry anyway
    bool hit = false;
    auto follow = [&](const Digest& next) {
        if (hit) return;
        if (next == target) {
            hit = true;
            return;
        }
        auto b = by_hash_.find(next);
        if (b != by_hash_.end() && !delivered_.count(next)) {
            hit = reaches(*b->second, target, memo);
        }
    };
    if (from.height > 0) follow(from.parent_hash);
    for (const auto& a : from.acks) follow(a.acked_block_hash);
    memo[from.hash] = hit;
    return hit;
}

OrderingOracle::View OrderingOracle::compute_view() const {
    View v;
    // candidate blocks: pending, acking only delivered blocks
    for (const auto& b : pending_) {
        bool ok = true;
        if (b->height > 0 && !delivered_.count(b->parent_hash)) ok = false;
        for (const auto& a : b->acks) {
            if (!delivered_.count(a.acked_block_hash)) ok = false;
        }
        if (ok) v.candidates.push_back(b);
    }
    // lowest pending height per chain
    std::vector<std::int64_t> gahv(params_.num_chains, -1);
    std::vector<BlockPtr> front(params_.num_chains);
    for (const auto& b : pending_) {
        if (gahv[b->chain_id] < 0 || (std::int64_t)b->height < gahv[b->chain_id]) {
            gahv[b->chain_id] = (std::int64_t)b->height;
            front[b->chain_id] = b;
        }
    }
    for (const auto& c : v.candidates) {
        std::unordered_map<Digest, bool, U256Hash> memo;
        std::uint64_t ans = 0;
        for (const auto& b : pending_) {
            if (reaches(*b, c->hash, memo)) ans |= 1ull << b->chain_id;
        }
        std::vector<HeightEntry> ahv(params_.num_chains, HeightEntry::undefined());
        for (std::uint32_t q = 0; q < params_.num_chains; ++q) {
            if (gahv[q] < 0) continue;  // chain not in the global acking set
            if (reaches(*front[q], c->hash, memo)) {
                ahv[q] = HeightEntry::at((std::uint64_t)gahv[q]);
            } else {
                ahv[q] = HeightEntry::infinite();
            }
        }
        v.ans.push_back(ans);
        v.ahv.push_back(std::move(ahv));
        v.global_ans |= ans;
    }
    return v;
}

std::uint64_t OrderingOracle::count_less(const View& v, std::size_t i,
                                         std::size_t j) const {
    std::uint64_t c = 0;
    for (std::uint32_t q = 0; q < params_.num_chains; ++q) {
        if (entry_lt(v.ahv[i][q], v.ahv[j][q])) ++c;
    }
    return c;
}

std::optional<int> OrderingOracle::grade_of(const View& v, std::size_t i,
                                            std::size_t j) const {
    std::int64_t count = (std::int64_t)count_less(v, i, j);
    if (count > (std::int64_t)phi_) return 1;
    std::int64_t slack = (std::int64_t)params_.num_chains - std::popcount(v.global_ans);
    if (count < (std::int64_t)phi_ - slack) return 0;
    return std::nullopt;
}

std::vector<std::size_t> OrderingOracle::stable_indices(const View& v) const {
    // future-proof membership: count(j, i) can never exceed phi even if all
    // unseen chains side with j
    std::int64_t slack = (std::int64_t)params_.num_chains - std::popcount(v.global_ans);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.candidates.size(); ++i) {
        bool ok = true;
        for (std::size_t j = 0; j < v.candidates.size() && ok; ++j) {
            if ((std::int64_t)count_less(v, j, i) + slack > (std::int64_t)phi_) ok = false;
        }
        if (ok) out.push_back(i);
    }
    return out;
}

Criteria OrderingOracle::classify(const View& v,
                                  const std::vector<std::size_t>& stable) const {
    if (v.candidates.empty()) return Criteria::NoOutput;
    if (std::popcount(v.global_ans) == (int)params_.num_chains) return Criteria::Normal;
    if (stable.empty() || stable.size() == v.candidates.size()) return Criteria::NoOutput;
    std::vector<bool> in_stable(v.candidates.size(), false);
    for (auto i : stable) in_stable[i] = true;
    for (std::size_t j = 0; j < v.candidates.size(); ++j) {
        if (in_stable[j]) continue;
        bool dominated = false;
        for (auto i : stable) {
            auto g = grade_of(v, i, j);
            if (g.has_value() && *g == 1) {
                dominated = true;
                break;
            }
        }
        if (!dominated) return Criteria::NoOutput;
    }
    for (auto i : stable) {
        if ((std::uint32_t)std::popcount(v.ans[i]) < params_.num_chains - phi_) {
            return Criteria::NoOutput;
        }
    }
    return Criteria::Early;
}

DeliveryBatch OrderingOracle::emit(const std::vector<BlockPtr>& blocks,
                                   DeliveryMode mode) {
    DeliveryBatch batch;
    batch.mode = mode;
    batch.batch_index = batch_index_++;
    batch.blocks = blocks;
    std::sort(batch.blocks.begin(), batch.blocks.end(),
              [](const BlockPtr& a, const BlockPtr& b) { return a->hash < b->hash; });
    for (const auto& b : batch.blocks) {
        delivered_.insert(b->hash);
        pending_.erase(std::remove_if(pending_.begin(), pending_.end(),
                                      [&](const BlockPtr& p) { return p->hash == b->hash; }),
                       pending_.end());
    }
    return batch;
}

std::vector<DeliveryBatch> OrderingOracle::drain() {
    std::vector<DeliveryBatch> out;
    for (;;) {
        View v = compute_view();
        auto stable = stable_indices(v);
        Criteria crit = classify(v, stable);
        if (crit == Criteria::NoOutput) break;
        std::vector<BlockPtr> blocks;
        for (auto i : stable) blocks.push_back(v.candidates[i]);
        out.push_back(emit(blocks, crit == Criteria::Normal ? DeliveryMode::Normal
                                                            : DeliveryMode::Early));
    }
    return out;
}

std::vector<DeliveryBatch> OrderingOracle::receive_block(BlockPtr b) {
    if (delivered_.count(b->hash) || by_hash_.count(b->hash)) return {};
    pending_.push_back(b);
    by_hash_[b->hash] = b;
    return drain();
}

std::vector<DeliveryBatch> OrderingOracle::flush_all() {
    std::vector<DeliveryBatch> out;
    while (!pending_.empty()) {
        View v = compute_view();
        if (v.candidates.empty()) {
            throw std::logic_error("oracle flush with incomplete dependencies");
        }
        out.push_back(emit(v.candidates, DeliveryMode::Flush));
    }
    return out;
}

std::vector<std::uint32_t> OrderingOracle::ans_of(const Digest& candidate) const {
    View v = compute_view();
    for (std::size_t i = 0; i < v.candidates.size(); ++i) {
        if (v.candidates[i]->hash == candidate) {
            std::vector<std::uint32_t> out;
            for (std::uint32_t q = 0; q < params_.num_chains; ++q) {
                if (v.ans[i] & (1ull << q)) out.push_back(q);
            }
            return out;
        }
    }
    throw NotCandidate("oracle: block is not a candidate");
}

std::vector<HeightEntry> OrderingOracle::ahv_of(const Digest& candidate) const {
    View v = compute_view();
    for (std::size_t i = 0; i < v.candidates.size(); ++i) {
        if (v.candidates[i]->hash == candidate) return v.ahv[i];
    }
    throw NotCandidate("oracle: block is not a candidate");
}

std::uint64_t OrderingOracle::pair_count(const Digest& b1, const Digest& b2) const {
    View v = compute_view();
    std::optional<std::size_t> i1, i2;
    for (std::size_t i = 0; i < v.candidates.size(); ++i) {
        if (v.candidates[i]->hash == b1) i1 = i;
        if (v.candidates[i]->hash == b2) i2 = i;
    }
    if (!i1 || !i2) throw NotCandidate("oracle: block is not a candidate");
    return count_less(v, *i1, *i2);
}

std::vector<BlockPtr> OrderingOracle::candidate_blocks() const {
    return compute_view().candidates;
}

}  // namespace latsim
