// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0

#include "latsim/ordering.hpp"

#include <algorithm>
#include <bit>
#include <cassert>

namespace latsim {

namespace {
inline int popcount(std::uint64_t v) { return std::popcount(v); }
inline std::uint64_t bit(std::uint32_t i) { return 1ull << i; }
}  // namespace

std::uint32_t OrderingParams::resolved_phi() const {
    std::uint32_t n = num_chains;
    // 2*f_max+1 drops below n/2 for n in {2,3}; clamp the default to the
    // smallest admissible threshold there. The lower bound admits equality
    // because the published default sits exactly at n/2 when n is 6.
    std::uint32_t p = phi == 0 ? std::max(2 * f_max() + 1, (n + 1) / 2) : phi;
    if (!(p <= n && 2 * p >= n && p >= 1)) {
        throw std::invalid_argument("phi must satisfy n >= phi >= n/2");
    }
    return p;
}

OrderingState::OrderingState(OrderingParams params, std::uint64_t first_batch_index)
    : params_(params),
      phi_(params.resolved_phi()),
      pend_(params.num_chains),
      cand_(params.num_chains),
      delivered_tip_(params.num_chains, -1),
      matrix_(params.num_chains, std::vector<std::uint16_t>(params.num_chains, 0)),
      batch_index_(first_batch_index) {
    if (params.num_chains == 0 || params.num_chains > 64) {
        throw std::invalid_argument("ordering supports 1..64 chains");
    }
}

void OrderingState::preload_delivered(const Digest& h, std::uint32_t chain,
                                      std::uint64_t height) {
    delivered_.insert(h);
    delivered_tip_[chain] = std::max(delivered_tip_[chain], (std::int64_t)height);
}

std::size_t OrderingState::pending_chain_count() const {
    return (std::size_t)popcount(pending_mask_);
}

std::uint32_t OrderingState::chain_of(const Digest& candidate) const {
    for (std::uint32_t q = 0; q < params_.num_chains; ++q) {
        if (cand_[q] && cand_[q]->blk->hash == candidate) return q;
    }
    throw NotCandidate("block is not a candidate");
}

std::vector<DeliveryBatch> OrderingState::receive_block(BlockPtr b) {
    const std::uint32_t q = b->chain_id;
    if (q >= params_.num_chains) throw std::invalid_argument("chain id out of range");
    if (delivered_.count(b->hash)) return {};

    // causal feed: heights per chain arrive in order
    std::int64_t expect =
        pend_[q].empty() ? delivered_tip_[q] + 1 : (std::int64_t)pend_[q].back()->height + 1;
    if ((std::int64_t)b->height != expect) {
        throw std::invalid_argument("out-of-order block fed to total ordering");
    }

    // union of the targets' candidate-reach masks
    std::uint64_t reach = 0;
    bool all_delivered = true;
    auto absorb = [&](const Digest& target) {
        if (delivered_.count(target)) return;
        all_delivered = false;
        auto it = reach_.find(target);
        if (it != reach_.end()) reach |= it->second;
        ops_ += 1;
    };
    if (b->height > 0) absorb(b->parent_hash);
    for (const auto& a : b->acks) absorb(a.acked_block_hash);

    bool first_of_chain = pend_[q].empty();
    pend_[q].push_back(b);
    arrival_.push_back(b);
    pending_mask_ |= bit(q);

    if (all_delivered) {
        // fresh candidate: nothing pending can ack it yet
        Cand c;
        c.blk = b;
        c.w = bit(q);
        c.ans = bit(q);
        c.first_acker.assign(params_.num_chains, -1);
        c.first_acker[q] = (std::int64_t)b->height;
        cand_[q] = std::move(c);
        cand_mask_ |= bit(q);
        reach = bit(q);
        reach_[b->hash] = reach;
        for (std::uint64_t m = cand_mask_ & ~bit(q); m; m &= m - 1) {
            std::uint32_t d = (std::uint32_t)std::countr_zero(m);
            matrix_[q][d] = (cand_[d]->w & bit(q)) ? 0 : 1;
            matrix_[d][q] = (std::uint16_t)(popcount(cand_[d]->w & ~bit(q)));
            ops_ += 2;
        }
    } else {
        reach_[b->hash] = reach;
        for (std::uint64_t m = reach; m; m &= m - 1) {
            std::uint32_t j = (std::uint32_t)std::countr_zero(m);
            Cand& c = *cand_[j];
            c.ans |= bit(q);
            if (c.first_acker[q] < 0) c.first_acker[q] = (std::int64_t)b->height;
            if (first_of_chain && !(c.w & bit(q))) {
                // chain q's lowest pending block now reaches candidate j
                c.w |= bit(q);
                for (std::uint64_t dm = cand_mask_ & ~bit(j); dm; dm &= dm - 1) {
                    std::uint32_t d = (std::uint32_t)std::countr_zero(dm);
                    if (!(cand_[d]->w & bit(q))) {
                        ++matrix_[j][d];
                    } else {
                        // q used to count for d over j; no longer
                        --matrix_[d][j];
                    }
                    ops_ += 1;
                }
            }
            ops_ += 1;
        }
    }
    return drain_deliveries();
}

// Candidates no opponent can ever come to precede: even if every silent
// chain sided with the opponent, its count could not exceed phi.
std::uint64_t OrderingState::stable_set_mask() const {
    const std::int64_t slack = (std::int64_t)params_.num_chains - popcount(pending_mask_);
    const std::int64_t bound = (std::int64_t)phi_ - slack;  // stable: count <= bound
    std::uint64_t stable = 0;
    for (std::uint64_t cm = cand_mask_; cm; cm &= cm - 1) {
        std::uint32_t c = (std::uint32_t)std::countr_zero(cm);
        bool ok = true;
        for (std::uint64_t dm = cand_mask_; dm && ok; dm &= dm - 1) {
            std::uint32_t d = (std::uint32_t)std::countr_zero(dm);
            if ((std::int64_t)matrix_[d][c] > bound) ok = false;
        }
        if (ok) stable |= bit(c);
    }
    return stable;
}

Criteria OrderingState::classify(std::uint64_t stable_mask) const {
    if (cand_mask_ == 0) return Criteria::NoOutput;
    if (pending_chain_count() == params_.num_chains) return Criteria::Normal;
    if (stable_mask == 0) return Criteria::NoOutput;
    std::uint64_t rest = cand_mask_ & ~stable_mask;
    if (rest == 0) return Criteria::NoOutput;
    // internal stability: every excluded candidate is permanently preceded
    for (std::uint64_t m = rest; m; m &= m - 1) {
        std::uint32_t b = (std::uint32_t)std::countr_zero(m);
        bool dominated = false;
        for (std::uint64_t am = stable_mask; am && !dominated; am &= am - 1) {
            std::uint32_t a = (std::uint32_t)std::countr_zero(am);
            if (matrix_[a][b] > phi_) dominated = true;
        }
        if (!dominated) return Criteria::NoOutput;
    }
    // external stability (b): members must already be widely acked
    for (std::uint64_t am = stable_mask; am; am &= am - 1) {
        std::uint32_t a = (std::uint32_t)std::countr_zero(am);
        if ((std::uint32_t)popcount(cand_[a]->ans) < params_.num_chains - phi_) {
            return Criteria::NoOutput;
        }
    }
    return Criteria::Early;
}

Criteria OrderingState::check_criteria() const { return classify(stable_set_mask()); }

DeliveryBatch OrderingState::emit(std::uint64_t chain_mask, DeliveryMode mode) {
    DeliveryBatch batch;
    batch.mode = mode;
    batch.batch_index = batch_index_++;
    for (std::uint64_t m = chain_mask; m; m &= m - 1) {
        std::uint32_t c = (std::uint32_t)std::countr_zero(m);
        batch.blocks.push_back(cand_[c]->blk);
    }
    std::sort(batch.blocks.begin(), batch.blocks.end(),
              [](const BlockPtr& a, const BlockPtr& b) { return a->hash < b->hash; });
    for (const auto& blk : batch.blocks) {
        std::uint32_t q = blk->chain_id;
        assert(!pend_[q].empty() && pend_[q].front()->hash == blk->hash);
        pend_[q].pop_front();
        delivered_.insert(blk->hash);
        delivered_tip_[q] = (std::int64_t)blk->height;
        reach_.erase(blk->hash);
    }
    rebuild();
    return batch;
}

void OrderingState::rebuild() {
    pending_mask_ = 0;
    cand_mask_ = 0;
    for (auto& c : cand_) c.reset();
    for (std::uint32_t q = 0; q < params_.num_chains; ++q) {
        if (pend_[q].empty()) continue;
        pending_mask_ |= bit(q);
        const BlockPtr& f = pend_[q].front();
        bool all_delivered = true;
        if (f->height > 0 && !delivered_.count(f->parent_hash)) all_delivered = false;
        for (const auto& a : f->acks) {
            if (!delivered_.count(a.acked_block_hash)) all_delivered = false;
        }
        if (all_delivered) {
            Cand c;
            c.blk = f;
            c.first_acker.assign(params_.num_chains, -1);
            cand_[q] = std::move(c);
            cand_mask_ |= bit(q);
        }
        ops_ += 1;
    }

    // recompute reach masks over the surviving pending blocks (arrival
    // order guarantees targets are processed before dependents)
    std::vector<BlockPtr> kept;
    kept.reserve(arrival_.size());
    for (const auto& b : arrival_) {
        if (delivered_.count(b->hash)) continue;
        std::uint64_t reach = 0;
        if (cand_[b->chain_id] && cand_[b->chain_id]->blk->hash == b->hash) {
            reach = bit(b->chain_id);
        } else {
            auto absorb = [&](const Digest& target) {
                auto it = reach_.find(target);
                if (it != reach_.end()) reach |= it->second;
                ops_ += 1;
            };
            if (b->height > 0) absorb(b->parent_hash);
            for (const auto& a : b->acks) absorb(a.acked_block_hash);
        }
        reach_[b->hash] = reach;
        bool is_front = pend_[b->chain_id].front()->hash == b->hash;
        for (std::uint64_t m = reach; m; m &= m - 1) {
            std::uint32_t j = (std::uint32_t)std::countr_zero(m);
            Cand& c = *cand_[j];
            c.ans |= bit(b->chain_id);
            if (c.first_acker[b->chain_id] < 0) {
                c.first_acker[b->chain_id] = (std::int64_t)b->height;
            }
            if (is_front) c.w |= bit(b->chain_id);
            ops_ += 1;
        }
        kept.push_back(b);
    }
    arrival_ = std::move(kept);

    for (std::uint64_t im = cand_mask_; im; im &= im - 1) {
        std::uint32_t i = (std::uint32_t)std::countr_zero(im);
        for (std::uint64_t jm = cand_mask_; jm; jm &= jm - 1) {
            std::uint32_t j = (std::uint32_t)std::countr_zero(jm);
            matrix_[i][j] = (std::uint16_t)popcount(cand_[i]->w & ~cand_[j]->w);
            ops_ += 1;
        }
    }
}

std::vector<DeliveryBatch> OrderingState::drain_deliveries() {
    std::vector<DeliveryBatch> out;
    for (;;) {
        std::uint64_t stable = stable_set_mask();
        Criteria crit = classify(stable);
        if (crit == Criteria::NoOutput) break;
        if (crit == Criteria::Normal) {
            assert(stable != 0 && "normal delivery with empty stable set");
            out.push_back(emit(stable, DeliveryMode::Normal));
        } else {
            out.push_back(emit(stable, DeliveryMode::Early));
        }
    }
    return out;
}

std::vector<DeliveryBatch> OrderingState::flush_all() {
    std::vector<DeliveryBatch> out;
    while (pending_mask_ != 0) {
        if (cand_mask_ == 0) {
            throw std::logic_error("flush with incomplete dependencies");
        }
        out.push_back(emit(cand_mask_, DeliveryMode::Flush));
    }
    return out;
}

std::vector<std::uint32_t> OrderingState::ans_of(const Digest& candidate) const {
    std::uint32_t q = chain_of(candidate);
    std::vector<std::uint32_t> out;
    for (std::uint64_t m = cand_[q]->ans; m; m &= m - 1) {
        out.push_back((std::uint32_t)std::countr_zero(m));
    }
    return out;
}

std::vector<HeightEntry> OrderingState::ahv_of(const Digest& candidate) const {
    std::uint32_t c = chain_of(candidate);
    std::vector<HeightEntry> out(params_.num_chains, HeightEntry::undefined());
    for (std::uint32_t q = 0; q < params_.num_chains; ++q) {
        if (!(pending_mask_ & bit(q))) continue;
        if (cand_[c]->w & bit(q)) {
            out[q] = HeightEntry::at(pend_[q].front()->height);
        } else {
            out[q] = HeightEntry::infinite();
        }
    }
    return out;
}

std::uint32_t OrderingState::ahv_count(const Digest& candidate) const {
    std::uint32_t c = chain_of(candidate);
    return (std::uint32_t)popcount(cand_[c]->w & pending_mask_);
}

int OrderingState::precede(const Digest& b1, const Digest& b2) const {
    std::uint32_t c1 = chain_of(b1), c2 = chain_of(b2);
    if (matrix_[c1][c2] > phi_) return 1;
    if (matrix_[c2][c1] > phi_) return -1;
    return 0;
}

std::optional<int> OrderingState::grade(const Digest& b1, const Digest& b2) const {
    std::uint32_t c1 = chain_of(b1), c2 = chain_of(b2);
    std::int64_t count = matrix_[c1][c2];
    if (count > (std::int64_t)phi_) return 1;
    std::int64_t slack = (std::int64_t)params_.num_chains - popcount(pending_mask_);
    if (count < (std::int64_t)phi_ - slack) return 0;
    return std::nullopt;
}

std::vector<BlockPtr> OrderingState::preceding_set() const {
    std::vector<BlockPtr> out;
    for (std::uint64_t cm = cand_mask_; cm; cm &= cm - 1) {
        std::uint32_t c = (std::uint32_t)std::countr_zero(cm);
        bool preceded = false;
        for (std::uint64_t dm = cand_mask_; dm && !preceded; dm &= dm - 1) {
            std::uint32_t d = (std::uint32_t)std::countr_zero(dm);
            if (matrix_[d][c] > phi_) preceded = true;
        }
        if (!preceded) out.push_back(cand_[c]->blk);
    }
    std::sort(out.begin(), out.end(),
              [](const BlockPtr& a, const BlockPtr& b) { return a->hash < b->hash; });
    return out;
}

std::vector<BlockPtr> OrderingState::candidates() const {
    std::vector<BlockPtr> out;
    for (std::uint32_t q = 0; q < params_.num_chains; ++q) {
        if (cand_[q]) out.push_back(cand_[q]->blk);
    }
    return out;
}

std::uint64_t OrderingState::matrix_count(const Digest& b1, const Digest& b2) const {
    return matrix_[chain_of(b1)][chain_of(b2)];
}

std::size_t OrderingState::pending_count() const {
    std::size_t n = 0;
    for (const auto& dq : pend_) n += dq.size();
    return n;
}

}  // namespace latsim
