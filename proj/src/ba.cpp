// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0

#include "latsim/ba.hpp"

#include <algorithm>

namespace latsim {

namespace {

const Digest& bottom_digest() {
    static const Digest d = sha256("lat.ba.bottom");
    return d;
}
const Digest& skip_digest() {
    static const Digest d = sha256("lat.ba.skip");
    return d;
}

}  // namespace

Digest BaValue::wire_digest() const {
    switch (kind) {
        case Value: return hash;
        case Bottom: return bottom_digest();
        case Skip: return skip_digest();
    }
    return {};
}

BaValue BaValue::from_wire(const Digest& d) {
    if (d == bottom_digest()) return bottom();
    if (d == skip_digest()) return skip();
    return value(d);
}

Bytes BaMessage::encode() const {
    Enc e;
    e.u8((std::uint8_t)kind);
    e.u32(chain);
    e.u64(height);
    e.u64(round);
    e.digest(value.wire_digest());
    e.u64(sender);
    e.digest(sigma_tag);
    return e.take();
}

std::optional<BaMessage> BaMessage::decode(std::span<const std::uint8_t> data) {
    Dec d(data);
    BaMessage m;
    std::uint8_t kind;
    Digest value_digest;
    if (!d.u8(kind) || kind > 2) return std::nullopt;
    m.kind = (BaMsgKind)kind;
    if (!d.u32(m.chain) || !d.u64(m.height) || !d.u64(m.round) ||
        !d.digest(value_digest) || !d.u64(m.sender) || !d.digest(m.sigma_tag) ||
        !d.done()) {
        return std::nullopt;
    }
    m.value = BaValue::from_wire(value_digest);
    return m;
}

Bytes compute_status(std::uint32_t shard_id, std::uint32_t chain_id,
                     std::uint64_t height) {
    Enc e;
    e.raw("lat.status.v1");
    e.u32(shard_id);
    e.u32(chain_id);
    e.u64(height);
    return e.take();
}

std::optional<std::tuple<std::uint32_t, std::uint32_t, std::uint64_t>> parse_status(
    std::span<const std::uint8_t> data) {
    constexpr std::string_view tag = "lat.status.v1";
    if (data.size() != tag.size() + 16) return std::nullopt;
    if (std::string_view((const char*)data.data(), tag.size()) != tag) return std::nullopt;
    Dec d(data.subspan(tag.size()));
    std::uint32_t shard, chain;
    std::uint64_t height;
    if (!d.u32(shard) || !d.u32(chain) || !d.u64(height)) return std::nullopt;
    return std::make_tuple(shard, chain, height);
}

NodeId elect_leader(std::span<const std::pair<NodeId, Signature>> valid_inits,
                    const Digest& crs) {
    if (valid_inits.empty()) throw EmptySet("elect_leader: no valid init messages");
    NodeId best = 0;
    U256 best_dist;
    bool first = true;
    for (const auto& [node, sigma] : valid_inits) {
        U256 dist = vrf_distance(crs, sigma);
        if (first || dist < best_dist || (dist == best_dist && node < best)) {
            best = node;
            best_dist = dist;
            first = false;
        }
    }
    return best;
}

bool should_propose(const KeyChain& kc, NodeId node, std::span<const std::uint8_t> status,
                    const Digest& crs, Fraction delta) {
    if (delta.den == 0 || delta.num == 0 || delta.num > delta.den) {
        throw std::invalid_argument("delta must be a fraction in (0,1]");
    }
    Signature sig = kc.sign(node, status);
    return within_fraction(vrf_distance(crs, sig), delta);
}

bool MessageLedger::record_init(NodeId sender, const BaValue& v, const Signature& sigma) {
    auto it = inits_.find(sender);
    if (it == inits_.end()) {
        inits_.emplace(sender, InitInfo{v, sigma});
        return true;
    }
    if (!(it->second.value == v)) {
        // second distinct value: proof of equivocation, drop from election
        return init_equivocators_.insert(sender).second;
    }
    return false;
}

bool MessageLedger::record_vote(BaMsgKind kind, std::uint64_t round, NodeId sender,
                                const BaValue& v) {
    auto& slots = kind == BaMsgKind::PreCommit ? precommits_ : commits_;
    Slot& slot = slots[round];
    Digest wire = v.wire_digest();
    auto [it, fresh] = slot.first_by_sender.emplace(sender, wire);
    if (!fresh) {
        if (!(it->second == wire)) ++vote_equivocations_;  // first message kept
        return false;
    }
    ++slot.counts[wire];
    return true;
}

const MessageLedger::Slot* MessageLedger::slot_for(BaMsgKind kind,
                                                   std::uint64_t round) const {
    const auto& slots = kind == BaMsgKind::PreCommit ? precommits_ : commits_;
    auto it = slots.find(round);
    return it == slots.end() ? nullptr : &it->second;
}

std::uint32_t MessageLedger::precommit_count(std::uint64_t round, const BaValue& v) const {
    const Slot* s = slot_for(BaMsgKind::PreCommit, round);
    if (!s) return 0;
    auto it = s->counts.find(v.wire_digest());
    return it == s->counts.end() ? 0 : it->second;
}

std::uint32_t MessageLedger::commit_count(std::uint64_t round, const BaValue& v) const {
    const Slot* s = slot_for(BaMsgKind::Commit, round);
    if (!s) return 0;
    auto it = s->counts.find(v.wire_digest());
    return it == s->counts.end() ? 0 : it->second;
}

std::uint32_t MessageLedger::commit_total(std::uint64_t round) const {
    const Slot* s = slot_for(BaMsgKind::Commit, round);
    return s ? (std::uint32_t)s->first_by_sender.size() : 0;
}

std::optional<std::pair<std::uint64_t, BaValue>> MessageLedger::precommit_quorum_in(
    std::uint64_t lo, std::uint64_t hi, std::uint32_t q) const {
    if (lo > hi) return std::nullopt;
    for (auto it = precommits_.rbegin(); it != precommits_.rend(); ++it) {
        if (it->first > hi) continue;
        if (it->first < lo) break;
        for (const auto& [wire, count] : it->second.counts) {
            if (count < q) continue;
            BaValue v = BaValue::from_wire(wire);
            if (v.decidable()) return std::make_pair(it->first, v);
        }
    }
    return std::nullopt;
}

std::optional<std::uint64_t> MessageLedger::commit_round_with_total(
    std::uint64_t lo, std::uint32_t q) const {
    for (auto it = commits_.rbegin(); it != commits_.rend(); ++it) {
        if (it->first < lo) break;
        if (it->second.first_by_sender.size() >= q) return it->first;
    }
    return std::nullopt;
}

std::optional<std::pair<std::uint64_t, BaValue>> MessageLedger::commit_quorum(
    std::uint32_t q) const {
    for (const auto& [round, slot] : commits_) {
        for (const auto& [wire, count] : slot.counts) {
            if (count < q) continue;
            BaValue v = BaValue::from_wire(wire);
            if (v.decidable()) return std::make_pair(round, v);
        }
    }
    return std::nullopt;
}

std::vector<std::pair<NodeId, Signature>> MessageLedger::election_set() const {
    std::vector<std::pair<NodeId, Signature>> out;
    for (const auto& [node, info] : inits_) {
        if (init_equivocators_.count(node)) continue;
        out.emplace_back(node, info.sigma);
    }
    return out;
}

std::optional<BaValue> MessageLedger::init_value_of(NodeId sender) const {
    auto it = inits_.find(sender);
    if (it == inits_.end()) return std::nullopt;
    return it->second.value;
}

BaInstance::BaInstance(BaParams params, const KeyChain* kc, NodeId self,
                       std::optional<BaValue> my_initial_value, bool member)
    : params_(std::move(params)),
      kc_(kc),
      self_(self),
      initial_value_(my_initial_value),
      member_(member),
      status_(compute_status(params_.shard, params_.chain, params_.height)) {}

bool BaInstance::validate(const BaMessage& msg) const {
    if (msg.chain != params_.chain || msg.height != params_.height) return false;
    if (std::find(params_.committee.begin(), params_.committee.end(), msg.sender) ==
        params_.committee.end()) {
        return false;
    }
    switch (msg.kind) {
        case BaMsgKind::Init: {
            if (!msg.value.is_value()) return false;
            if (kc_ == nullptr) return true;
            Signature sigma{msg.sender, sha256(status_), msg.sigma_tag};
            return kc_->verify(msg.sender,
                               std::span<const std::uint8_t>(status_.data(), status_.size()),
                               sigma);
        }
        case BaMsgKind::PreCommit:
            return msg.round >= 1 && msg.value.decidable();
        case BaMsgKind::Commit:
            return msg.round >= 1;
    }
    return false;
}

BaActions BaInstance::start(std::int64_t now) {
    BaActions out;
    if (!member_) return out;  // observers never vote
    start_time_ = now;
    round_log_.emplace_back(1, now);
    clock_anchor_ = now;
    clock_base_ = 0;
    state_.step = BaStep::PreCommit;  // waiting for the step-2 boundary
    if (initial_value_.has_value()) {
        BaMessage init;
        init.kind = BaMsgKind::Init;
        init.chain = params_.chain;
        init.height = params_.height;
        init.round = 0;
        init.value = *initial_value_;
        init.sender = self_;
        if (kc_ != nullptr) {
            init.sigma_tag =
                kc_->sign(self_, std::span<const std::uint8_t>(status_.data(), status_.size()))
                    .tag;
        }
        ledger_.record_init(self_, init.value, Signature{self_, sha256(status_), init.sigma_tag});
        out.gossip.push_back(init);
    }
    out.tick = BaActions::Tick{1, 2, 2 * params_.lambda};
    return out;
}

void BaInstance::step2_actions(std::int64_t now, BaActions& out) {
    (void)now;
    BaMessage pre;
    pre.kind = BaMsgKind::PreCommit;
    pre.chain = params_.chain;
    pre.height = params_.height;
    pre.round = state_.round;
    pre.sender = self_;
    if (state_.lock_value == BaValue::bottom()) {
        auto inits = ledger_.election_set();
        if (!inits.empty()) {
            NodeId leader = elect_leader(inits, params_.crs);
            pre.value = *ledger_.init_value_of(leader);
        } else {
            pre.value = BaValue::bottom();
        }
    } else {
        pre.value = state_.lock_value;
    }
    ledger_.record_vote(pre.kind, pre.round, self_, pre.value);
    out.gossip.push_back(pre);
    state_.step = BaStep::Commit;
    step3_done_this_round_ = false;
    out.tick = BaActions::Tick{state_.round, 3, 2 * params_.lambda};
}

BaActions BaInstance::on_tick(std::int64_t now, std::uint64_t round, int step) {
    BaActions out;
    if (decided()) return out;
    if (round != state_.round) return out;  // stale tick from a superseded round
    if (step == 2) {
        if (state_.step != BaStep::PreCommit) return out;
        step2_actions(now, out);
    } else if (step == 3) {
        if (state_.step != BaStep::Commit || step3_done_this_round_) return out;
        step3_done_this_round_ = true;
        BaMessage com;
        com.kind = BaMsgKind::Commit;
        com.chain = params_.chain;
        com.height = params_.height;
        com.round = state_.round;
        com.sender = self_;
        auto quorum =
            ledger_.precommit_quorum_in(state_.round, state_.round, params_.quorum());
        if (quorum.has_value()) {
            state_.lock_value = quorum->second;
            state_.lock_round = state_.round;
            com.value = quorum->second;
        } else {
            com.value = BaValue::skip();
        }
        ledger_.record_vote(com.kind, com.round, self_, com.value);
        out.gossip.push_back(com);
        state_.step = BaStep::Wait;
        scan_conditions(now, out);
    }
    return out;
}

BaActions BaInstance::on_message(std::int64_t now, const BaMessage& msg) {
    BaActions out;
    if (!validate(msg)) return out;  // invalid signature or shape: dropped
    bool changed = false;
    if (msg.kind == BaMsgKind::Init) {
        Signature sigma{msg.sender, sha256(status_), msg.sigma_tag};
        changed = ledger_.record_init(msg.sender, msg.value, sigma);
    } else {
        changed = ledger_.record_vote(msg.kind, msg.round, msg.sender, msg.value);
    }
    if (changed && !decided()) scan_conditions(now, out);
    return out;
}

void BaInstance::scan_conditions(std::int64_t now, BaActions& out) {
    const std::uint32_t q = params_.quorum();
    for (;;) {
        // decide as soon as one decidable value has a commit quorum
        if (auto dq = ledger_.commit_quorum(q); dq.has_value()) {
            state_.decided = dq->second;
            decide_time_ = now;
            decide_round_ = dq->first;
            return;
        }
        if (!member_) return;  // observers only apply the decide rule
        // condition 1: lock on a quorum at r in (lock_round, round]
        if (auto c1 = ledger_.precommit_quorum_in(state_.lock_round + 1, state_.round, q);
            c1.has_value()) {
            state_.lock_value = c1->second;
            state_.lock_round = c1->first;
            // no jump; keep scanning (a later condition may still fire)
        }
        // condition 2 (forward): quorum ahead of the current round
        if (auto c2 = ledger_.precommit_quorum_in(state_.round + 1, ~0ull, q);
            c2.has_value()) {
            state_.round = c2->first;
            state_.lock_value = c2->second;
            state_.lock_round = c2->first;
            max_round_ = std::max(max_round_, state_.round);
            round_log_.emplace_back(state_.round, now);
            clock_anchor_ = now;
            clock_base_ = 2 * params_.lambda;
            state_.step = BaStep::PreCommit;
            step2_actions(now, out);
            continue;
        }
        // condition 3 (forward): a full commit round at or ahead of ours
        if (auto c3 = ledger_.commit_round_with_total(state_.round, q); c3.has_value()) {
            state_.round = *c3 + 1;
            max_round_ = std::max(max_round_, state_.round);
            round_log_.emplace_back(state_.round, now);
            clock_anchor_ = now;
            clock_base_ = 2 * params_.lambda;
            state_.step = BaStep::PreCommit;
            step2_actions(now, out);
            continue;
        }
        return;
    }
}

}  // namespace latsim
