// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "latsim/crypto.hpp"

namespace latsim {

/// A value the agreement can handle: a candidate block hash, bottom, or
/// the commit-phase skip sentinel. Skip can never be decided.
struct BaValue {
    enum Kind : std::uint8_t { Value = 0, Bottom = 1, Skip = 2 } kind = Bottom;
    Digest hash;  // meaningful iff kind == Value

    static BaValue value(const Digest& h) { return {Value, h}; }
    static BaValue bottom() { return {Bottom, {}}; }
    static BaValue skip() { return {Skip, {}}; }

    bool is_value() const { return kind == Value; }
    bool decidable() const { return kind != Skip; }  // v in V or bottom

    Digest wire_digest() const;
    static BaValue from_wire(const Digest& d);
    friend bool operator==(const BaValue&, const BaValue&) = default;
};

enum class BaMsgKind : std::uint8_t { Init = 0, PreCommit = 1, Commit = 2 };

/// Wire form: kind(1) | chain(4) | height(8) | round(8) | value digest(32)
/// | sender(8) | signature tag(32), all big-endian.
struct BaMessage {
    BaMsgKind kind = BaMsgKind::Init;
    std::uint32_t chain = 0;
    std::uint64_t height = 0;
    std::uint64_t round = 0;  // 0 for Init
    BaValue value;
    NodeId sender = 0;
    Digest sigma_tag;  // Init only; zero otherwise

    Bytes encode() const;
    static std::optional<BaMessage> decode(std::span<const std::uint8_t> data);
    friend bool operator==(const BaMessage&, const BaMessage&) = default;
};

/// Public predictable information identifying one agreement instance.
Bytes compute_status(std::uint32_t shard_id, std::uint32_t chain_id, std::uint64_t height);
std::optional<std::tuple<std::uint32_t, std::uint32_t, std::uint64_t>> parse_status(
    std::span<const std::uint8_t> data);

class EmptySet : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// argmin over senders of |crs - Hash(sigma)|; ties break to the smallest
/// node id.
NodeId elect_leader(std::span<const std::pair<NodeId, Signature>> valid_inits,
                    const Digest& crs);

/// Proposal self-selection: sign the status, propose iff the VRF distance
/// is within delta of the field.
bool should_propose(const KeyChain& kc, NodeId node, std::span<const std::uint8_t> status,
                    const Digest& crs, Fraction delta);

/// Per-(round, kind) tallies over distinct senders, plus the init set.
/// Duplicate (sender, round, kind) messages are ignored; an equivocating
/// sender keeps its first message and is flagged. A sender caught sending
/// two different init values is excluded from leader election.
class MessageLedger {
public:
    struct InitInfo {
        BaValue value;
        Signature sigma;
    };

    /// Both return true when the ledger changed.
    bool record_init(NodeId sender, const BaValue& v, const Signature& sigma);
    bool record_vote(BaMsgKind kind, std::uint64_t round, NodeId sender, const BaValue& v);

    std::uint32_t precommit_count(std::uint64_t round, const BaValue& v) const;
    std::uint32_t commit_count(std::uint64_t round, const BaValue& v) const;
    std::uint32_t commit_total(std::uint64_t round) const;

    /// Largest round in [lo, hi] holding a quorum of q pre-commits on one
    /// decidable value, with that value.
    std::optional<std::pair<std::uint64_t, BaValue>> precommit_quorum_in(
        std::uint64_t lo, std::uint64_t hi, std::uint32_t q) const;
    /// Largest round >= lo whose distinct-sender commit total reaches q.
    std::optional<std::uint64_t> commit_round_with_total(std::uint64_t lo,
                                                         std::uint32_t q) const;
    /// Any (round, decidable value) commit quorum of size q.
    std::optional<std::pair<std::uint64_t, BaValue>> commit_quorum(std::uint32_t q) const;

    /// U_q: senders of exactly one valid init value (equivocators out).
    std::vector<std::pair<NodeId, Signature>> election_set() const;
    std::optional<BaValue> init_value_of(NodeId sender) const;
    const std::set<NodeId>& init_equivocators() const { return init_equivocators_; }
    std::size_t equivocation_flags() const { return vote_equivocations_; }
    bool has_init(NodeId sender) const { return inits_.count(sender) != 0; }

private:
    struct Slot {
        std::map<NodeId, Digest> first_by_sender;  // wire digest of first message
        std::unordered_map<Digest, std::uint32_t, U256Hash> counts;
    };
    const Slot* slot_for(BaMsgKind kind, std::uint64_t round) const;

    std::map<NodeId, InitInfo> inits_;
    std::set<NodeId> init_equivocators_;
    std::map<std::uint64_t, Slot> precommits_;
    std::map<std::uint64_t, Slot> commits_;
    std::size_t vote_equivocations_ = 0;
};

struct BaParams {
    std::uint32_t chain = 0;
    std::uint64_t height = 0;
    std::uint32_t shard = 0;
    std::int64_t lambda = 0;  // ns
    Digest crs;
    std::vector<NodeId> committee;

    std::uint32_t n() const { return (std::uint32_t)committee.size(); }
    std::uint32_t t_max() const { return (n() - 1) / 3; }
    std::uint32_t quorum() const { return 2 * t_max() + 1; }
};

enum class BaStep { Init, PreCommit, Commit, Wait };

struct BaState {
    std::uint64_t round = 1;
    BaValue lock_value = BaValue::bottom();
    std::uint64_t lock_round = 0;
    BaStep step = BaStep::Init;
    std::optional<BaValue> decided;
};

/// What a transition wants from its driver: messages to gossip and at most
/// one future tick. delay is relative to the transition's `now`.
struct BaActions {
    std::vector<BaMessage> gossip;
    struct Tick {
        std::uint64_t round;
        int step;  // 2 or 3
        std::int64_t delay;
    };
    std::optional<Tick> tick;
};

/// One node's agreement machine for a single (chain, height): four-step
/// rounds on a 2-lambda cadence, lock tracking, forward conditions, and
/// the decide rule. Pure transitions; the caller owns the clock.
class BaInstance {
public:
    /// member=false builds a decide-only observer: it tallies messages and
    /// applies the decide rule but never votes or advances rounds.
    BaInstance(BaParams params, const KeyChain* kc, NodeId self,
               std::optional<BaValue> my_initial_value, bool member = true);

    BaActions start(std::int64_t now);
    BaActions on_tick(std::int64_t now, std::uint64_t round, int step);
    BaActions on_message(std::int64_t now, const BaMessage& msg);

    const BaState& state() const { return state_; }
    const BaParams& params() const { return params_; }
    const MessageLedger& ledger() const { return ledger_; }
    bool decided() const { return state_.decided.has_value(); }
    BaValue decision() const { return *state_.decided; }
    std::int64_t decide_time() const { return decide_time_; }
    std::uint64_t decide_round() const { return decide_round_; }
    std::uint64_t max_round() const { return max_round_; }
    std::int64_t start_time() const { return start_time_; }
    /// Local clock value (0 at the start of round 1, 2-lambda at entry to
    /// any later round).
    std::int64_t local_clock(std::int64_t now) const {
        return clock_base_ + (now - clock_anchor_);
    }
    /// (round, entry time) pairs, first round included.
    const std::vector<std::pair<std::uint64_t, std::int64_t>>& round_log() const {
        return round_log_;
    }

private:
    bool validate(const BaMessage& msg) const;
    void step2_actions(std::int64_t now, BaActions& out);
    void scan_conditions(std::int64_t now, BaActions& out);

    BaParams params_;
    const KeyChain* kc_;
    NodeId self_;
    std::optional<BaValue> initial_value_;
    bool member_;
    Bytes status_;
    BaState state_;
    MessageLedger ledger_;
    std::vector<std::pair<std::uint64_t, std::int64_t>> round_log_;
    std::int64_t start_time_ = 0;
    std::int64_t clock_anchor_ = 0;
    std::int64_t clock_base_ = 0;
    std::int64_t decide_time_ = -1;
    std::uint64_t decide_round_ = 0;
    std::uint64_t max_round_ = 1;
    bool step3_done_this_round_ = false;
};

}  // namespace latsim
