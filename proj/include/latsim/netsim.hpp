// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <memory>
#include <queue>
#include <unordered_set>
#include <variant>

#include "latsim/ba.hpp"
#include "latsim/crs.hpp"
#include "latsim/lattice.hpp"
#include "latsim/report.hpp"
#include "latsim/scenario.hpp"

namespace latsim {

// -- wire payloads -----------------------------------------------------------

struct MsgBa {
    BaMessage m;
};
struct MsgBlock {
    Block b;
};
struct MsgNotaryShare {
    std::uint32_t chain = 0;
    std::uint64_t height = 0;
    Digest block_hash;
    ShareSignature share;
};
struct MsgCrsShare {
    std::uint64_t epoch = 0;  // share over R_epoch, builds R_{epoch+1}
    ShareSignature share;
};
struct MsgCompactionShare {
    std::uint64_t entry_index = 0;
    Digest entry_digest;
    std::uint64_t epoch = 0;  // selects the signing notary committee
    ShareSignature share;
};

using SimMessage =
    std::variant<MsgBa, MsgBlock, MsgNotaryShare, MsgCrsShare, MsgCompactionShare>;

Bytes encode_sim_message(const SimMessage& m);

// -- scheduling interface exposed to protocol nodes --------------------------

class NodeEnv {
public:
    virtual ~NodeEnv() = default;
    virtual void gossip(NodeId from, const SimMessage& msg) = 0;
    virtual void schedule_tick(NodeId node, std::int64_t delay, std::uint32_t chain,
                               std::uint64_t height, std::uint64_t round, int step) = 0;
    virtual void schedule_height_start(NodeId node, std::int64_t delay,
                                       std::uint32_t chain, std::uint64_t height) = 0;
    virtual void record_commit(NodeId node, std::uint32_t chain, std::uint64_t height,
                               const Digest& block_hash) = 0;
    virtual std::int64_t now() const = 0;
};

class Node;  // chain.hpp

// -- discrete-event engine ----------------------------------------------------

/// Seeded simulation of the gossip network: one-hop broadcast with a single
/// re-relay per correct receiver and digest dedup. Correct-to-correct
/// deliveries respect the lambda bound outside partition windows; Byzantine
/// sends are fully adversary-timed.
class Engine : public NodeEnv {
public:
    explicit Engine(Scenario sc);
    ~Engine() override;

    RunReport run();

    /// Re-derives a report by replaying a recorded event transcript through
    /// the same node logic, with all scheduling and gossip suppressed.
    RunReport replay(const std::vector<std::string>& transcript_lines);

    // NodeEnv
    void gossip(NodeId from, const SimMessage& msg) override;
    void schedule_tick(NodeId node, std::int64_t delay, std::uint32_t chain,
                       std::uint64_t height, std::uint64_t round, int step) override;
    void schedule_height_start(NodeId node, std::int64_t delay, std::uint32_t chain,
                               std::uint64_t height) override;
    void record_commit(NodeId node, std::uint32_t chain, std::uint64_t height,
                       const Digest& block_hash) override;
    std::int64_t now() const override { return now_; }

    // adversary surface
    void send_direct(NodeId from, NodeId to, std::int64_t at, const SimMessage& msg);
    bool is_byzantine(NodeId n, std::int64_t at) const;
    const KeyChain& keychain() const { return kc_; }
    const Scenario& scenario() const { return sc_; }
    const Node& peek_node(NodeId n) const { return *nodes_[n]; }

private:
    struct Delivery {
        NodeId to = 0;
        SimMessage msg;
        Digest digest;
    };
    struct Tick {
        NodeId node;
        std::uint32_t chain;
        std::uint64_t height;
        std::uint64_t round;
        int step;
    };
    struct HeightStart {
        NodeId node;
        std::uint32_t chain;
        std::uint64_t height;
    };
    using Payload = std::variant<Delivery, Tick, HeightStart>;
    struct Event {
        std::int64_t time;
        int phase;  // deliveries before ticks at equal times
        std::uint64_t seq;
        Payload payload;
    };
    struct EventOrder {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            if (a.phase != b.phase) return a.phase > b.phase;
            return a.seq > b.seq;
        }
    };

    void push(std::int64_t time, int phase, Payload p);
    std::int64_t sample_delay();
    std::int64_t adjusted_delivery_time(NodeId from, NodeId to, std::int64_t send_time);
    void dispatch(const Event& ev);
    void finalize(RunReport& report);

    Scenario sc_;
    KeyChain kc_;
    std::vector<std::unique_ptr<Node>> nodes_;
    std::vector<const PartitionWindow*> partition_order_;  // by start time
    std::unique_ptr<class Adversary> adversary_;
    std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
    std::vector<std::unordered_set<Digest, U256Hash>> seen_;  // per node dedup
    std::uint64_t seq_ = 0;
    std::int64_t now_ = 0;
    std::uint64_t rng_state_;
    Metrics metrics_;
    // first-commit registry for the agreement check
    std::unordered_map<std::uint64_t, Digest> first_commit_;
    std::vector<std::string> violations_;
    bool agreement_ok_ = true;
    std::unordered_set<std::uint64_t> height_started_;  // adversary hook dedup
    std::vector<std::string>* transcript_ = nullptr;
    std::vector<std::string> transcript_store_;
    bool replay_ = false;
};

/// Catalogued Byzantine behaviors. The adversary is omniscient: it reads
/// engine state and schedules per-recipient deliveries with arbitrary
/// timing (the network belongs to it).
class Adversary {
public:
    Adversary(Engine& eng);
    /// Called once per (chain, height) when the first correct node starts
    /// the instance.
    void on_height_start(std::int64_t first_start, std::uint32_t chain,
                         std::uint64_t height, const std::vector<NodeId>& committee,
                         const Digest& crs);

private:
    Block adversary_block(NodeId byz, std::uint32_t chain, std::uint64_t height,
                          const Block* parent, const ThresholdSignature& parent_sig,
                          std::int64_t ts, std::uint32_t variant);
    void equivocate_split(std::int64_t at, std::uint32_t chain, std::uint64_t height,
                          NodeId byz, const std::vector<NodeId>& correct_members,
                          const Block& parent, const ThresholdSignature& parent_sig);

    Engine& eng_;
};

std::optional<SimMessage> decode_sim_message(std::span<const std::uint8_t> data);

}  // namespace latsim
