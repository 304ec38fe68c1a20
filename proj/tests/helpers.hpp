// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "latsim/lattice.hpp"

namespace latsim::testutil {

/// Deterministic small PRNG for fixtures (seeded, no libc dependence).
struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed ^ 0x9e3779b97f4a7c15ull) {}
    std::uint64_t next() {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
    bool chance(double p) { return (double)(next() >> 11) / 9007199254740992.0 < p; }
};

inline Block make_block(std::uint32_t chain, std::uint64_t height, const Block* parent,
                        std::vector<const Block*> ack_targets, std::int64_t ts,
                        NodeId proposer) {
    Block b;
    b.chain_id = chain;
    b.height = height;
    b.proposer_id = proposer;
    if (parent) b.parent_hash = parent->hash;
    for (const Block* t : ack_targets) {
        b.acks.push_back(AckField{t->proposer_id, t->hash, t->height});
    }
    b.block_timestamp = ts;
    b.finalize_hash();
    return b;
}

/// Random glued lattice: chains grow in a random interleaving; each new
/// block acks the current tip of a few other chains. The result is causally
/// valid when fed chain-interleaved (lower heights first per chain).
struct GeneratedLattice {
    std::vector<Block> blocks;  // a valid arrival order
    std::uint32_t num_chains;
};

inline GeneratedLattice generate_lattice(std::uint32_t num_chains, std::size_t num_blocks,
                                         std::uint64_t seed, double ack_prob = 0.6) {
    Rng rng(seed);
    GeneratedLattice g;
    g.num_chains = num_chains;
    std::vector<std::vector<Block>> per_chain(num_chains);
    std::int64_t clock = 1;
    for (std::size_t i = 0; i < num_blocks; ++i) {
        std::uint32_t chain = (std::uint32_t)rng.below(num_chains);
        std::uint64_t height = per_chain[chain].size();
        const Block* parent = height ? &per_chain[chain].back() : nullptr;
        std::vector<const Block*> acks;
        for (std::uint32_t other = 0; other < num_chains; ++other) {
            if (other == chain || per_chain[other].empty()) continue;
            if (rng.chance(ack_prob)) acks.push_back(&per_chain[other].back());
        }
        std::int64_t ts = std::max<std::int64_t>(clock, parent ? parent->block_timestamp + 1 : 1);
        per_chain[chain].push_back(
            make_block(chain, height, parent, acks, ts, chain));
        clock += 1 + (std::int64_t)rng.below(3);
    }
    // arrival order: chain-interleaved generation order is already causal
    std::vector<std::size_t> next(num_chains, 0);
    // reconstruct generation order by timestamps (strictly increasing)
    std::vector<const Block*> all;
    for (auto& c : per_chain) {
        for (auto& b : c) all.push_back(&b);
    }
    std::sort(all.begin(), all.end(), [](const Block* a, const Block* b) {
        return a->block_timestamp < b->block_timestamp;
    });
    for (auto* b : all) g.blocks.push_back(*b);
    (void)next;
    return g;
}

/// A random causal permutation: repeatedly pick any block whose parent and
/// ack targets were already emitted.
inline std::vector<Block> causal_shuffle(const std::vector<Block>& blocks,
                                         std::uint64_t seed) {
    Rng rng(seed);
    std::unordered_set<Digest, U256Hash> inside;  // deps outside the set are free
    for (const auto& b : blocks) inside.insert(b.hash);
    std::unordered_set<Digest, U256Hash> emitted;
    std::vector<Block> remaining = blocks;
    std::vector<Block> out;
    while (!remaining.empty()) {
        std::vector<std::size_t> ready;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            const Block& b = remaining[i];
            auto satisfied = [&](const Digest& dep) {
                return !inside.count(dep) || emitted.count(dep);
            };
            bool ok = b.height == 0 || satisfied(b.parent_hash);
            for (const auto& a : b.acks) {
                if (!satisfied(a.acked_block_hash)) ok = false;
            }
            if (ok) ready.push_back(i);
        }
        std::size_t pick = ready[rng.below(ready.size())];
        emitted.insert(remaining[pick].hash);
        out.push_back(remaining[pick]);
        remaining.erase(remaining.begin() + (std::ptrdiff_t)pick);
    }
    return out;
}

/// The six-chain worked example: chains A..F as 0..5, chain F silent.
/// Candidates are b_{A,1}, b_{B,3}, b_{E,0}; the delivered baseline holds
/// A0, B0..B2, C0..C1, D0.
struct WorkedExample {
    Block a0, b0, b1, b2, c0, c1, d0;                  // delivered baseline
    Block a1, a2, b3, b4, c2, d1, d2, e0;              // pending

    WorkedExample() {
        a0 = make_block(0, 0, nullptr, {}, 1, 0);
        b0 = make_block(1, 0, nullptr, {}, 2, 1);
        b1 = make_block(1, 1, &b0, {}, 3, 1);
        b2 = make_block(1, 2, &b1, {}, 4, 1);
        c0 = make_block(2, 0, nullptr, {}, 5, 2);
        c1 = make_block(2, 1, &c0, {}, 6, 2);
        d0 = make_block(3, 0, nullptr, {}, 7, 3);

        a1 = make_block(0, 1, &a0, {}, 10, 0);
        b3 = make_block(1, 3, &b2, {}, 11, 1);
        e0 = make_block(4, 0, nullptr, {}, 12, 4);
        c2 = make_block(2, 2, &c1, {&e0}, 13, 2);
        d1 = make_block(3, 1, &d0, {&e0}, 14, 3);
        a2 = make_block(0, 2, &a1, {&b3, &d1}, 15, 0);
        b4 = make_block(1, 4, &b3, {&c2}, 16, 1);
        d2 = make_block(3, 2, &d1, {&b3}, 17, 3);
    }

    std::vector<Block> pending_blocks() const {
        return {a1, b3, e0, c2, d1, a2, b4, d2};
    }

    template <typename State>
    void feed(State& st) const {
        for (const Block* base : {&a0, &b0, &b1, &b2, &c0, &c1, &d0}) {
            st.preload_delivered(base->hash, base->chain_id, base->height);
        }
        for (const Block* p : {&a1, &b3, &e0, &c2, &d1, &a2, &b4, &d2}) {
            st.receive_block(std::make_shared<Block>(*p));
        }
    }
};

}  // namespace latsim::testutil
