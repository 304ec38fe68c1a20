// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "latsim/crypto.hpp"

namespace latsim {

class CommitteeTooLarge : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Per-epoch public randomness R_i.
struct CrsValue {
    std::uint64_t epoch_index = 0;
    Digest value;
    friend bool operator==(const CrsValue&, const CrsValue&) = default;
};

/// Committee sizes requested from an election.
struct CommitteeSizes {
    std::uint32_t crs = 0;
    std::uint32_t notary = 0;  // per chain
    std::uint32_t chains = 0;
};

/// Committees and randomness for one epoch. Everything here is a pure
/// function of (R_i, node set, sizes), so every node derives the same
/// configuration without communication.
struct EpochConfig {
    std::uint64_t epoch_index = 0;
    Digest crs;
    std::vector<NodeId> crs_committee;
    std::vector<std::vector<NodeId>> notary_committees;  // by chain
    std::vector<NodeId> node_set;

    bool in_crs_committee(NodeId n) const;
    /// Index of n within chain's notary committee, or -1.
    int notary_index(std::uint32_t chain, NodeId n) const;
};

/// Genesis randomness R_0 for a run.
CrsValue genesis_crs(std::uint64_t seed);

/// R_{i+1} = Hash(TSig(R_i)), where the shares are share-signatures on
/// R_i by the epoch-i CRS committee.
CrsValue next_crs(const KeyChain& kc, const CrsValue& current,
                  std::span<const ShareSignature> shares, std::uint32_t t);

/// Deterministic Fisher-Yates permutation of items. The index drawn at
/// step k comes from rejection-sampled hash(seed || k || attempt).
std::vector<NodeId> fisher_yates_shuffle(const Digest& seed,
                                         std::span<const NodeId> items);

/// Elects the CRS committee and one notary committee per chain from
/// node_set using R. Chains share the single CRS set; notary sets are
/// drawn by independent domain-separated shuffles.
EpochConfig elect_committees(const CrsValue& r_next, std::span<const NodeId> node_set,
                             const CommitteeSizes& sizes);

}  // namespace latsim
