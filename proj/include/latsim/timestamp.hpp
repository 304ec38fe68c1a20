// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "latsim/lattice.hpp"

namespace latsim {

class UnknownChain : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct TimestampedBlock {
    BlockPtr block;
    std::int64_t consensus_timestamp = 0;
};

/// Streaming consensus timestamps over an ordered chain: per-chain latest
/// block time vector, assigning each block the median. Lower median for
/// even n (element floor((n-1)/2) of the ascending sort). Timestamps are
/// integer nanoseconds.
class TimestampAssigner {
public:
    /// All entries start at the per-chain genesis time.
    TimestampAssigner(std::uint32_t num_chains, std::int64_t genesis_time,
                      bool monotone = false);

    std::int64_t assign(const Block& b);

    /// Grows the vector when a configuration change adds chains; new
    /// entries start at the boundary consensus time.
    void extend_chains(std::uint32_t new_num_chains, std::int64_t boundary_consensus_time);

    /// Forces the next assignment to be >= t (used across configuration
    /// boundaries even when global monotonicity is off).
    void force_floor(std::int64_t t);

    std::uint32_t num_chains() const { return (std::uint32_t)latest_.size(); }

private:
    std::vector<std::int64_t> latest_;
    bool monotone_;
    std::int64_t floor_ = std::numeric_limits<std::int64_t>::min();
    std::int64_t last_assigned_ = std::numeric_limits<std::int64_t>::min();
};

/// Pure form of the assigner: walk an ordered prefix, return (block,
/// consensus time) pairs.
std::vector<TimestampedBlock> consensus_timestamps(std::span<const BlockPtr> ordered,
                                                   std::uint32_t num_chains,
                                                   std::int64_t genesis_time,
                                                   bool monotone = false);

/// True iff all sequences agree on their common prefix (and at least one
/// is non-empty when any is).
bool verify_timestamp_agreement(
    std::span<const std::vector<TimestampedBlock>> per_node_outputs);

}  // namespace latsim
