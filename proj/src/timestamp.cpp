// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0

#include "latsim/timestamp.hpp"

#include <algorithm>

namespace latsim {

namespace {

std::int64_t lower_median(std::vector<std::int64_t> v) {
    std::size_t idx = (v.size() - 1) / 2;
    std::nth_element(v.begin(), v.begin() + idx, v.end());
    return v[idx];
}

}  // namespace

TimestampAssigner::TimestampAssigner(std::uint32_t num_chains, std::int64_t genesis_time,
                                     bool monotone)
    : latest_(num_chains, genesis_time), monotone_(monotone) {
    if (num_chains == 0) throw std::invalid_argument("need at least one chain");
}

std::int64_t TimestampAssigner::assign(const Block& b) {
    if (b.chain_id >= latest_.size()) {
        throw UnknownChain("timestamp: chain id out of range");
    }
    latest_[b.chain_id] = b.block_timestamp;
    std::int64_t med = lower_median(latest_);
    if (monotone_ && last_assigned_ != std::numeric_limits<std::int64_t>::min()) {
        med = std::max(med, last_assigned_);
    }
    if (floor_ != std::numeric_limits<std::int64_t>::min()) {
        // boundary fix stays sticky so the sequence cannot dip afterwards
        med = std::max(med, floor_);
        floor_ = med;
    }
    last_assigned_ = med;
    return med;
}

void TimestampAssigner::extend_chains(std::uint32_t new_num_chains,
                                      std::int64_t boundary_consensus_time) {
    if (new_num_chains < latest_.size()) {
        throw std::invalid_argument("cannot shrink the chain set");
    }
    latest_.resize(new_num_chains, boundary_consensus_time);
}

void TimestampAssigner::force_floor(std::int64_t t) {
    floor_ = std::max(floor_, t);
}

std::vector<TimestampedBlock> consensus_timestamps(std::span<const BlockPtr> ordered,
                                                   std::uint32_t num_chains,
                                                   std::int64_t genesis_time,
                                                   bool monotone) {
    TimestampAssigner a(num_chains, genesis_time, monotone);
    std::vector<TimestampedBlock> out;
    out.reserve(ordered.size());
    for (const auto& b : ordered) {
        out.push_back({b, a.assign(*b)});
    }
    return out;
}

bool verify_timestamp_agreement(
    std::span<const std::vector<TimestampedBlock>> per_node_outputs) {
    for (std::size_t i = 1; i < per_node_outputs.size(); ++i) {
        const auto& a = per_node_outputs[0];
        const auto& b = per_node_outputs[i];
        std::size_t common = std::min(a.size(), b.size());
        for (std::size_t k = 0; k < common; ++k) {
            if (!(a[k].block->hash == b[k].block->hash) ||
                a[k].consensus_timestamp != b[k].consensus_timestamp) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace latsim
