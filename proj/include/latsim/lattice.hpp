// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "latsim/crypto.hpp"

namespace latsim {

/// One ack edge: a reference to another chain's block.
struct AckField {
    NodeId block_proposer_id = 0;
    Digest acked_block_hash;
    std::uint64_t block_height = 0;
    friend bool operator==(const AckField&, const AckField&) = default;
};

/// The unit of the lattice. height starts at 0; height-0 blocks have a
/// zero parent hash and no parent notarization.
struct Block {
    std::uint32_t chain_id = 0;
    std::uint64_t height = 0;
    NodeId proposer_id = 0;
    Digest parent_hash;
    std::vector<AckField> acks;
    std::vector<Digest> payload;   // transaction digests
    std::vector<Digest> records;   // compaction notarization record digests
    std::int64_t block_timestamp = 0;
    ThresholdSignature parent_notarization;  // Sigma_{h-1}, height >= 1 only
    Digest hash;                             // derived from the other fields

    static constexpr NodeId kEmptyProposer = ~0ull;

    Bytes canonical_encoding() const;
    void finalize_hash();
    /// Parses a canonical encoding; the hash is re-derived.
    static std::optional<Block> decode(std::span<const std::uint8_t> data);
    bool is_empty_block() const { return proposer_id == kEmptyProposer; }
};

using BlockPtr = std::shared_ptr<const Block>;

/// The agreed fallback block when a height decides bottom. Derivable by
/// every node from (chain, height, parent) alone.
Block make_empty_block(std::uint32_t chain, std::uint64_t height, const Block* parent,
                       const ThresholdSignature& parent_sig);

enum class Validity { Accept, Defer, Reject };

struct ValidationResult {
    Validity status = Validity::Accept;
    std::vector<Digest> missing;  // Defer: dependency hashes not yet seen
    std::string reason;           // Reject diagnostics
};

class UnknownBlock : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct LatticeParams {
    const KeyChain* keychain = nullptr;  // null disables notarization checks
    std::uint64_t epoch_length = 1;
    bool verify_notarization = false;
};

/// One node's view of the lattice: storage, structural validation, and
/// causally-complete release feeding the total ordering. Blocks may arrive
/// in any order; a block is released only once its parent and every acked
/// block have been released.
class LatticeView {
public:
    explicit LatticeView(LatticeParams params = {}) : params_(params) {}

    ValidationResult validate_block(const Block& b) const;

    /// Stores the block; returns all blocks that became causally complete,
    /// in (height, chain_id, hash) order. Duplicate insert is a no-op.
    std::vector<BlockPtr> insert_block(const Block& b);

    /// True iff b reaches target via parent links and ack edges.
    bool indirect_ack(const Digest& from, const Digest& target) const;

    bool contains(const Digest& h) const { return blocks_.count(h) != 0; }
    BlockPtr get(const Digest& h) const;
    std::size_t size() const { return blocks_.size(); }

    /// Released tip height per chain, -1 when none.
    std::int64_t tip_height(std::uint32_t chain) const;

    void mark_delivered(const Digest& h) { delivered_.insert(h); }
    bool is_delivered(const Digest& h) const { return delivered_.count(h) != 0; }

private:
    bool structurally_valid(const Block& b, ValidationResult& out) const;
    bool deps_released(const Block& b, std::vector<Digest>* missing) const;
    bool release_checks(const Block& b, std::string& reason) const;

    LatticeParams params_;
    std::unordered_map<Digest, BlockPtr, U256Hash> blocks_;
    std::unordered_set<Digest, U256Hash> released_;
    std::unordered_set<Digest, U256Hash> delivered_;
    std::unordered_map<Digest, std::vector<Digest>, U256Hash> waiting_on_;  // dep -> blocked
    std::unordered_map<std::uint32_t, std::int64_t> tips_;
    // cumulative max acked height per foreign chain along the parent lineage
    std::unordered_map<Digest, std::unordered_map<std::uint32_t, std::uint64_t>, U256Hash>
        cum_acks_;
};

/// Line-oriented fixture records used by tests and the replay tooling:
///   chain,height,proposer,timestamp,acks=chain:height;chain:height
/// Blocks must appear in a causally valid order. Hashes and parent links
/// are derived while parsing.
std::vector<Block> parse_fixture(const std::string& text);
std::string format_fixture(std::span<const Block> blocks);

}  // namespace latsim
