// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "latsim/bytes.hpp"
#include "latsim/u256.hpp"

namespace latsim {

using NodeId = std::uint64_t;
using Digest = U256;

/// SHA-256 of a byte span, interpreted big-endian as a 256-bit integer.
Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(const Bytes& data);
Digest sha256(std::string_view data);

enum class CryptoErr {
    InsufficientShares,
    InvalidShare,
    EmptySet,
};

class CryptoError : public std::runtime_error {
public:
    CryptoError(CryptoErr k, const char* what) : std::runtime_error(what), kind(k) {}
    CryptoErr kind;
};

struct Signature {
    NodeId signer = 0;
    Digest message_digest;
    Digest tag;
    friend bool operator==(const Signature&, const Signature&) = default;
};

struct ShareSignature {
    std::uint32_t share_index = 0;
    Digest message_digest;
    Digest tag;
    friend bool operator==(const ShareSignature&, const ShareSignature&) = default;
};

/// Identifies a threshold-signing committee. kind 0 = CRS set,
/// kind 1 = per-chain notary set.
struct GroupId {
    std::uint32_t kind = 0;
    std::uint32_t chain = 0;
    std::uint64_t epoch = 0;
    friend bool operator==(const GroupId&, const GroupId&) = default;
};
inline constexpr std::uint32_t kGroupCrs = 0;
inline constexpr std::uint32_t kGroupNotary = 1;

struct ThresholdSignature {
    GroupId group;
    Digest message_digest;
    Digest tag;
    friend bool operator==(const ThresholdSignature&, const ThresholdSignature&) = default;
};

/// Deterministic stand-in for the signature / threshold-signature / VRF
/// primitives. All key material is derived from the run seed, so a run
/// replays bit-identically; tags are domain-separated hashes. Signing is a
/// pure function of (key, message), which the leader-election VRF requires.
class KeyChain {
public:
    explicit KeyChain(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    Digest secret_key(NodeId node) const;
    Digest share_key(const GroupId& g, std::uint32_t member_index) const;
    Digest group_master(const GroupId& g) const;

    Signature sign(NodeId signer, std::span<const std::uint8_t> msg) const;
    Signature sign_digest(NodeId signer, const Digest& msg_digest) const;
    bool verify(NodeId claimed_signer, std::span<const std::uint8_t> msg,
                const Signature& sig) const;
    bool verify_digest(NodeId claimed_signer, const Digest& msg_digest,
                       const Signature& sig) const;

    ShareSignature share_sign(const GroupId& g, std::uint32_t member_index,
                              const Digest& msg_digest) const;
    bool verify_share(const GroupId& g, const Digest& msg_digest,
                      const ShareSignature& share) const;

    /// Combines t verified shares. The output depends only on
    /// (group, message): any valid t-subset yields the same signature.
    ThresholdSignature combine(const GroupId& g, const Digest& msg_digest,
                               std::span<const ShareSignature> shares,
                               std::uint32_t t) const;
    bool verify_threshold(const GroupId& g, const Digest& msg_digest,
                          const ThresholdSignature& tsig) const;

private:
    std::uint64_t seed_;
};

/// |crs - Hash(sig.tag)| as a plain 256-bit absolute difference (no
/// modular wraparound).
U256 vrf_distance(const Digest& crs, const Signature& sig);

/// Exact rational threshold for block proposal.
struct Fraction {
    std::uint64_t num = 1;
    std::uint64_t den = 1;
};

/// dist <= delta * 2^256, compared exactly in 320-bit arithmetic.
bool within_fraction(const U256& dist, Fraction delta);

}  // namespace latsim
