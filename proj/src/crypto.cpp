// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0

#include "latsim/crypto.hpp"

#include <algorithm>
#include <set>

namespace latsim {

namespace {

// Domain tags keep digests of different message kinds disjoint.
constexpr std::string_view kDomSk = "lat.sk.v1";
constexpr std::string_view kDomShareKey = "lat.sharekey.v1";
constexpr std::string_view kDomMaster = "lat.master.v1";
constexpr std::string_view kDomSig = "lat.sig.v1";
constexpr std::string_view kDomShare = "lat.share.v1";
constexpr std::string_view kDomTsig = "lat.tsig.v1";

void put_group(Enc& e, const GroupId& g) {
    e.u32(g.kind);
    e.u32(g.chain);
    e.u64(g.epoch);
}

Digest tag_over(std::string_view domain, const Digest& key, const Digest& msg) {
    Enc e;
    e.raw(domain);
    e.digest(key);
    e.digest(msg);
    return sha256(e.bytes());
}

}  // namespace

Digest KeyChain::secret_key(NodeId node) const {
    Enc e;
    e.raw(kDomSk);
    e.u64(seed_);
    e.u64(node);
    return sha256(e.bytes());
}

Digest KeyChain::share_key(const GroupId& g, std::uint32_t member_index) const {
    Enc e;
    e.raw(kDomShareKey);
    e.u64(seed_);
    put_group(e, g);
    e.u32(member_index);
    return sha256(e.bytes());
}

Digest KeyChain::group_master(const GroupId& g) const {
    Enc e;
    e.raw(kDomMaster);
    e.u64(seed_);
    put_group(e, g);
    return sha256(e.bytes());
}

Signature KeyChain::sign(NodeId signer, std::span<const std::uint8_t> msg) const {
    return sign_digest(signer, sha256(msg));
}

Signature KeyChain::sign_digest(NodeId signer, const Digest& msg_digest) const {
    Signature s;
    s.signer = signer;
    s.message_digest = msg_digest;
    s.tag = tag_over(kDomSig, secret_key(signer), msg_digest);
    return s;
}

bool KeyChain::verify(NodeId claimed_signer, std::span<const std::uint8_t> msg,
                      const Signature& sig) const {
    return verify_digest(claimed_signer, sha256(msg), sig);
}

bool KeyChain::verify_digest(NodeId claimed_signer, const Digest& msg_digest,
                             const Signature& sig) const {
    if (sig.signer != claimed_signer) return false;
    if (!(sig.message_digest == msg_digest)) return false;
    return sig.tag == tag_over(kDomSig, secret_key(claimed_signer), msg_digest);
}

ShareSignature KeyChain::share_sign(const GroupId& g, std::uint32_t member_index,
                                    const Digest& msg_digest) const {
    ShareSignature s;
    s.share_index = member_index;
    s.message_digest = msg_digest;
    s.tag = tag_over(kDomShare, share_key(g, member_index), msg_digest);
    return s;
}

bool KeyChain::verify_share(const GroupId& g, const Digest& msg_digest,
                            const ShareSignature& share) const {
    if (!(share.message_digest == msg_digest)) return false;
    return share.tag == tag_over(kDomShare, share_key(g, share.share_index), msg_digest);
}

ThresholdSignature KeyChain::combine(const GroupId& g, const Digest& msg_digest,
                                     std::span<const ShareSignature> shares,
                                     std::uint32_t t) const {
    std::set<std::uint32_t> indices;
    for (const auto& s : shares) {
        if (!verify_share(g, msg_digest, s)) {
            throw CryptoError(CryptoErr::InvalidShare, "share does not verify");
        }
        indices.insert(s.share_index);
    }
    if (indices.size() < t) {
        throw CryptoError(CryptoErr::InsufficientShares, "fewer than t distinct shares");
    }
    ThresholdSignature out;
    out.group = g;
    out.message_digest = msg_digest;
    out.tag = tag_over(kDomTsig, group_master(g), msg_digest);
    return out;
}

bool KeyChain::verify_threshold(const GroupId& g, const Digest& msg_digest,
                                const ThresholdSignature& tsig) const {
    if (!(tsig.group == g)) return false;
    if (!(tsig.message_digest == msg_digest)) return false;
    return tsig.tag == tag_over(kDomTsig, group_master(g), msg_digest);
}

U256 vrf_distance(const Digest& crs, const Signature& sig) {
    Enc e;
    e.digest(sig.tag);
    return U256::abs_diff(crs, sha256(e.bytes()));
}

bool within_fraction(const U256& dist, Fraction delta) {
    // dist * den <= num * 2^256
    auto [lo, hi] = dist.mul_u64(delta.den);
    if (hi != delta.num) return hi < delta.num;
    return lo.is_zero();
}

}  // namespace latsim
