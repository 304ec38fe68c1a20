// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0

#include "latsim/crs.hpp"

#include <algorithm>

namespace latsim {

bool EpochConfig::in_crs_committee(NodeId n) const {
    return std::find(crs_committee.begin(), crs_committee.end(), n) !=
           crs_committee.end();
}

int EpochConfig::notary_index(std::uint32_t chain, NodeId n) const {
    const auto& c = notary_committees.at(chain);
    auto it = std::find(c.begin(), c.end(), n);
    return it == c.end() ? -1 : (int)(it - c.begin());
}

CrsValue genesis_crs(std::uint64_t seed) {
    Enc e;
    e.raw("lat.crs.genesis");
    e.u64(seed);
    return CrsValue{0, sha256(e.bytes())};
}

CrsValue next_crs(const KeyChain& kc, const CrsValue& current,
                  std::span<const ShareSignature> shares, std::uint32_t t) {
    GroupId g{kGroupCrs, 0, current.epoch_index};
    ThresholdSignature tsig = kc.combine(g, current.value, shares, t);
    Enc e;
    e.digest(tsig.tag);
    return CrsValue{current.epoch_index + 1, sha256(e.bytes())};
}

namespace {

std::uint64_t draw_index(const Digest& seed, std::uint64_t step, std::uint64_t range) {
    // rejection sampling keeps the draw unbiased
    for (std::uint64_t attempt = 0;; ++attempt) {
        Enc e;
        e.raw("lat.fy.v1");
        e.digest(seed);
        e.u64(step);
        e.u64(attempt);
        std::uint64_t v = sha256(e.bytes()).w[0];
        std::uint64_t limit = ~0ull - (~0ull % range + 1) % range;
        if (v <= limit) return v % range;
    }
}

}  // namespace

std::vector<NodeId> fisher_yates_shuffle(const Digest& seed,
                                         std::span<const NodeId> items) {
    std::vector<NodeId> out(items.begin(), items.end());
    if (out.empty()) return out;
    std::uint64_t step = 0;
    for (std::size_t i = out.size() - 1; i > 0; --i, ++step) {
        std::uint64_t j = draw_index(seed, step, i + 1);
        std::swap(out[i], out[j]);
    }
    return out;
}

namespace {

Digest shuffle_domain(std::string_view domain, std::uint32_t chain, const Digest& r) {
    Enc e;
    e.raw(domain);
    e.u32(chain);
    e.digest(r);
    return sha256(e.bytes());
}

}  // namespace

EpochConfig elect_committees(const CrsValue& r_next, std::span<const NodeId> node_set,
                             const CommitteeSizes& sizes) {
    if (sizes.crs > node_set.size() || sizes.notary > node_set.size()) {
        throw CommitteeTooLarge("committee size exceeds node set");
    }
    EpochConfig cfg;
    cfg.epoch_index = r_next.epoch_index;
    cfg.crs = r_next.value;
    cfg.node_set.assign(node_set.begin(), node_set.end());

    auto crs_perm =
        fisher_yates_shuffle(shuffle_domain("lat.shuffle.crs", 0, r_next.value), node_set);
    cfg.crs_committee.assign(crs_perm.begin(), crs_perm.begin() + sizes.crs);

    cfg.notary_committees.resize(sizes.chains);
    for (std::uint32_t chain = 0; chain < sizes.chains; ++chain) {
        auto perm = fisher_yates_shuffle(
            shuffle_domain("lat.shuffle.notary", chain, r_next.value), node_set);
        cfg.notary_committees[chain].assign(perm.begin(), perm.begin() + sizes.notary);
    }
    return cfg;
}

}  // namespace latsim
