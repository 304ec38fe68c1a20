// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0

#include <cmath>
#include <map>

#include "doctest.h"
#include "latsim/crs.hpp"

using namespace latsim;

namespace {

std::vector<ShareSignature> crs_shares(const KeyChain& kc, const CrsValue& r,
                                       std::initializer_list<std::uint32_t> members) {
    GroupId g{kGroupCrs, 0, r.epoch_index};
    std::vector<ShareSignature> out;
    for (auto m : members) out.push_back(kc.share_sign(g, m, r.value));
    return out;
}

}  // namespace

TEST_CASE("next_crs: any valid t-subset yields the same randomness") {
    KeyChain kc(11);
    CrsValue r0 = genesis_crs(11);
    auto a = next_crs(kc, r0, crs_shares(kc, r0, {0, 1}), 2);
    auto b = next_crs(kc, r0, crs_shares(kc, r0, {1, 2}), 2);
    CHECK(a == b);
    CHECK(a.epoch_index == 1);
    CHECK(a.value != r0.value);

    // shares on the wrong message are invalid
    CrsValue wrong{0, sha256("not the crs")};
    CHECK_THROWS_AS((void)next_crs(kc, r0, crs_shares(kc, wrong, {0, 1}), 2), CryptoError);
}

TEST_CASE("three-epoch chain replays bit-identically") {
    auto run = [](std::uint64_t seed) {
        KeyChain kc(seed);
        CrsValue r = genesis_crs(seed);
        std::vector<Digest> digests{r.value};
        for (int epoch = 0; epoch < 3; ++epoch) {
            r = next_crs(kc, r, crs_shares(kc, r, {0, 1, 2}), 3);
            digests.push_back(r.value);
        }
        return digests;
    };
    CHECK(run(5) == run(5));
    CHECK(run(5) != run(6));
}

TEST_CASE("fisher-yates determinism and degenerate input") {
    std::vector<NodeId> one{42};
    CHECK(fisher_yates_shuffle(sha256("s"), one) == one);

    std::vector<NodeId> items{1, 2, 3, 4, 5, 6, 7};
    auto p1 = fisher_yates_shuffle(sha256("seed"), items);
    auto p2 = fisher_yates_shuffle(sha256("seed"), items);
    CHECK(p1 == p2);
    auto sorted = p1;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == items);
}

TEST_CASE("fisher-yates is unbiased at position zero") {
    std::vector<NodeId> items{0, 1, 2, 3};
    std::array<int, 4> hits{};
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        Enc e;
        e.raw("fy-mc");
        e.u64((std::uint64_t)i);
        auto perm = fisher_yates_shuffle(sha256(e.bytes()), items);
        hits[perm[0]]++;
    }
    for (int v = 0; v < 4; ++v) {
        double freq = (double)hits[v] / trials;
        CHECK(std::abs(freq - 0.25) < 0.02);
    }
}

TEST_CASE("committee election: permutations, domain separation, bounds") {
    std::vector<NodeId> nodes{0, 1, 2, 3, 4, 5};
    CrsValue r{3, sha256("epoch randomness")};

    auto full = elect_committees(r, nodes, CommitteeSizes{6, 6, 2});
    auto sorted_crs = full.crs_committee;
    std::sort(sorted_crs.begin(), sorted_crs.end());
    CHECK(sorted_crs == nodes);  // committee of size n is a permutation
    for (auto& c : full.notary_committees) {
        auto s = c;
        std::sort(s.begin(), s.end());
        CHECK(s == nodes);
    }
    // chains share one CRS set but draw distinct notary orderings
    CHECK(full.notary_committees[0] != full.notary_committees[1]);

    auto partial = elect_committees(r, nodes, CommitteeSizes{3, 4, 2});
    CHECK(partial.crs_committee.size() == 3);
    CHECK(partial.notary_committees[0].size() == 4);

    CHECK_THROWS_AS(
        (void)elect_committees(r, nodes, CommitteeSizes{7, 4, 1}), CommitteeTooLarge);
}

TEST_CASE("per-chain Byzantine counts follow the hypergeometric law") {
    // population 20 with 5 Byzantine; committees of 7; empirical pmf of the
    // Byzantine count must match C(5,k)C(15,7-k)/C(20,7) within 0.02
    std::vector<NodeId> nodes(20);
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = (NodeId)i;
    auto is_byz = [](NodeId n) { return n < 5; };

    std::map<int, int> histogram;
    const int trials = 20000;
    for (int i = 0; i < trials; ++i) {
        Enc e;
        e.raw("committee-mc");
        e.u64((std::uint64_t)i);
        CrsValue r{0, sha256(e.bytes())};
        auto cfg = elect_committees(r, nodes, CommitteeSizes{1, 7, 1});
        int byz = 0;
        for (auto n : cfg.notary_committees[0]) {
            if (is_byz(n)) ++byz;
        }
        histogram[byz]++;
    }

    auto choose = [](double n, double k) {
        double r = 1;
        for (int i = 0; i < (int)k; ++i) r = r * (n - i) / (i + 1);
        return r;
    };
    for (int k = 0; k <= 5; ++k) {
        double pmf = choose(5, k) * choose(15, 7 - k) / choose(20, 7);
        double freq = (double)histogram[k] / trials;
        CHECK(std::abs(freq - pmf) < 0.02);
    }
}
