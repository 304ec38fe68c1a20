// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace latsim::analysis {

class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};
class Infeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// P[X > floor((m-1)/3)] for X ~ Hypergeometric(N, K, m): the probability
/// that a uniformly drawn notary set of size m contains more Byzantine
/// members than the agreement bound t_max = floor((m-1)/3) tolerates.
/// Log-gamma accumulation with compensated summation; relative error well
/// below 1e-9 for the parameter ranges used here.
double fail_prob(std::uint64_t N, std::uint64_t K, std::uint64_t m);

/// Same tail evaluated in exact integer arithmetic, returned as a double
/// with ~1e-30 relative rounding from the final conversion only.
double fail_prob_exact(std::uint64_t N, std::uint64_t K, std::uint64_t m);

/// Exact test fail_prob(N,K,m) <= 2^target_log2 (target_log2 negative).
bool fail_prob_at_most_exact(std::uint64_t N, std::uint64_t K, std::uint64_t m,
                             int target_log2);

struct SizingQuery {
    std::uint64_t population = 0;       // |S_node|
    std::uint64_t byzantine_count = 0;  // K
    int target_failure_log2 = -40;      // failure probability bound 2^target
};

struct SizingResult {
    std::uint64_t min_size = 0;  // m*
    double fail_probability = 0; // fail_prob at m*
};

/// Smallest m with fail_prob <= 2^target. Scans m upward (the threshold
/// floor((m-1)/3) makes the tail locally non-monotone), deciding borderline
/// cells with the exact path, and re-verifies the returned m exactly.
SizingResult min_notary_size(const SizingQuery& q);

struct TableCell {
    std::uint64_t population;
    std::uint64_t byzantine_count;
    int target_log2;
    std::uint64_t expected;  // published value
};

/// The 12 published committee-sizing cells (10k/100k population, 1/4 and
/// 1/5 Byzantine ratios, failure bounds 2^-40 / 2^-60 / 2^-80).
const std::vector<TableCell>& reference_table();

}  // namespace latsim::analysis
