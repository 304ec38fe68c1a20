// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0

#include "doctest.h"
#include "latsim/analysis.hpp"

using namespace latsim::analysis;

TEST_CASE("fail_prob trivial cells") {
    for (std::uint64_t m = 1; m <= 20; ++m) {
        CHECK(fail_prob(20, 0, m) == 0.0);
        CHECK(fail_prob_at_most_exact(20, 0, m, -40));
    }
    // all four nodes Byzantine: threshold floor(3/3)=1 is always exceeded
    CHECK(fail_prob(4, 4, 4) == doctest::Approx(1.0));
}

TEST_CASE("fail_prob matches direct combinatorics on a small case") {
    // N=10, K=5, m=3, t_max = 0: P[X > 0] = 1 - C(5,3)/C(10,3) = 11/12
    double expect = 11.0 / 12.0;
    CHECK(fail_prob(10, 5, 3) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(fail_prob_exact(10, 5, 3) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(fail_prob_at_most_exact(10, 5, 3, 0));
    CHECK_FALSE(fail_prob_at_most_exact(10, 5, 3, -1));
}

TEST_CASE("log-space and exact paths agree on published cells") {
    // two table cells exercised at unit-test speed; the acceptance suite
    // reproduces all twelve
    SizingQuery q1{10000, 2000, -40};
    auto r1 = min_notary_size(q1);
    CHECK(r1.min_size == 481);
    CHECK(fail_prob_exact(10000, 2000, r1.min_size) ==
          doctest::Approx(r1.fail_probability).epsilon(1e-6));

    SizingQuery q2{10000, 2500, -40};
    auto r2 = min_notary_size(q2);
    CHECK(r2.min_size == 1237);
}

TEST_CASE("domain and infeasibility errors") {
    CHECK_THROWS_AS((void)fail_prob(10, 5, 0), DomainError);
    CHECK_THROWS_AS((void)fail_prob(10, 5, 11), DomainError);
    CHECK_THROWS_AS((void)min_notary_size(SizingQuery{4, 4, -10}), Infeasible);
}
