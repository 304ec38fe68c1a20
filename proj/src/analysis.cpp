// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0

#include "latsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace latsim::analysis {

namespace {

// ln(k!) table, cached per population size.
const std::vector<double>& lnfact_table(std::uint64_t upto) {
    static std::mutex mu;
    static std::vector<double> table{0.0};  // ln(0!) = 0
    std::lock_guard<std::mutex> lock(mu);
    while (table.size() <= upto) {
        table.push_back(std::lgamma((double)table.size() + 1.0));
    }
    return table;
}

double lchoose(const std::vector<double>& lf, std::uint64_t n, std::uint64_t k) {
    if (k > n) return -std::numeric_limits<double>::infinity();
    return lf[n] - lf[k] - lf[n - k];
}

// Minimal unsigned bignum: only what the exact tail needs.
struct BigU {
    std::vector<std::uint64_t> w;  // little-endian limbs, no leading zeros

    static BigU one() { return BigU{{1}}; }

    void trim() {
        while (w.size() > 1 && w.back() == 0) w.pop_back();
    }

    void mul_small(std::uint64_t m) {
        unsigned __int128 carry = 0;
        for (auto& limb : w) {
            unsigned __int128 p = (unsigned __int128)limb * m + carry;
            limb = (std::uint64_t)p;
            carry = p >> 64;
        }
        if (carry) w.push_back((std::uint64_t)carry);
    }

    // Exact division by a small divisor (caller guarantees divisibility).
    void div_small(std::uint64_t d) {
        unsigned __int128 rem = 0;
        for (std::size_t i = w.size(); i-- > 0;) {
            unsigned __int128 cur = (rem << 64) | w[i];
            w[i] = (std::uint64_t)(cur / d);
            rem = cur % d;
        }
        trim();
    }

    void add(const BigU& o) {
        if (o.w.size() > w.size()) w.resize(o.w.size(), 0);
        unsigned __int128 carry = 0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            unsigned __int128 s = (unsigned __int128)w[i] + carry +
                                  (i < o.w.size() ? o.w[i] : 0);
            w[i] = (std::uint64_t)s;
            carry = s >> 64;
        }
        if (carry) w.push_back((std::uint64_t)carry);
    }

    void shl_bits(std::uint64_t bits) {
        std::size_t limbs = bits / 64;
        unsigned shift = bits % 64;
        if (shift != 0) {
            std::uint64_t carry = 0;
            for (auto& limb : w) {
                std::uint64_t nc = limb >> (64 - shift);
                limb = (limb << shift) | carry;
                carry = nc;
            }
            if (carry) w.push_back(carry);
        }
        w.insert(w.begin(), limbs, 0);
        trim();
    }

    // -1 / 0 / +1 comparison.
    int cmp(const BigU& o) const {
        if (w.size() != o.w.size()) return w.size() < o.w.size() ? -1 : 1;
        for (std::size_t i = w.size(); i-- > 0;) {
            if (w[i] != o.w[i]) return w[i] < o.w[i] ? -1 : 1;
        }
        return 0;
    }

    bool is_zero() const { return w.size() == 1 && w[0] == 0; }

    std::uint64_t bit_length() const {
        std::uint64_t top = w.back();
        std::uint64_t bits = (w.size() - 1) * 64;
        while (top) {
            ++bits;
            top >>= 1;
        }
        return bits;
    }

    // Natural log from the top two limbs; enough precision for 1e-6 checks.
    double ln() const {
        if (is_zero()) return -std::numeric_limits<double>::infinity();
        std::size_t n = w.size();
        long double mant = (long double)w[n - 1];
        std::uint64_t below_bits = (n - 1) * 64;
        if (n >= 2) {
            mant = mant * 18446744073709551616.0L + (long double)w[n - 2];
            below_bits = (n - 2) * 64;
        }
        const long double ln2 = 0.6931471805599453094172321214581766L;
        return (double)(std::log(mant) + (long double)below_bits * ln2);
    }
};

// C(n, k) by the exact multiplicative recurrence.
BigU big_choose(std::uint64_t n, std::uint64_t k) {
    if (k > n) return BigU{{0}};
    k = std::min(k, n - k);
    BigU r = BigU::one();
    for (std::uint64_t i = 0; i < k; ++i) {
        r.mul_small(n - i);
        r.div_small(i + 1);
    }
    return r;
}

struct TailParams {
    std::uint64_t tmax;  // floor((m-1)/3)
    std::uint64_t kmin;  // first k in the tail
    std::uint64_t kmax;  // last k in the tail
    std::uint64_t klow;  // support lower bound max(0, m-(N-K))
    bool empty;
};

TailParams tail_params(std::uint64_t N, std::uint64_t K, std::uint64_t m) {
    if (m < 1 || m > N || K > N) throw DomainError("fail_prob: need 1 <= m <= N, K <= N");
    TailParams t;
    t.tmax = (m - 1) / 3;
    t.kmax = std::min(K, m);
    t.klow = (m > N - K) ? m - (N - K) : 0;
    t.kmin = std::max(t.tmax + 1, t.klow);
    t.empty = t.kmin > t.kmax;
    return t;
}

}  // namespace

double fail_prob(std::uint64_t N, std::uint64_t K, std::uint64_t m) {
    auto t = tail_params(N, K, m);
    if (t.empty) return 0.0;
    const auto& lf = lnfact_table(N);
    double ldenom = lchoose(lf, N, m);
    // Sum smallest terms first (terms decay as k moves above the mean).
    double sum = 0.0, comp = 0.0;
    for (std::uint64_t k = t.kmax + 1; k-- > t.kmin;) {
        double lt = lchoose(lf, K, k) + lchoose(lf, N - K, m - k) - ldenom;
        double term = std::exp(lt);
        double y = term - comp;
        double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    return sum;
}

namespace {

// Exact tail numerator sum_{k in tail} C(K,k) * C(N-K, m-k).
BigU exact_tail_numerator(std::uint64_t N, std::uint64_t K, std::uint64_t m,
                          const TailParams& t) {
    // Walk the product term down from k = kmax to kmin; at kmax the second
    // binomial is small (or 1 when kmax == m).
    BigU term = big_choose(K, t.kmax);
    {
        BigU other = big_choose(N - K, m - t.kmax);
        // term *= other, limb-by-limb (schoolbook), sizes stay modest here
        BigU prod{{0}};
        prod.w.assign(term.w.size() + other.w.size(), 0);
        for (std::size_t i = 0; i < term.w.size(); ++i) {
            unsigned __int128 carry = 0;
            for (std::size_t j = 0; j < other.w.size(); ++j) {
                unsigned __int128 cur = (unsigned __int128)term.w[i] * other.w[j] +
                                        prod.w[i + j] + carry;
                prod.w[i + j] = (std::uint64_t)cur;
                carry = cur >> 64;
            }
            std::size_t pos = i + other.w.size();
            while (carry) {
                unsigned __int128 cur = (unsigned __int128)prod.w[pos] + carry;
                prod.w[pos] = (std::uint64_t)cur;
                carry = cur >> 64;
                ++pos;
            }
        }
        prod.trim();
        term = prod;
    }
    BigU sum = term;
    // step k -> k-1:
    //   C(K,k-1)        = C(K,k)   * k / (K-k+1)
    //   C(N-K,m-k+1)    = C(N-K,m-k) * (N-K-m+k) / (m-k+1)
    for (std::uint64_t k = t.kmax; k > t.kmin; --k) {
        term.mul_small(k);
        term.div_small(K - k + 1);
        term.mul_small(N - K - (m - k));
        term.div_small(m - k + 1);
        sum.add(term);
    }
    return sum;
}

}  // namespace

double fail_prob_exact(std::uint64_t N, std::uint64_t K, std::uint64_t m) {
    auto t = tail_params(N, K, m);
    if (t.empty) return 0.0;
    BigU num = exact_tail_numerator(N, K, m, t);
    BigU denom = big_choose(N, m);
    return std::exp(num.ln() - denom.ln());
}

bool fail_prob_at_most_exact(std::uint64_t N, std::uint64_t K, std::uint64_t m,
                             int target_log2) {
    auto t = tail_params(N, K, m);
    if (t.empty) return true;
    if (target_log2 > 0) throw DomainError("target_log2 must be <= 0");
    BigU num = exact_tail_numerator(N, K, m, t);
    BigU denom = big_choose(N, m);
    // num / denom <= 2^target  <=>  num * 2^(-target) <= denom
    num.shl_bits((std::uint64_t)(-target_log2));
    return num.cmp(denom) <= 0;
}

SizingResult min_notary_size(const SizingQuery& q) {
    if (q.byzantine_count > q.population || q.population == 0) {
        throw DomainError("min_notary_size: need K <= N, N > 0");
    }
    const double target = std::ldexp(1.0, q.target_failure_log2);
    for (std::uint64_t m = 1; m <= q.population; ++m) {
        double p = fail_prob(q.population, q.byzantine_count, m);
        bool qualifies;
        if (p <= 0.0) {
            qualifies = true;
        } else {
            double margin = std::abs(std::log2(p) - (double)q.target_failure_log2);
            if (margin < 1e-6) {
                // borderline cell: let the exact path decide
                qualifies = fail_prob_at_most_exact(q.population, q.byzantine_count, m,
                                                    q.target_failure_log2);
            } else {
                qualifies = p <= target;
            }
        }
        if (qualifies) {
            // re-verify exactly (the scan from m=1 already guarantees minimality)
            if (!fail_prob_at_most_exact(q.population, q.byzantine_count, m,
                                         q.target_failure_log2)) {
                continue;
            }
            return SizingResult{m, fail_prob(q.population, q.byzantine_count, m)};
        }
    }
    throw Infeasible("no notary size below the population meets the target");
}

const std::vector<TableCell>& reference_table() {
    static const std::vector<TableCell> table = {
        {10000, 2500, -40, 1237},  {10000, 2000, -40, 481},
        {100000, 25000, -40, 1402}, {100000, 20000, -40, 489},
        {10000, 2500, -60, 1789},  {10000, 2000, -60, 724},
        {100000, 25000, -60, 2165}, {100000, 20000, -60, 774},
        {10000, 2500, -80, 2272},  {10000, 2000, -80, 952},
        {100000, 25000, -80, 2900}, {100000, 20000, -80, 1054},
    };
    return table;
}

}  // namespace latsim::analysis
