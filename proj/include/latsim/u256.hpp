// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <functional>
#include <string>

namespace latsim {

/// Unsigned 256-bit integer, little-endian limbs. Covers exactly the
/// operations the protocol needs: ordering, absolute difference, small
/// modulus, and the 320-bit product used by the proposal threshold.
struct U256 {
    std::array<std::uint64_t, 4> w{0, 0, 0, 0};

    static U256 from_u64(std::uint64_t v) {
        U256 r;
        r.w[0] = v;
        return r;
    }

    static U256 max_value() {
        U256 r;
        r.w.fill(~0ull);
        return r;
    }

    friend bool operator==(const U256&, const U256&) = default;

    friend bool operator<(const U256& a, const U256& b) {
        for (int i = 3; i >= 0; --i) {
            if (a.w[i] != b.w[i]) return a.w[i] < b.w[i];
        }
        return false;
    }
    friend bool operator>(const U256& a, const U256& b) { return b < a; }
    friend bool operator<=(const U256& a, const U256& b) { return !(b < a); }
    friend bool operator>=(const U256& a, const U256& b) { return !(a < b); }

    bool is_zero() const { return w[0] == 0 && w[1] == 0 && w[2] == 0 && w[3] == 0; }

    // Wrapping subtraction; callers that need |a-b| use abs_diff.
    friend U256 operator-(const U256& a, const U256& b) {
        U256 r;
        unsigned __int128 borrow = 0;
        for (int i = 0; i < 4; ++i) {
            unsigned __int128 d =
                (unsigned __int128)a.w[i] - b.w[i] - (std::uint64_t)borrow;
            r.w[i] = (std::uint64_t)d;
            borrow = (d >> 64) ? 1 : 0;
        }
        return r;
    }

    static U256 abs_diff(const U256& a, const U256& b) {
        return a < b ? b - a : a - b;
    }

    std::uint64_t mod_u64(std::uint64_t m) const {
        unsigned __int128 rem = 0;
        for (int i = 3; i >= 0; --i) {
            rem = ((rem << 64) | w[i]) % m;
        }
        return (std::uint64_t)rem;
    }

    /// 256x64 -> 320-bit product, returned as (low 256 bits, high limb).
    std::pair<U256, std::uint64_t> mul_u64(std::uint64_t m) const {
        U256 lo;
        std::uint64_t carry = 0;
        for (int i = 0; i < 4; ++i) {
            unsigned __int128 p = (unsigned __int128)w[i] * m + carry;
            lo.w[i] = (std::uint64_t)p;
            carry = (std::uint64_t)(p >> 64);
        }
        return {lo, carry};
    }

    // Big-endian byte views (byte 0 = most significant).
    std::array<std::uint8_t, 32> to_bytes() const {
        std::array<std::uint8_t, 32> out{};
        for (int limb = 0; limb < 4; ++limb) {
            std::uint64_t v = w[3 - limb];
            for (int b = 0; b < 8; ++b) {
                out[limb * 8 + b] = (std::uint8_t)(v >> (56 - 8 * b));
            }
        }
        return out;
    }

    static U256 from_bytes(const std::uint8_t* p) {
        U256 r;
        for (int limb = 0; limb < 4; ++limb) {
            std::uint64_t v = 0;
            for (int b = 0; b < 8; ++b) v = (v << 8) | p[limb * 8 + b];
            r.w[3 - limb] = v;
        }
        return r;
    }

    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        auto bytes = to_bytes();
        std::string s(64, '0');
        for (int i = 0; i < 32; ++i) {
            s[2 * i] = digits[bytes[i] >> 4];
            s[2 * i + 1] = digits[bytes[i] & 0xf];
        }
        return s;
    }
};

struct U256Hash {
    std::size_t operator()(const U256& v) const noexcept {
        // limbs are already uniformly distributed for hash digests
        return (std::size_t)(v.w[0] ^ (v.w[1] * 0x9e3779b97f4a7c15ull));
    }
};

}  // namespace latsim
