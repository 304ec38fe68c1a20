// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "latsim/u256.hpp"

namespace latsim {

using Bytes = std::vector<std::uint8_t>;

/// Canonical encoder: fixed field order, big-endian integers,
/// length-prefixed lists. Every hashed structure goes through this.
class Enc {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 3; i >= 0; --i) buf_.push_back((std::uint8_t)(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 7; i >= 0; --i) buf_.push_back((std::uint8_t)(v >> (8 * i)));
    }
    void i64(std::int64_t v) { u64((std::uint64_t)v); }
    void digest(const U256& d) {
        auto b = d.to_bytes();
        buf_.insert(buf_.end(), b.begin(), b.end());
    }
    void raw(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
    void raw(std::span<const std::uint8_t> s) {
        buf_.insert(buf_.end(), s.begin(), s.end());
    }

    const Bytes& bytes() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

/// Big-endian reader with bounds checking; returns false on underrun.
class Dec {
public:
    explicit Dec(std::span<const std::uint8_t> data) : data_(data) {}

    bool u8(std::uint8_t& v) {
        if (pos_ + 1 > data_.size()) return false;
        v = data_[pos_++];
        return true;
    }
    bool u32(std::uint32_t& v) {
        if (pos_ + 4 > data_.size()) return false;
        v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
        return true;
    }
    bool u64(std::uint64_t& v) {
        if (pos_ + 8 > data_.size()) return false;
        v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
        return true;
    }
    bool i64(std::int64_t& v) {
        std::uint64_t u;
        if (!u64(u)) return false;
        v = (std::int64_t)u;
        return true;
    }
    bool digest(U256& d) {
        if (pos_ + 32 > data_.size()) return false;
        d = U256::from_bytes(data_.data() + pos_);
        pos_ += 32;
        return true;
    }
    bool done() const { return pos_ == data_.size(); }
    std::size_t pos() const { return pos_; }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace latsim
