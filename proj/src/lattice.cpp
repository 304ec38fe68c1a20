// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0

#include "latsim/lattice.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace latsim {

Bytes Block::canonical_encoding() const {
    Enc e;
    e.u32(chain_id);
    e.u64(height);
    e.u64(proposer_id);
    e.digest(parent_hash);
    e.u32((std::uint32_t)acks.size());
    for (const auto& a : acks) {
        e.u64(a.block_proposer_id);
        e.digest(a.acked_block_hash);
        e.u64(a.block_height);
    }
    e.u32((std::uint32_t)payload.size());
    for (const auto& d : payload) e.digest(d);
    e.u32((std::uint32_t)records.size());
    for (const auto& d : records) e.digest(d);
    e.i64(block_timestamp);
    e.u32(parent_notarization.group.kind);
    e.u32(parent_notarization.group.chain);
    e.u64(parent_notarization.group.epoch);
    e.digest(parent_notarization.message_digest);
    e.digest(parent_notarization.tag);
    return e.take();
}

void Block::finalize_hash() { hash = sha256(canonical_encoding()); }

std::optional<Block> Block::decode(std::span<const std::uint8_t> data) {
    Dec d(data);
    Block b;
    std::uint32_t n_acks, n_payload, n_records;
    if (!d.u32(b.chain_id) || !d.u64(b.height) || !d.u64(b.proposer_id) ||
        !d.digest(b.parent_hash) || !d.u32(n_acks)) {
        return std::nullopt;
    }
    if (n_acks > 4096) return std::nullopt;
    for (std::uint32_t i = 0; i < n_acks; ++i) {
        AckField a;
        if (!d.u64(a.block_proposer_id) || !d.digest(a.acked_block_hash) ||
            !d.u64(a.block_height)) {
            return std::nullopt;
        }
        b.acks.push_back(a);
    }
    if (!d.u32(n_payload) || n_payload > 1 << 20) return std::nullopt;
    for (std::uint32_t i = 0; i < n_payload; ++i) {
        Digest t;
        if (!d.digest(t)) return std::nullopt;
        b.payload.push_back(t);
    }
    if (!d.u32(n_records) || n_records > 1 << 20) return std::nullopt;
    for (std::uint32_t i = 0; i < n_records; ++i) {
        Digest t;
        if (!d.digest(t)) return std::nullopt;
        b.records.push_back(t);
    }
    if (!d.i64(b.block_timestamp)) return std::nullopt;
    if (!d.u32(b.parent_notarization.group.kind) ||
        !d.u32(b.parent_notarization.group.chain) ||
        !d.u64(b.parent_notarization.group.epoch) ||
        !d.digest(b.parent_notarization.message_digest) ||
        !d.digest(b.parent_notarization.tag) || !d.done()) {
        return std::nullopt;
    }
    b.finalize_hash();
    return b;
}

Block make_empty_block(std::uint32_t chain, std::uint64_t height, const Block* parent,
                       const ThresholdSignature& parent_sig) {
    Block b;
    b.chain_id = chain;
    b.height = height;
    b.proposer_id = Block::kEmptyProposer;
    if (parent != nullptr) {
        b.parent_hash = parent->hash;
        b.block_timestamp = parent->block_timestamp + 1;
        b.parent_notarization = parent_sig;
    }
    b.finalize_hash();
    return b;
}

BlockPtr LatticeView::get(const Digest& h) const {
    auto it = blocks_.find(h);
    return it == blocks_.end() ? nullptr : it->second;
}

std::int64_t LatticeView::tip_height(std::uint32_t chain) const {
    auto it = tips_.find(chain);
    return it == tips_.end() ? -1 : it->second;
}

bool LatticeView::structurally_valid(const Block& b, ValidationResult& out) const {
    Block copy = b;
    copy.finalize_hash();
    if (!(copy.hash == b.hash)) {
        out = {Validity::Reject, {}, "hash mismatch"};
        return false;
    }
    if (b.height == 0 && !b.parent_hash.is_zero()) {
        out = {Validity::Reject, {}, "genesis with parent"};
        return false;
    }
    if (b.height > 0 && b.parent_hash.is_zero()) {
        out = {Validity::Reject, {}, "missing parent hash"};
        return false;
    }
    return true;
}

// Checks that need the dependencies in hand: height continuity, ack shape,
// ack monotonicity, parent notarization.
bool LatticeView::release_checks(const Block& b, std::string& reason) const {
    std::unordered_map<std::uint32_t, std::uint64_t> seen_chains;
    for (const auto& a : b.acks) {
        auto tgt = get(a.acked_block_hash);
        if (!tgt) {
            reason = "ack target vanished";
            return false;
        }
        if (tgt->height != a.block_height) {
            reason = "ack height mismatch";
            return false;
        }
        if (tgt->chain_id == b.chain_id) {
            reason = "ack of own chain";
            return false;
        }
        if (seen_chains.count(tgt->chain_id)) {
            reason = "duplicate ack chain";
            return false;
        }
        seen_chains[tgt->chain_id] = tgt->height;
    }
    if (b.height > 0) {
        auto parent = get(b.parent_hash);
        if (!parent) {
            reason = "parent vanished";
            return false;
        }
        if (parent->height + 1 != b.height || parent->chain_id != b.chain_id) {
            reason = "height gap";
            return false;
        }
        if (b.block_timestamp <= parent->block_timestamp) {
            reason = "timestamp not increasing";
            return false;
        }
        // acks may not regress below what the lineage already acked
        auto cum = cum_acks_.find(b.parent_hash);
        if (cum != cum_acks_.end()) {
            for (const auto& [chain, h] : seen_chains) {
                auto prev = cum->second.find(chain);
                if (prev != cum->second.end() && h < prev->second) {
                    reason = "ack regression";
                    return false;
                }
            }
        }
        if (params_.verify_notarization && params_.keychain != nullptr) {
            GroupId g{kGroupNotary, b.chain_id, parent->height / params_.epoch_length};
            if (!params_.keychain->verify_threshold(g, parent->hash,
                                                    b.parent_notarization)) {
                reason = "bad parent notarization";
                return false;
            }
        }
    }
    return true;
}

bool LatticeView::deps_released(const Block& b, std::vector<Digest>* missing) const {
    bool ok = true;
    auto need = [&](const Digest& h) {
        if (released_.count(h) == 0) {
            ok = false;
            if (missing) missing->push_back(h);
        }
    };
    if (b.height > 0) need(b.parent_hash);
    for (const auto& a : b.acks) need(a.acked_block_hash);
    return ok;
}

ValidationResult LatticeView::validate_block(const Block& b) const {
    ValidationResult out;
    if (!structurally_valid(b, out)) return out;
    std::vector<Digest> missing;
    if (!deps_released(b, &missing)) {
        return {Validity::Defer, std::move(missing), ""};
    }
    std::string reason;
    if (!release_checks(b, reason)) return {Validity::Reject, {}, reason};
    return {Validity::Accept, {}, ""};
}

std::vector<BlockPtr> LatticeView::insert_block(const Block& b) {
    std::vector<BlockPtr> released;
    ValidationResult v;
    if (!structurally_valid(b, v)) return released;
    if (blocks_.count(b.hash)) return released;  // duplicate: no-op

    auto ptr = std::make_shared<Block>(b);
    blocks_[b.hash] = ptr;

    // Try to release this block and any deferred descendants it unblocks.
    std::deque<Digest> queue{b.hash};
    std::vector<BlockPtr> ready;
    while (!queue.empty()) {
        Digest h = queue.front();
        queue.pop_front();
        auto blk = blocks_.at(h);
        if (released_.count(h)) continue;
        if (!deps_released(*blk, nullptr)) {
            std::vector<Digest> missing;
            deps_released(*blk, &missing);
            for (const auto& dep : missing) waiting_on_[dep].push_back(h);
            continue;
        }
        std::string reason;
        if (!release_checks(*blk, reason)) continue;  // structurally dead

        released_.insert(h);
        // cumulative ack frontier for monotonicity checks on descendants
        std::unordered_map<std::uint32_t, std::uint64_t> cum;
        if (blk->height > 0) {
            auto p = cum_acks_.find(blk->parent_hash);
            if (p != cum_acks_.end()) cum = p->second;
        }
        for (const auto& a : blk->acks) {
            auto tgt = blocks_.at(a.acked_block_hash);
            auto& slot = cum[tgt->chain_id];
            slot = std::max(slot, tgt->height);
        }
        cum_acks_[h] = std::move(cum);
        auto [tip_it, fresh] = tips_.try_emplace(blk->chain_id, (std::int64_t)blk->height);
        if (!fresh) tip_it->second = std::max(tip_it->second, (std::int64_t)blk->height);
        ready.push_back(blk);

        auto waiters = waiting_on_.find(h);
        if (waiters != waiting_on_.end()) {
            for (const auto& wh : waiters->second) queue.push_back(wh);
            waiting_on_.erase(waiters);
        }
    }
    std::sort(ready.begin(), ready.end(), [](const BlockPtr& a, const BlockPtr& b2) {
        if (a->height != b2->height) return a->height < b2->height;
        if (a->chain_id != b2->chain_id) return a->chain_id < b2->chain_id;
        return a->hash < b2->hash;
    });
    return ready;
}

bool LatticeView::indirect_ack(const Digest& from, const Digest& target) const {
    if (!contains(from) || !contains(target)) {
        throw UnknownBlock("indirect_ack: unknown block");
    }
    if (from == target) return false;
    std::unordered_set<Digest, U256Hash> seen;
    std::deque<Digest> queue{from};
    while (!queue.empty()) {
        Digest h = queue.front();
        queue.pop_front();
        if (!seen.insert(h).second) continue;
        auto blk = get(h);
        if (!blk) continue;
        auto follow = [&](const Digest& next) {
            if (next == target) return true;
            if (contains(next)) queue.push_back(next);
            return false;
        };
        if (blk->height > 0 && follow(blk->parent_hash)) return true;
        for (const auto& a : blk->acks) {
            if (follow(a.acked_block_hash)) return true;
        }
    }
    return false;
}

std::vector<Block> parse_fixture(const std::string& text) {
    std::vector<Block> out;
    // chain -> height -> hash, for parent/ack resolution
    std::map<std::uint32_t, std::map<std::uint64_t, Digest>> index;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        Block b;
        std::istringstream ls(line);
        std::string field;
        auto next = [&](const char* what) {
            if (!std::getline(ls, field, ',')) {
                throw std::invalid_argument("fixture line " + std::to_string(lineno) +
                                            ": missing " + what);
            }
            return field;
        };
        b.chain_id = (std::uint32_t)std::stoul(next("chain"));
        b.height = std::stoull(next("height"));
        b.proposer_id = std::stoull(next("proposer"));
        b.block_timestamp = std::stoll(next("timestamp"));
        std::string ack_text;
        if (std::getline(ls, ack_text, ',')) {
            if (ack_text.rfind("acks=", 0) != 0) {
                throw std::invalid_argument("fixture line " + std::to_string(lineno) +
                                            ": expected acks=");
            }
            std::istringstream as(ack_text.substr(5));
            std::string pair;
            while (std::getline(as, pair, ';')) {
                if (pair.empty()) continue;
                auto colon = pair.find(':');
                if (colon == std::string::npos) {
                    throw std::invalid_argument("fixture line " + std::to_string(lineno) +
                                                ": bad ack " + pair);
                }
                std::uint32_t ac = (std::uint32_t)std::stoul(pair.substr(0, colon));
                std::uint64_t ah = std::stoull(pair.substr(colon + 1));
                auto it = index.find(ac);
                if (it == index.end() || it->second.count(ah) == 0) {
                    throw std::invalid_argument("fixture line " + std::to_string(lineno) +
                                                ": ack target not yet defined");
                }
                AckField f;
                f.block_proposer_id = ac;  // fixtures use chain id as proposer
                f.acked_block_hash = it->second.at(ah);
                f.block_height = ah;
                b.acks.push_back(f);
            }
        }
        if (b.height > 0) {
            auto it = index.find(b.chain_id);
            if (it == index.end() || it->second.count(b.height - 1) == 0) {
                throw std::invalid_argument("fixture line " + std::to_string(lineno) +
                                            ": parent not yet defined");
            }
            b.parent_hash = it->second.at(b.height - 1);
        }
        b.finalize_hash();
        index[b.chain_id][b.height] = b.hash;
        out.push_back(std::move(b));
    }
    return out;
}

std::string format_fixture(std::span<const Block> blocks) {
    // reverse map hash -> chain:height so acks serialize symbolically
    std::unordered_map<Digest, std::pair<std::uint32_t, std::uint64_t>, U256Hash> where;
    for (const auto& b : blocks) where[b.hash] = {b.chain_id, b.height};
    std::ostringstream out;
    for (const auto& b : blocks) {
        out << b.chain_id << ',' << b.height << ',' << b.proposer_id << ','
            << b.block_timestamp;
        if (!b.acks.empty()) {
            out << ",acks=";
            for (std::size_t i = 0; i < b.acks.size(); ++i) {
                auto it = where.find(b.acks[i].acked_block_hash);
                if (it == where.end()) {
                    throw std::invalid_argument("format_fixture: foreign ack target");
                }
                if (i) out << ';';
                out << it->second.first << ':' << it->second.second;
            }
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace latsim
