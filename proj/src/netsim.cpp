// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0

#include "latsim/netsim.hpp"

#include <algorithm>
#include <sstream>

#include "latsim/chain.hpp"

namespace latsim {

namespace {

std::uint64_t splitmix(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

void encode_share(Enc& e, const ShareSignature& s) {
    e.u32(s.share_index);
    e.digest(s.message_digest);
    e.digest(s.tag);
}

bool decode_share(Dec& d, ShareSignature& s) {
    return d.u32(s.share_index) && d.digest(s.message_digest) && d.digest(s.tag);
}

std::string hex_of(const Bytes& b) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(b.size() * 2);
    for (auto c : b) {
        s.push_back(digits[c >> 4]);
        s.push_back(digits[c & 0xf]);
    }
    return s;
}

}  // namespace

Bytes encode_sim_message(const SimMessage& m) {
    Enc e;
    if (const auto* ba = std::get_if<MsgBa>(&m)) {
        e.u8(0);
        e.raw(std::span<const std::uint8_t>(ba->m.encode()));
    } else if (const auto* blk = std::get_if<MsgBlock>(&m)) {
        e.u8(1);
        e.raw(std::span<const std::uint8_t>(blk->b.canonical_encoding()));
    } else if (const auto* ns = std::get_if<MsgNotaryShare>(&m)) {
        e.u8(2);
        e.u32(ns->chain);
        e.u64(ns->height);
        e.digest(ns->block_hash);
        encode_share(e, ns->share);
    } else if (const auto* cr = std::get_if<MsgCrsShare>(&m)) {
        e.u8(3);
        e.u64(cr->epoch);
        encode_share(e, cr->share);
    } else if (const auto* cp = std::get_if<MsgCompactionShare>(&m)) {
        e.u8(4);
        e.u64(cp->entry_index);
        e.digest(cp->entry_digest);
        e.u64(cp->epoch);
        encode_share(e, cp->share);
    }
    return e.take();
}

std::optional<SimMessage> decode_sim_message(std::span<const std::uint8_t> data) {
    if (data.empty()) return std::nullopt;
    std::uint8_t tag = data[0];
    auto rest = data.subspan(1);
    switch (tag) {
        case 0: {
            auto m = BaMessage::decode(rest);
            if (!m) return std::nullopt;
            return SimMessage{MsgBa{*m}};
        }
        case 1: {
            auto b = Block::decode(rest);
            if (!b) return std::nullopt;
            return SimMessage{MsgBlock{*b}};
        }
        case 2: {
            Dec d(rest);
            MsgNotaryShare ns;
            if (!d.u32(ns.chain) || !d.u64(ns.height) || !d.digest(ns.block_hash) ||
                !decode_share(d, ns.share) || !d.done()) {
                return std::nullopt;
            }
            return SimMessage{ns};
        }
        case 3: {
            Dec d(rest);
            MsgCrsShare cr;
            if (!d.u64(cr.epoch) || !decode_share(d, cr.share) || !d.done()) {
                return std::nullopt;
            }
            return SimMessage{cr};
        }
        case 4: {
            Dec d(rest);
            MsgCompactionShare cp;
            if (!d.u64(cp.entry_index) || !d.digest(cp.entry_digest) ||
                !d.u64(cp.epoch) || !decode_share(d, cp.share) || !d.done()) {
                return std::nullopt;
            }
            return SimMessage{cp};
        }
        default: return std::nullopt;
    }
}

Engine::Engine(Scenario sc)
    : sc_(std::move(sc)), kc_(sc_.seed), rng_state_(sc_.seed ^ 0xa5a5a5a5deadbeefull) {
    sc_.validate();
    seen_.resize(sc_.nodes);
    for (NodeId n = 0; n < sc_.nodes; ++n) {
        nodes_.push_back(std::make_unique<Node>(n, sc_, kc_, *this));
    }
    for (const auto& w : sc_.partitions) partition_order_.push_back(&w);
    std::sort(partition_order_.begin(), partition_order_.end(),
              [](const PartitionWindow* a, const PartitionWindow* b) {
                  return a->start < b->start;
              });
    adversary_ = std::make_unique<Adversary>(*this);
    if (sc_.emit_transcript) transcript_ = &transcript_store_;
}

Engine::~Engine() = default;

bool Engine::is_byzantine(NodeId n, std::int64_t at) const {
    return sc_.is_configured_byzantine(n) && at >= sc_.adversary.corrupt_at;
}

void Engine::push(std::int64_t time, int phase, Payload p) {
    queue_.push(Event{time, phase, seq_++, std::move(p)});
}

std::int64_t Engine::sample_delay() {
    if (sc_.adversarial_reorder) {
        std::int64_t lo = sc_.lambda / 2;
        return lo + (std::int64_t)(splitmix(rng_state_) % (std::uint64_t)(sc_.lambda - lo + 1));
    }
    switch (sc_.delay_model) {
        case DelayModel::Constant: return sc_.lambda;
        case DelayModel::Uniform: {
            std::uint64_t span = (std::uint64_t)(sc_.delay_max - sc_.delay_min + 1);
            return sc_.delay_min + (std::int64_t)(splitmix(rng_state_) % span);
        }
    }
    return sc_.lambda;
}

std::int64_t Engine::adjusted_delivery_time(NodeId from, NodeId to,
                                            std::int64_t send_time) {
    std::int64_t t = send_time + sample_delay();
    // windows in start order: once pushed past one, only later windows can
    // still affect the delivery
    for (const auto* w : partition_order_) {
        int gf = -1, gt = -1;
        for (std::size_t g = 0; g < w->groups.size(); ++g) {
            for (NodeId n : w->groups[g]) {
                if (n == from) gf = (int)g;
                if (n == to) gt = (int)g;
            }
        }
        bool cross = gf != gt;
        bool affected = (send_time >= w->start && send_time < w->end) ||
                        (t >= w->start && t < w->end);
        if (cross && affected) {
            t = w->end + sample_delay();
        }
    }
    return t;
}

void Engine::gossip(NodeId from, const SimMessage& msg) {
    if (replay_) return;
    Bytes bytes = encode_sim_message(msg);
    Digest digest = sha256(bytes);
    ++metrics_.messages_gossiped;
    seen_[from].insert(digest);
    for (NodeId to = 0; to < sc_.nodes; ++to) {
        if (to == from) continue;
        if (seen_[to].count(digest)) continue;
        push(adjusted_delivery_time(from, to, now_), 0, Delivery{to, msg, digest});
    }
}

void Engine::send_direct(NodeId from, NodeId to, std::int64_t at, const SimMessage& msg) {
    (void)from;  // the adversary owns the link; no lambda bound applies
    if (replay_) return;
    Bytes bytes = encode_sim_message(msg);
    Digest digest = sha256(bytes);
    ++metrics_.messages_gossiped;
    push(at, 0, Delivery{to, msg, digest});
}

void Engine::schedule_tick(NodeId node, std::int64_t delay, std::uint32_t chain,
                           std::uint64_t height, std::uint64_t round, int step) {
    if (replay_) return;
    push(now_ + delay, 1, Tick{node, chain, height, round, step});
}

void Engine::schedule_height_start(NodeId node, std::int64_t delay, std::uint32_t chain,
                                   std::uint64_t height) {
    if (replay_) return;
    push(now_ + delay, 1, HeightStart{node, chain, height});
}

void Engine::record_commit(NodeId node, std::uint32_t chain, std::uint64_t height,
                           const Digest& block_hash) {
    if (sc_.is_configured_byzantine(node)) return;
    std::uint64_t key = ((std::uint64_t)chain << 48) | height;
    auto [it, fresh] = first_commit_.emplace(key, block_hash);
    if (!fresh && !(it->second == block_hash)) {
        agreement_ok_ = false;
        violations_.push_back("agreement violation at chain " + std::to_string(chain) +
                              " height " + std::to_string(height) + " by node " +
                              std::to_string(node));
    }
}

void Engine::dispatch(const Event& ev) {
    if (const auto* d = std::get_if<Delivery>(&ev.payload)) {
        if (is_byzantine(d->to, now_)) return;
        if (!seen_[d->to].insert(d->digest).second) return;
        ++metrics_.deliveries;
        if (transcript_) {
            std::ostringstream line;
            line << "D," << now_ << ',' << d->to << ','
                 << hex_of(encode_sim_message(d->msg));
            transcript_->push_back(line.str());
        }
        nodes_[d->to]->on_message(now_, d->msg);
        // single re-relay per correct receiver
        for (NodeId to = 0; to < sc_.nodes; ++to) {
            if (to == d->to || seen_[to].count(d->digest)) continue;
            push(adjusted_delivery_time(d->to, to, now_), 0,
                 Delivery{to, d->msg, d->digest});
        }
        return;
    }
    if (const auto* t = std::get_if<Tick>(&ev.payload)) {
        if (is_byzantine(t->node, now_)) return;
        if (transcript_) {
            std::ostringstream line;
            line << "T," << now_ << ',' << t->node << ',' << t->chain << ',' << t->height
                 << ',' << t->round << ',' << t->step;
            transcript_->push_back(line.str());
        }
        nodes_[t->node]->on_tick(now_, t->chain, t->height, t->round, t->step);
        return;
    }
    if (const auto* h = std::get_if<HeightStart>(&ev.payload)) {
        if (is_byzantine(h->node, now_)) return;
        if (transcript_) {
            std::ostringstream line;
            line << "H," << now_ << ',' << h->node << ',' << h->chain << ',' << h->height;
            transcript_->push_back(line.str());
        }
        nodes_[h->node]->on_height_start(now_, h->chain, h->height);
        // adversary acts relative to the first real start of an instance
        std::uint64_t key = ((std::uint64_t)h->chain << 48) | h->height;
        if (!height_started_.count(key)) {
            const auto* rec = nodes_[h->node]->height_record(h->chain, h->height);
            if (rec != nullptr && rec->start >= 0) {
                height_started_.insert(key);
                auto view = nodes_[h->node]->election_view(h->chain, h->height);
                if (view) {
                    adversary_->on_height_start(now_, h->chain, h->height, view->second,
                                                view->first);
                }
            }
        }
        return;
    }
}

RunReport Engine::run() {
    // initial height starts, at most lambda of skew apart
    for (NodeId n = 0; n < sc_.nodes; ++n) {
        if (sc_.is_configured_byzantine(n) && sc_.adversary.corrupt_at == 0) continue;
        std::int64_t offset =
            sc_.start_skew > 0
                ? (std::int64_t)(splitmix(rng_state_) % (std::uint64_t)(sc_.start_skew + 1))
                : 0;
        for (std::uint32_t c = 0; c < sc_.chains; ++c) {
            push(offset, 1, HeightStart{n, c, 0});
        }
        if (sc_.config_change) {
            for (std::uint32_t c = sc_.chains; c < sc_.config_change->chains; ++c) {
                push(sc_.config_change->at_time + 2 * sc_.lambda, 1, HeightStart{n, c, 0});
            }
        }
    }

    bool timed_out = false;
    while (!queue_.empty()) {
        Event ev = queue_.top();
        queue_.pop();
        if (ev.time > sc_.max_sim_time) {
            timed_out = true;
            break;
        }
        now_ = ev.time;
        dispatch(ev);
    }

    RunReport report;
    report.scenario = sc_;
    report.end_time = now_;
    if (timed_out) {
        report.liveness_ok = false;
        report.violations.push_back("horizon exceeded: simulation hit max_sim_time");
    }
    finalize(report);
    return report;
}

void Engine::finalize(RunReport& report) {
    report.agreement_ok = agreement_ok_;
    for (const auto& v : violations_) report.violations.push_back(v);

    std::vector<NodeId> correct;
    for (NodeId n = 0; n < sc_.nodes; ++n) {
        if (!sc_.is_configured_byzantine(n)) correct.push_back(n);
    }

    std::uint32_t total_chains =
        sc_.config_change ? std::max(sc_.chains, sc_.config_change->chains) : sc_.chains;

    // liveness: every chain reaches the horizon on every correct node
    for (NodeId n : correct) {
        for (std::uint32_t c = 0; c < total_chains; ++c) {
            if (nodes_[n]->committed_count(c) < sc_.horizon_heights) {
                report.liveness_ok = false;
                report.violations.push_back(
                    "liveness: node " + std::to_string(n) + " chain " + std::to_string(c) +
                    " stopped at height " + std::to_string(nodes_[n]->committed_count(c)));
            }
        }
    }

    // chain integrity: every embedded notarization verifies
    for (NodeId n : correct) {
        std::string why;
        if (!nodes_[n]->verify_chain_integrity(&why)) {
            report.integrity_ok = false;
            report.violations.push_back("integrity: node " + std::to_string(n) + ": " + why);
        }
    }

    // ordering and timestamp agreement across correct nodes
    for (NodeId n : correct) {
        report.node_batch_lines.push_back(nodes_[n]->batch_lines());
        report.node_timestamps.push_back(nodes_[n]->timestamp_rows());
    }
    for (std::size_t i = 1; i < report.node_batch_lines.size(); ++i) {
        if (report.node_batch_lines[i] != report.node_batch_lines[0]) {
            report.ordering_agreement_ok = false;
            report.violations.push_back("ordering: node " + std::to_string(correct[i]) +
                                        " batch log diverges from node " +
                                        std::to_string(correct[0]));
        }
        const auto& a = report.node_timestamps[0];
        const auto& b = report.node_timestamps[i];
        bool same = a.size() == b.size();
        for (std::size_t k = 0; same && k < a.size(); ++k) {
            same = a[k].block_hash == b[k].block_hash &&
                   a[k].consensus_timestamp == b[k].consensus_timestamp;
        }
        if (!same) {
            report.timestamps_ok = false;
            report.violations.push_back("timestamps: node " + std::to_string(correct[i]) +
                                        " diverges");
        }
    }

    // transaction uniqueness over the injected set
    if (!correct.empty()) {
        auto payloads = nodes_[correct[0]]->committed_payload_union();
        std::unordered_map<Digest, int, U256Hash> counts;
        for (const auto& d : payloads) counts[d]++;
        auto injected = mempool_schedule(sc_);
        report.metrics.txs_injected = injected.size();
        for (const auto& [at, tx] : injected) {
            (void)at;
            auto it = counts.find(tx);
            if (it == counts.end()) continue;
            report.metrics.txs_packed++;
            if (it->second > 1) {
                report.metrics.tx_duplicates++;
                report.tx_unique_ok = false;
            }
        }
        if (!report.tx_unique_ok) {
            report.violations.push_back("load balancer: duplicate transaction packing");
        }
    }

    // notarization coverage: block heights and compaction entries
    for (NodeId n : correct) {
        for (std::uint32_t c = 0; c < total_chains; ++c) {
            std::uint64_t committed = nodes_[n]->committed_count(c);
            for (std::uint64_t h = 0; h < committed; ++h) {
                if (nodes_[n]->notarization_of(c, h) == nullptr) {
                    report.notarization_coverage_ok = false;
                    report.violations.push_back(
                        "notarization missing at node " + std::to_string(n) + " chain " +
                        std::to_string(c) + " height " + std::to_string(h));
                }
            }
        }
        if (nodes_[n]->compaction_notarized() != nodes_[n]->compaction_entries()) {
            report.notarization_coverage_ok = false;
            report.violations.push_back("compaction notarization incomplete at node " +
                                        std::to_string(n));
        }
    }

    // boundary monotonicity of consensus timestamps
    if (sc_.config_change && !correct.empty()) {
        const auto& rows = report.node_timestamps[0];
        bool seen_r2 = false;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (!seen_r2 && rows[i].block_timestamp > sc_.config_change->at_time) {
                seen_r2 = true;
            }
            if (seen_r2 && rows[i].consensus_timestamp < rows[i - 1].consensus_timestamp) {
                report.boundary_monotone_ok = false;
                report.violations.push_back("consensus timestamp dip at entry " +
                                            std::to_string(i));
                break;
            }
        }
    }

    // per-height statistics
    for (std::uint32_t c = 0; c < total_chains; ++c) {
        for (std::uint64_t h = 0; h < sc_.horizon_heights; ++h) {
            HeightStat stat;
            stat.chain = c;
            stat.height = h;
            bool any = false;
            for (NodeId n : correct) {
                const auto* rec = nodes_[n]->height_record(c, h);
                if (rec == nullptr || rec->start < 0) continue;
                if (!any) {
                    stat.first_start = rec->start;
                } else {
                    stat.first_start = std::min(stat.first_start, rec->start);
                }
                any = true;
                if (rec->decide >= 0) {
                    stat.last_decide = std::max(stat.last_decide, rec->decide);
                    stat.latency_max =
                        std::max(stat.latency_max, rec->decide - rec->start);
                    stat.decide_round_max = std::max(stat.decide_round_max, rec->decide_round);
                }
                stat.max_round_entered = std::max(stat.max_round_entered, rec->max_round);
                for (const auto& w : sc_.partitions) {
                    if (rec->start >= w.end || rec->decide <= w.end) continue;
                    std::uint64_t round_at_heal = 1;
                    for (const auto& [round, at] : rec->round_log) {
                        if (at <= w.end) round_at_heal = round;
                    }
                    std::uint64_t after = rec->decide_round > round_at_heal
                                              ? rec->decide_round - round_at_heal
                                              : 0;
                    stat.rounds_after_heal_max = std::max(stat.rounds_after_heal_max, after);
                }
            }
            if (any) report.heights.push_back(stat);
        }
    }

    // metrics
    report.metrics.messages_gossiped = metrics_.messages_gossiped;
    report.metrics.deliveries = metrics_.deliveries;
    double latency_sum = 0;
    std::uint64_t latency_cnt = 0;
    for (NodeId n : correct) {
        report.metrics.proposals += nodes_[n]->proposals();
        report.metrics.abstentions += nodes_[n]->abstentions();
        report.metrics.empty_blocks += nodes_[n]->empty_blocks();
        report.metrics.equivocations_detected += nodes_[n]->equivocations_seen();
        report.metrics.compaction_entries =
            std::max(report.metrics.compaction_entries, nodes_[n]->compaction_entries());
        report.metrics.compaction_notarized = std::max(
            report.metrics.compaction_notarized, nodes_[n]->compaction_notarized());
        double m = nodes_[n]->notarization_latency_mean_ms();
        if (m > 0) {
            latency_sum += m;
            ++latency_cnt;
        }
    }
    if (latency_cnt) report.metrics.notarization_latency_mean_ms = latency_sum / latency_cnt;
    if (transcript_) report.transcript = transcript_store_;
}

RunReport Engine::replay(const std::vector<std::string>& transcript_lines) {
    replay_ = true;
    for (const auto& line : transcript_lines) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) cols.push_back(field);
        if (cols.size() < 2) continue;
        now_ = std::stoll(cols[1]);
        if (cols[0] == "D" && cols.size() == 4) {
            NodeId to = std::stoull(cols[2]);
            Bytes bytes;
            const std::string& hex = cols[3];
            bytes.reserve(hex.size() / 2);
            auto nibble = [](char c) -> std::uint8_t {
                return c <= '9' ? (std::uint8_t)(c - '0') : (std::uint8_t)(c - 'a' + 10);
            };
            for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
                bytes.push_back((std::uint8_t)(nibble(hex[i]) << 4 | nibble(hex[i + 1])));
            }
            auto msg = decode_sim_message(bytes);
            if (msg) {
                ++metrics_.deliveries;
                nodes_[to]->on_message(now_, *msg);
            }
        } else if (cols[0] == "T" && cols.size() == 7) {
            nodes_[std::stoull(cols[2])]->on_tick(
                now_, (std::uint32_t)std::stoul(cols[3]), std::stoull(cols[4]),
                std::stoull(cols[5]), std::stoi(cols[6]));
        } else if (cols[0] == "H" && cols.size() == 5) {
            nodes_[std::stoull(cols[2])]->on_height_start(
                now_, (std::uint32_t)std::stoul(cols[3]), std::stoull(cols[4]));
        }
    }
    RunReport report;
    report.scenario = sc_;
    report.end_time = now_;
    finalize(report);
    return report;
}

// -- adversary ----------------------------------------------------------------

Adversary::Adversary(Engine& eng) : eng_(eng) {}

void Adversary::on_height_start(std::int64_t first_start, std::uint32_t chain,
                                std::uint64_t height, const std::vector<NodeId>& committee,
                                const Digest& crs) {
    const Scenario& sc = eng_.scenario();
    if (sc.adversary.byzantine.empty() || sc.adversary.behavior == AdvBehavior::Silent) {
        return;
    }
    std::vector<NodeId> byz_members, correct_members;
    for (NodeId n : committee) {
        if (eng_.is_byzantine(n, first_start)) {
            byz_members.push_back(n);
        } else {
            correct_members.push_back(n);
        }
    }
    if (byz_members.empty()) return;

    // a correct starter always holds the parent and its notarization
    NodeId witness = 0;
    for (NodeId n = 0; n < sc.nodes; ++n) {
        if (!eng_.is_byzantine(n, first_start)) {
            witness = n;
            break;
        }
    }
    const Node& w = eng_.peek_node(witness);
    const Block* parent = nullptr;
    ThresholdSignature parent_sig;
    if (height > 0) {
        auto p = w.committed_block(chain, height - 1);
        const auto* sig = w.notarization_of(chain, height - 1);
        if (!p || sig == nullptr) return;  // nothing valid to build on
        parent = p.get();
        parent_sig = *sig;
    }

    const std::int64_t lambda = sc.lambda;
    auto round_step2 = [&](std::uint64_t k) {
        return first_start + 2 * lambda + (std::int64_t)k * 3 * lambda;
    };

    switch (sc.adversary.behavior) {
        case AdvBehavior::Silent: return;
        case AdvBehavior::EquivocateInit: {
            for (NodeId b : byz_members) {
                equivocate_split(round_step2(0) - 1, chain, height, b, correct_members,
                                 parent ? *parent : Block{}, parent_sig);
            }
            return;
        }
        case AdvBehavior::DelayRelease: {
            // one init per Byzantine node, straddling successive step-2
            // boundaries: half the correct nodes see it in time, half late
            std::uint64_t k = 0;
            for (NodeId b : byz_members) {
                Block blk = adversary_block(b, chain, height, parent, parent_sig,
                                            round_step2(k) - 1, 0);
                auto status = compute_status(0, chain, height);
                BaMessage init;
                init.kind = BaMsgKind::Init;
                init.chain = chain;
                init.height = height;
                init.value = BaValue::value(blk.hash);
                init.sender = b;
                init.sigma_tag = eng_.keychain().sign(b, status).tag;
                std::size_t half = (correct_members.size() + 1) / 2;
                for (std::size_t i = 0; i < correct_members.size(); ++i) {
                    std::int64_t at = i < half ? round_step2(k) - 1
                                               : round_step2(k) + lambda + 1;
                    eng_.send_direct(b, correct_members[i], at, MsgBa{init});
                }
                for (NodeId n : correct_members) {
                    eng_.send_direct(b, n, round_step2(k) - 1, MsgBlock{blk});
                }
                ++k;
            }
            return;
        }
        case AdvBehavior::LeaderHog: {
            // only Byzantine nodes whose VRF distance beats every correct
            // member can interfere; stagger them across rounds
            auto status = compute_status(0, chain, height);
            U256 best_correct = U256::max_value();
            for (NodeId n : correct_members) {
                U256 d = vrf_distance(crs, eng_.keychain().sign(n, status));
                if (d < best_correct) best_correct = d;
            }
            std::vector<std::pair<U256, NodeId>> winners;
            for (NodeId b : byz_members) {
                U256 d = vrf_distance(crs, eng_.keychain().sign(b, status));
                if (d < best_correct) winners.emplace_back(d, b);
            }
            std::sort(winners.begin(), winners.end());
            for (std::size_t k = 0; k < winners.size(); ++k) {
                equivocate_split(round_step2(k) - 1, chain, height, winners[k].second,
                                 correct_members, parent ? *parent : Block{}, parent_sig);
            }
            return;
        }
    }
}

Block Adversary::adversary_block(NodeId byz, std::uint32_t chain, std::uint64_t height,
                                 const Block* parent, const ThresholdSignature& parent_sig,
                                 std::int64_t ts, std::uint32_t variant) {
    Block b;
    b.chain_id = chain;
    b.height = height;
    b.proposer_id = byz;
    if (parent) {
        b.parent_hash = parent->hash;
        b.parent_notarization = parent_sig;
        b.block_timestamp = std::max(parent->block_timestamp + 1, ts);
    } else {
        b.block_timestamp = ts;
    }
    Enc e;
    e.raw("lat.byz.payload");
    e.u64(byz);
    e.u64(height);
    e.u32(variant);
    b.payload.push_back(sha256(e.bytes()));
    b.finalize_hash();
    return b;
}

void Adversary::equivocate_split(std::int64_t at, std::uint32_t chain,
                                 std::uint64_t height, NodeId byz,
                                 const std::vector<NodeId>& correct_members,
                                 const Block& parent, const ThresholdSignature& parent_sig) {
    const Block* p = height > 0 ? &parent : nullptr;
    Block v1 = adversary_block(byz, chain, height, p, parent_sig, at, 1);
    Block v2 = adversary_block(byz, chain, height, p, parent_sig, at, 2);
    auto status = compute_status(0, chain, height);
    Digest sigma = eng_.keychain().sign(byz, status).tag;

    auto init_of = [&](const Block& blk) {
        BaMessage m;
        m.kind = BaMsgKind::Init;
        m.chain = chain;
        m.height = height;
        m.value = BaValue::value(blk.hash);
        m.sender = byz;
        m.sigma_tag = sigma;
        return m;
    };
    std::size_t half = (correct_members.size() + 1) / 2;
    for (std::size_t i = 0; i < correct_members.size(); ++i) {
        const BaMessage init = init_of(i < half ? v1 : v2);
        eng_.send_direct(byz, correct_members[i], at, MsgBa{init});
    }
    // both bodies go everywhere so a decided hash can always be fetched
    for (NodeId n : correct_members) {
        eng_.send_direct(byz, n, at, MsgBlock{v1});
        eng_.send_direct(byz, n, at, MsgBlock{v2});
    }
}

}  // namespace latsim
