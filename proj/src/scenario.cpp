// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0

#include "latsim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace latsim {

using nlohmann::json;

bool Scenario::is_configured_byzantine(NodeId n) const {
    return std::find(adversary.byzantine.begin(), adversary.byzantine.end(), n) !=
           adversary.byzantine.end();
}

void Scenario::validate() const {
    auto fail = [](const std::string& why) { throw ScenarioInvalid(why); };
    if (nodes == 0 || nodes > 64) fail("nodes must be in 1..64");
    if (chains == 0 || chains > 64) fail("chains must be in 1..64");
    if (lambda <= 0) fail("lambda must be positive");
    if (delay_model == DelayModel::Uniform) {
        if (delay_min < 0 || delay_max < delay_min || delay_max > lambda) {
            fail("uniform delays need 0 <= min <= max <= lambda");
        }
    }
    if (delta.den == 0 || delta.num == 0 || delta.num > delta.den) {
        fail("delta must be a fraction in (0,1]");
    }
    if (crs_size() > nodes) fail("crs committee larger than the population");
    if (notary_size() > nodes) fail("notary committee larger than the population");
    if (epoch_length == 0) fail("epoch_length must be positive");
    if (horizon_heights == 0) fail("horizon_heights must be positive");
    if (start_skew < 0 || start_skew > lambda) fail("start_skew must be in [0, lambda]");
    // byzantine counts above t_max stay allowed: failure-mode scenarios
    // deliberately violate the committee bound
    for (NodeId b : adversary.byzantine) {
        if (b >= nodes) fail("byzantine node id out of range");
    }
    for (const auto& w : partitions) {
        if (w.end <= w.start) fail("partition window must have start < end");
        std::set<NodeId> seen;
        for (const auto& g : w.groups) {
            for (NodeId n : g) {
                if (n >= nodes) fail("partition node id out of range");
                if (!seen.insert(n).second) fail("node in two partition groups");
            }
        }
        if (seen.size() != nodes) fail("partition groups must cover all nodes");
    }
    if (config_change) {
        if (config_change->chains < chains) {
            fail("config change cannot delete chains (unsupported)");
        }
        if (config_change->chains > 64) fail("config change chains must be <= 64");
        if (config_change->at_time <= 0) fail("config change time must be positive");
    }
    for (const auto& m : membership) {
        if (m.node_set.empty()) fail("membership change with empty node set");
        for (NodeId n : m.node_set) {
            if (n >= nodes) fail("membership node id out of range");
        }
    }
    // phi bounds are enforced by OrderingParams at construction
}

namespace {

AdvBehavior behavior_from(const std::string& s) {
    if (s == "silent") return AdvBehavior::Silent;
    if (s == "equivocate_init") return AdvBehavior::EquivocateInit;
    if (s == "delay_release") return AdvBehavior::DelayRelease;
    if (s == "leader_hog") return AdvBehavior::LeaderHog;
    throw ScenarioInvalid("unknown adversary behavior: " + s);
}

std::string behavior_name(AdvBehavior b) {
    switch (b) {
        case AdvBehavior::Silent: return "silent";
        case AdvBehavior::EquivocateInit: return "equivocate_init";
        case AdvBehavior::DelayRelease: return "delay_release";
        case AdvBehavior::LeaderHog: return "leader_hog";
    }
    return "silent";
}

}  // namespace

Scenario Scenario::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ScenarioInvalid(std::string("scenario is not valid json: ") + e.what());
    }
    Scenario s;
    try {
        s.name = j.value("name", s.name);
        s.seed = j.value("seed", s.seed);
        s.nodes = j.value("nodes", s.nodes);
        s.chains = j.value("chains", s.chains);
        if (j.contains("lambda_ms")) {
            s.lambda = (std::int64_t)j["lambda_ms"].get<double>() * 1'000'000;
        }
        if (j.contains("lambda_ns")) s.lambda = j["lambda_ns"].get<std::int64_t>();
        if (j.contains("delay")) {
            const auto& d = j["delay"];
            std::string model = d.value("model", "constant");
            if (model == "constant") {
                s.delay_model = DelayModel::Constant;
            } else if (model == "uniform") {
                s.delay_model = DelayModel::Uniform;
                s.delay_min = (std::int64_t)(d.value("min_ms", 0.0) * 1e6);
                s.delay_max = (std::int64_t)(d.value("max_ms", 0.0) * 1e6);
            } else {
                throw ScenarioInvalid("unknown delay model: " + model);
            }
        }
        if (j.contains("delta")) {
            s.delta.num = j["delta"].value("num", 1);
            s.delta.den = j["delta"].value("den", 1);
        }
        s.phi = j.value("phi", 0);
        s.epoch_length = j.value("epoch_length", s.epoch_length);
        s.crs_committee = j.value("crs_committee", 0);
        s.notary_committee = j.value("notary_committee", 0);
        s.horizon_heights = j.value("horizon_heights", s.horizon_heights);
        if (j.contains("max_sim_time_ms")) {
            s.max_sim_time = (std::int64_t)(j["max_sim_time_ms"].get<double>() * 1e6);
        }
        if (j.contains("start_skew_ms")) {
            s.start_skew = (std::int64_t)(j["start_skew_ms"].get<double>() * 1e6);
        }
        if (j.contains("adversary")) {
            const auto& a = j["adversary"];
            s.adversary.byzantine = a.value("byzantine", std::vector<NodeId>{});
            s.adversary.behavior = behavior_from(a.value("behavior", "silent"));
            s.adversary.corrupt_at = (std::int64_t)(a.value("corrupt_at_ms", 0.0) * 1e6);
        }
        if (j.contains("partitions")) {
            for (const auto& p : j["partitions"]) {
                PartitionWindow w;
                w.start = (std::int64_t)(p.value("start_ms", 0.0) * 1e6);
                w.end = (std::int64_t)(p.value("end_ms", 0.0) * 1e6);
                for (const auto& g : p["groups"]) {
                    w.groups.push_back(g.get<std::vector<NodeId>>());
                }
                s.partitions.push_back(std::move(w));
            }
        }
        s.adversarial_reorder = j.value("adversarial_reorder", false);
        s.crs_update_only_on_join = j.value("crs_update_only_on_join", false);
        s.monotone_timestamps_global = j.value("monotone_timestamps", "boundary") ==
                                       std::string("global");
        if (j.contains("config_change")) {
            ConfigChangeSpec c;
            c.at_time = (std::int64_t)(j["config_change"].value("at_ms", 0.0) * 1e6);
            c.chains = j["config_change"].value("chains", s.chains);
            c.phi = j["config_change"].value("phi", 0);
            s.config_change = c;
        }
        if (j.contains("mempool")) {
            s.mempool.tx_count = j["mempool"].value("tx_count", 0);
            s.mempool.inject_every =
                (std::int64_t)(j["mempool"].value("inject_every_ms", 0.0) * 1e6);
        }
        if (j.contains("membership")) {
            for (const auto& m : j["membership"]) {
                MembershipChange mc;
                mc.epoch = m.value("epoch", 0);
                mc.node_set = m.value("nodes", std::vector<NodeId>{});
                s.membership.push_back(std::move(mc));
            }
        }
        s.emit_transcript = j.value("emit_transcript", false);
    } catch (const ScenarioInvalid&) {
        throw;
    } catch (const std::exception& e) {
        throw ScenarioInvalid(std::string("scenario field error: ") + e.what());
    }
    s.validate();
    return s;
}

Scenario Scenario::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioInvalid("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string Scenario::to_json_text() const {
    json j;
    j["name"] = name;
    j["seed"] = seed;
    j["nodes"] = nodes;
    j["chains"] = chains;
    j["lambda_ns"] = lambda;
    j["delay"]["model"] = delay_model == DelayModel::Constant ? "constant" : "uniform";
    if (delay_model == DelayModel::Uniform) {
        j["delay"]["min_ms"] = (double)delay_min / 1e6;
        j["delay"]["max_ms"] = (double)delay_max / 1e6;
    }
    j["delta"]["num"] = delta.num;
    j["delta"]["den"] = delta.den;
    j["phi"] = phi;
    j["epoch_length"] = epoch_length;
    j["crs_committee"] = crs_committee;
    j["notary_committee"] = notary_committee;
    j["horizon_heights"] = horizon_heights;
    j["max_sim_time_ms"] = (double)max_sim_time / 1e6;
    j["start_skew_ms"] = (double)start_skew / 1e6;
    j["adversary"]["byzantine"] = adversary.byzantine;
    j["adversary"]["behavior"] = behavior_name(adversary.behavior);
    j["adversary"]["corrupt_at_ms"] = (double)adversary.corrupt_at / 1e6;
    j["partitions"] = json::array();
    for (const auto& w : partitions) {
        json p;
        p["start_ms"] = (double)w.start / 1e6;
        p["end_ms"] = (double)w.end / 1e6;
        p["groups"] = w.groups;
        j["partitions"].push_back(p);
    }
    j["adversarial_reorder"] = adversarial_reorder;
    j["crs_update_only_on_join"] = crs_update_only_on_join;
    j["monotone_timestamps"] = monotone_timestamps_global ? "global" : "boundary";
    if (config_change) {
        j["config_change"]["at_ms"] = (double)config_change->at_time / 1e6;
        j["config_change"]["chains"] = config_change->chains;
        j["config_change"]["phi"] = config_change->phi;
    }
    j["mempool"]["tx_count"] = mempool.tx_count;
    j["mempool"]["inject_every_ms"] = (double)mempool.inject_every / 1e6;
    j["membership"] = json::array();
    for (const auto& m : membership) {
        json mj;
        mj["epoch"] = m.epoch;
        mj["nodes"] = m.node_set;
        j["membership"].push_back(mj);
    }
    j["emit_transcript"] = emit_transcript;
    return j.dump(2);
}

}  // namespace latsim
