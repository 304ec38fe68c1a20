// Copyright 2026 the latticesim contributors. Licensed under the Apache
// License, Version 2.0. See http://www.apache.org/licenses/LICENSE-2.0

#include "latsim/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace latsim {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
}

std::string verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

void RunReport::write(const std::string& dir) const {
    fs::create_directories(dir);
    fs::path base(dir);

    write_file(base / "scenario.json", scenario.to_json_text());

    {
        std::ostringstream v;
        v << "agreement=" << verdict(agreement_ok) << '\n'
          << "liveness=" << verdict(liveness_ok) << '\n'
          << "chain_integrity=" << verdict(integrity_ok) << '\n'
          << "ordering_agreement=" << verdict(ordering_agreement_ok) << '\n'
          << "timestamp_agreement=" << verdict(timestamps_ok) << '\n'
          << "tx_uniqueness=" << verdict(tx_unique_ok) << '\n'
          << "notarization_coverage=" << verdict(notarization_coverage_ok) << '\n'
          << "boundary_monotonicity=" << verdict(boundary_monotone_ok) << '\n';
        write_file(base / "verdicts.txt", v.str());
    }

    {
        std::ostringstream s;
        s << "scenario: " << scenario.name << " (seed " << scenario.seed << ")\n"
          << "nodes=" << scenario.nodes << " chains=" << scenario.chains
          << " lambda_ms=" << (double)scenario.lambda / 1e6 << '\n'
          << "simulated_end_ms=" << (double)end_time / 1e6 << '\n'
          << "status: " << (all_ok() ? "OK" : "INVARIANT VIOLATIONS") << '\n';
        for (const auto& v : violations) s << "violation: " << v << '\n';
        write_file(base / "summary.txt", s.str());
    }

    {
        std::ostringstream s;
        s << "chain,height,first_start_ns,last_decide_ns,latency_max_ns,decide_round_max,"
             "max_round_entered,rounds_after_heal_max\n";
        for (const auto& h : heights) {
            s << h.chain << ',' << h.height << ',' << h.first_start << ',' << h.last_decide
              << ',' << h.latency_max << ',' << h.decide_round_max << ','
              << h.max_round_entered << ',' << h.rounds_after_heal_max << '\n';
        }
        write_file(base / "ba_stats.csv", s.str());
    }

    {
        std::ostringstream s;
        s << "proposals,abstentions,empty_blocks,equivocations_detected,messages_gossiped,"
             "deliveries,compaction_entries,compaction_notarized,txs_injected,txs_packed,"
             "tx_duplicates,notarization_latency_mean_ms\n";
        s << metrics.proposals << ',' << metrics.abstentions << ',' << metrics.empty_blocks
          << ',' << metrics.equivocations_detected << ',' << metrics.messages_gossiped
          << ',' << metrics.deliveries << ',' << metrics.compaction_entries << ','
          << metrics.compaction_notarized << ',' << metrics.txs_injected << ','
          << metrics.txs_packed << ',' << metrics.tx_duplicates << ','
          << metrics.notarization_latency_mean_ms << '\n';
        write_file(base / "metrics.csv", s.str());
    }

    for (std::size_t n = 0; n < node_batch_lines.size(); ++n) {
        std::ostringstream s;
        for (const auto& line : node_batch_lines[n]) s << line << '\n';
        write_file(base / ("node_" + std::to_string(n) + "_batches.log"), s.str());
    }
    for (std::size_t n = 0; n < node_timestamps.size(); ++n) {
        std::ostringstream s;
        s << "index,chain,height,block_hash,block_timestamp,consensus_timestamp\n";
        for (const auto& r : node_timestamps[n]) {
            s << r.index << ',' << r.chain << ',' << r.height << ',' << r.block_hash.hex()
              << ',' << r.block_timestamp << ',' << r.consensus_timestamp << '\n';
        }
        write_file(base / ("node_" + std::to_string(n) + "_timestamps.csv"), s.str());
    }

    if (!transcript.empty()) {
        std::ostringstream s;
        for (const auto& line : transcript) s << line << '\n';
        write_file(base / "transcript.log", s.str());
    }
}

namespace {

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

}  // namespace

std::string compare_report_dirs(const std::vector<std::string>& dirs) {
    if (dirs.size() < 2) return "need at least two report directories";
    // collect the per-node files present in the first directory
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
        std::string name = entry.path().filename().string();
        if (name.rfind("node_", 0) == 0 &&
            (name.find("_batches.log") != std::string::npos ||
             name.find("_timestamps.csv") != std::string::npos)) {
            names.push_back(name);
        }
    }
    std::sort(names.begin(), names.end());
    if (names.empty()) return "no batch logs found in " + dirs[0];

    // all logs must agree across nodes within a directory and across dirs
    std::vector<std::vector<std::string>> reference;
    for (const auto& name : names) reference.push_back(read_lines(fs::path(dirs[0]) / name));
    for (std::size_t i = 1; i < reference.size(); ++i) {
        // compare same-kind files to the first of that kind
        bool is_batch = names[i].find("_batches.log") != std::string::npos;
        std::size_t base = 0;
        while (base < names.size() &&
               (names[base].find("_batches.log") != std::string::npos) != is_batch) {
            ++base;
        }
        if (base == i) continue;
        if (reference[i] != reference[base]) {
            std::size_t k = 0;
            while (k < std::min(reference[i].size(), reference[base].size()) &&
                   reference[i][k] == reference[base][k]) {
                ++k;
            }
            return dirs[0] + "/" + names[i] + " diverges from " + names[base] +
                   " at line " + std::to_string(k + 1);
        }
    }
    for (std::size_t d = 1; d < dirs.size(); ++d) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            auto lines = read_lines(fs::path(dirs[d]) / names[i]);
            if (lines != reference[i]) {
                std::size_t k = 0;
                while (k < std::min(lines.size(), reference[i].size()) &&
                       lines[k] == reference[i][k]) {
                    ++k;
                }
                return dirs[d] + "/" + names[i] + " diverges from " + dirs[0] +
                       " at line " + std::to_string(k + 1);
            }
        }
    }
    return "";
}

}  // namespace latsim
