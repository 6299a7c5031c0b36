#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "modric/routing.hpp"
#include "modric/topology.hpp"

namespace modric {

struct InfeasiblePattern : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FlowDemand {
    int32_t src = -1;
    int32_t dst = -1;
    double demand_mbps = 100.0;
    uint64_t flow_id = 0;
};

struct FlowResult {
    uint64_t flow_id = 0;
    RoutedPath path;      // empty when unroutable
    bool routed = false;
    double rate_mbps = 0.0;
};

// Progressive-filling max-min fair allocation over directed link capacities
// (full-duplex links), capped at per-flow demand. Paths must be loop-free.
std::vector<FlowResult> allocate_maxmin(const Topology& topo,
                                        const std::vector<FlowDemand>& demands,
                                        const std::vector<RoutedPath>& paths,
                                        const std::vector<bool>& routed);

// Hosts grouped into "containers": by (row, col) for grid topologies and
// fat-tree pods, consecutive blocks for jellyfish.
std::vector<std::vector<int32_t>> host_groups(const Topology& topo, int fallback_size = 16);

struct TrafficPattern {
    enum Kind { RandomPeers, Permutation, C2COneToOne, C2CAllToAll } kind = Permutation;
    int peers = 0;               // RandomPeers: N
    bool exclude_log_host = false;  // one host per group sits out as log server
    int group_a = 0;             // C2C source group index
    int group_b = 1;             // C2C destination group index
    double demand_mbps = 100.0;
};

std::vector<FlowDemand> gen_traffic(const TrafficPattern& pattern, const Topology& topo,
                                    uint64_t seed);

// floor(fraction * switch_count) uniformly random dead switches; hosts never
// fail. Nested across fractions for a fixed seed.
FailureSet inject_failures(const Topology& topo, double fraction, uint64_t seed);

struct ExperimentSpec {
    int experiment = 1;  // 1..6
    int repetitions = 20;
    uint64_t seed = 1;
    std::vector<int> peer_counts = {2, 4, 6, 8, 10};
    std::vector<double> failure_fractions = {0.0, 0.05, 0.10, 0.15, 0.20};
};

struct ResultRow {
    int experiment = 0;
    std::string topology;
    std::string scheme;
    std::string param;
    int repetition = 0;
    double mean_per_server_mbps = 0.0;
};

struct ExperimentOutput {
    std::vector<ResultRow> rows;
    std::map<std::string, std::string> metadata;  // link speeds, topology hashes, ...
};

ExperimentOutput run_experiment(const ExperimentSpec& spec);

// Routes + allocates one traffic set; convenience for tests and the runner.
double mean_per_server_throughput(const Topology& topo, Scheme scheme,
                                  const std::vector<FlowDemand>& demands,
                                  const FailureSet& failures = {});

std::string results_to_csv(const std::vector<ResultRow>& rows);
std::string results_to_json(const ExperimentOutput& out, const ExperimentSpec& spec);

// Seed-averaged means keyed by (topology, scheme, param), ordered by first
// appearance; used by the trend checks.
std::vector<std::pair<std::string, double>> aggregate_means(const std::vector<ResultRow>& rows);

}  // namespace modric
