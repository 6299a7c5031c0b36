#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "modric/addressing.hpp"
#include "modric/topology.hpp"

namespace modric {

struct NoRoute : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AddressingIncomplete : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic 64-bit mix used for every ECMP decision.
uint64_t stable_mix(uint64_t a, uint64_t b);
uint64_t flow_hash(uint32_t src_addr, uint32_t dst_addr, uint64_t flow_id);

enum class Scheme : uint8_t { Modric, EcmpOnly, Spr };
const char* to_string(Scheme s);

struct RoutedPath {
    Scheme scheme = Scheme::Modric;
    std::vector<int32_t> nodes;  // src host .. dst host
    std::vector<int32_t> links;  // nodes.size()-1 entries
    int hops() const { return static_cast<int>(links.size()); }
    bool loop_free() const;
};

struct FailureSet {
    std::set<int32_t> dead_nodes;
    std::set<int32_t> dead_links;
    bool empty() const { return dead_nodes.empty() && dead_links.empty(); }
    bool node_dead(int32_t v) const { return dead_nodes.count(v) != 0; }
    bool link_dead(int32_t l) const { return dead_links.count(l) != 0; }
};

// Compiled wildcard rules for the Modric scheme. Matches are destination
// address fields; actions resolve to concrete out-links per destination.
struct ForwardingTables {
    enum class Action : uint8_t {
        DeliverHost,  // AS: S2 link to dst.host
        UplinkEcmp,   // AS: hash over the 4 EPSC uplinks
        DeliverAs,    // EPS: toward dst AS, direct or one intra-EPSC hop
        RowDirect,    // EPS: toward container (my row, dst.col)
        ColDirect,    // EPS: toward container (dst.row, my col)
        Diagonal      // EPS: ECMP over {row-first, col-first}
    };
    struct Rule {
        int row = -1;  // -1 matches any value
        int col = -1;
        int as_rank = -1;
        Action action = Action::Diagonal;
        bool matches(const AddrFields& f) const {
            return (row < 0 || row == f.row) && (col < 0 || col == f.col) &&
                   (as_rank < 0 || as_rank == f.as_rank);
        }
    };
    struct EpsEntry {
        std::vector<Rule> rules;
        // out-links toward a same-row/column container: direct links from
        // this EPS when its layer carries one, else intra-EPSC links toward
        // the layers that do
        std::map<std::pair<int, int>, std::vector<int32_t>> toward_container;
        std::map<int, std::vector<int32_t>> toward_as;  // as rank -> out-links
    };
    struct AsEntry {
        std::vector<Rule> rules;
        std::vector<int32_t> uplinks;           // 4 EPSC uplinks, rank order
        std::map<int, int32_t> host_links;      // local host index -> S2 link
    };

    BitPlan plan;
    std::map<int32_t, EpsEntry> eps;      // node id -> entry
    std::map<int32_t, AsEntry> as;
    std::vector<uint32_t> host_addr;      // node id -> LocAddr (hosts only)
    std::vector<AddrFields> host_fields;  // node id -> decoded fields

    uint32_t addr_of(int32_t host) const { return host_addr[host]; }
};

ForwardingTables compile_tables(const Topology& topo, const BitPlan& plan);

// Table-driven walk. ECMP choice is a stable hash of (src addr, dst addr,
// flow id); loop-free and at most 9 hops on a MODRIC build.
RoutedPath route(const Topology& topo, const ForwardingTables& tables, int32_t src_host,
                 int32_t dst_host, uint64_t flow_id);

// Same walk avoiding dead elements: dead uplinks fall back to surviving
// uplinks, dead inter-container layers detour via another one-hop EPSC.
// Throws NoRoute only when src and dst are physically disconnected.
RoutedPath reroute(const Topology& topo, const ForwardingTables& tables,
                   const FailureSet& failures, int32_t src_host, int32_t dst_host,
                   uint64_t flow_id);

// Structure-free baselines over any topology. EcmpOnly hashes on the
// (source attachment switch, destination attachment switch) pair; SPR takes
// the lexicographically smallest shortest path.
class BaselineRouter {
public:
    BaselineRouter(const Topology& topo, FailureSet failures = {});
    RoutedPath route(Scheme scheme, int32_t src_host, int32_t dst_host, uint64_t flow_id) const;

private:
    const Topology& topo_;
    FailureSet failures_;
    mutable std::map<int32_t, std::vector<int>> dist_memo_;  // dst -> dist[]
    const std::vector<int>& dist_to(int32_t dst) const;
};

RoutedPath baseline_route(const Topology& topo, Scheme scheme, int32_t src_host,
                          int32_t dst_host, uint64_t flow_id, const FailureSet& failures = {});

}  // namespace modric
