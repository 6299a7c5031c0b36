#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modric/topology.hpp"

namespace modric {

struct TooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingGeometry : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Max over host pairs of shortest-path hop count. Computed by BFS over the
// switch graph between host-attachment switches, plus the two host hops.
int host_diameter(const Topology& topo);

// Node-disjoint shortest paths, computed by node-splitting unit-capacity
// max-flow over the shortest-path DAG of the canonical switch graph (the q
// EPSes of an EPSC contracted into one node, as in the container's
// modular-switch view).
int vertex_disjoint_paths(const Topology& topo, const NodeRef& as_a, const NodeRef& as_b);
int vertex_disjoint_paths(const Topology& topo, std::pair<int, int> container_a,
                          std::pair<int, int> container_b);

struct CutResult {
    double capacity_gbps = 0.0;
    std::vector<std::string> partition_a;
    std::vector<std::string> partition_b;
    std::vector<std::string> cut_links;
};

// Min cut over balanced bipartitions of the canonical container (4 EPSC
// nodes with q-fold collapsed links, x ASes; hosts follow their AS).
// Balance holds per node class: EPSCs 2-2, ASes floor/ceil of x/2.
CutResult container_bisection_brute(int x, int q, double cap_s1_gbps);
double container_bisection_formula(int x, int q, double cap_s1_gbps);  // (2x+4q)*C

struct NetworkBisection {
    std::string case_label;
    double bisection_gbps = 0.0;  // min over the structured cuts below
    std::optional<double> horizontal_gbps;  // n*m^2*C (+ split-container term when m,n odd)
    std::optional<double> vertical_gbps;    // m*n^2*C
    double row_bisection_gbps = 0.0;
    double col_bisection_gbps = 0.0;
};

// Evaluates the structured bisection case analysis for an m x n grid.
NetworkBisection network_bisection_structured(const ModricConfig& cfg);

// Exhaustive min cut over balanced bipartitions of whole containers on the
// container-level multigraph (4 parallel links per same-row/column pair plus
// any extra-link plan). Cross-check oracle for even container counts.
double container_level_min_bisection(const ModricConfig& cfg);

struct PortCensus {
    long long s1_ports = 0;
    long long s2_ports = 0;
    long long hosts = 0;
    friend bool operator==(const PortCensus&, const PortCensus&) = default;
};

// Closed-form port counts. For MODRIC the maxima of Properties 4/5 use the
// fully populated x = m+n-2, y = 4C/c.
PortCensus modric_port_census_formula(const ModricConfig& cfg);
PortCensus modric_port_census_max(int m, int n, int q, double C, double c);
PortCensus mdcube_port_census_formula(const MdcubeParams& p);
PortCensus fattree_port_census_formula(int radix);
// Direct count on a built graph (S1/S2 switch-side ports).
PortCensus port_census_from_graph(const Topology& topo);

enum class CableMode { Formula, PerLink };

// Total inter-container fiber length in meters.
double cable_length(const ModricConfig& cfg, CableMode mode);
double cable_length_per_link(const Topology& topo, const ModricGeometry& g);

}  // namespace modric
