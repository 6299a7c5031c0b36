#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modric/topology.hpp"

namespace modric {

Topology build_modric(const ModricConfig& cfg);
Topology build_fattree(const FatTreeParams& p);
Topology build_mdcube(const MdcubeParams& p);
Topology build_jellyfish(const JellyfishParams& p);

// Canonical enumeration order of the inter-container adjacencies of a
// container: same-row partners by ascending column, then same-column
// partners by ascending row. The t-th adjacency terminates on EPS layer
// t mod q at this container's side.
std::vector<std::pair<int, int>> modric_adjacency_order(const ModricConfig& cfg, int row, int col);
int modric_link_layer(const ModricConfig& cfg, int row, int col, int to_row, int to_col);

struct ExpandAction {
    enum Kind { AddRow, AddColumn, AddAs, AddEpsLayer, AddHosts } kind = AddRow;
    int container_row = 0;  // AddAs
    int container_col = 0;
    NodeRef as_ref;   // AddHosts target
    int count = 0;    // AddHosts
};

// Grows a MODRIC topology. Row/column/EPS-layer growth rebuilds the
// incremented configuration (coordinate-based node ids are preserved);
// AddAs/AddHosts patch the graph in place.
Topology expand(const Topology& topo, const ExpandAction& action);

struct ValidationReport {
    struct Check {
        std::string name;
        bool passed = true;
        std::vector<std::string> offenders;
        std::string detail;
    };
    std::vector<Check> checks;
    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
    std::string to_string() const;
};

// Checks every structural invariant of a MODRIC topology; failures are
// report content, never exceptions.
ValidationReport validate(const Topology& topo);

// Structural isomorphism via canonical labeling (degree/kind refinement +
// backtracking). Intended for desk-scale graphs.
bool isomorphic(const Topology& a, const Topology& b);

}  // namespace modric
