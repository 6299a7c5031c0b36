#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace modric {

// Errors surfaced by builders/validators. Message carries the failed
// constraint and the offending values.
struct ConstraintViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidRadix : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Unsupported : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibleDegree : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Disconnected : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotModric : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class NodeKind : uint8_t { Host, AccessSwitch, Eps };
enum class LinkClass : uint8_t { S1, S2 };

const char* to_string(NodeKind k);
const char* to_string(LinkClass c);

// Structured node identity. MODRIC: EPS rank 0..3 + layer 0..q-1, AS ranks
// 4..4+x-1, hosts rank = container-wide host index. Other generators reuse
// the fields with their own coordinates (fat-tree: col = pod, layer = tier;
// MDCube: layer = BCube level; jellyfish: col = switch index).
struct NodeRef {
    NodeKind kind = NodeKind::Host;
    int32_t row = 0;
    int32_t col = 0;
    int32_t rank = 0;
    int32_t layer = 0;

    friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
    std::string str() const;  // "eps:0:1:2:0", "as:0:1:4", "host:0:1:7"
};

struct Link {
    int32_t a = -1;
    int32_t b = -1;
    LinkClass cls = LinkClass::S1;
    double capacity_gbps = 0.0;
};

struct ModricGeometry {
    double length_m = 6.1;   // container length L
    double width_m = 2.44;   // container width W
    double gap_row_m = 1.0;  // dL, spacing along a row
    double gap_col_m = 1.0;  // dW, spacing along a column
};

enum class ExtraLinkPolicy : uint8_t { None, RowsFirst };

struct ModricConfig {
    int m = 1;  // rows of containers
    int n = 1;  // columns of containers
    int q = 1;  // EPSes per EPSC
    int x = 1;  // ASes per container
    int y = 1;  // hosts per AS
    double cap_s1_gbps = 10.0;  // C
    double cap_s2_gbps = 1.0;   // c
    int eps_port_budget = 0;    // S1 ports per EPS, 0 = unbounded
    ExtraLinkPolicy extra_links = ExtraLinkPolicy::RowsFirst;
    ModricGeometry geometry;

    int containers() const { return m * n; }
    int hosts() const { return m * n * x * y; }
    int nodes() const { return m * n * (x * y + x + 4 * q); }
    // Throws ConstraintViolation naming the violated invariant.
    void validate() const;
};

struct FatTreeParams {
    int radix = 4;  // even, >= 4
    double cap_host_gbps = 1.0;    // GbE everywhere in the cost model
    double cap_switch_gbps = 1.0;
};

struct MdcubeParams {
    int m = 1;
    int n = 1;
    int r = 4;  // switch radix inside BCube
    int k = 1;  // BCube level count - 1; only k=1 is built
    int z = 4;  // 10GbE uplinks per switch (port accounting)
    double cap_s1_gbps = 10.0;
    double cap_s2_gbps = 1.0;
};

struct JellyfishParams {
    int switches = 2;
    int ports_per_switch = 3;
    int hosts_per_switch = 2;
    uint64_t seed = 1;
    double cap_s1_gbps = 10.0;
    double cap_s2_gbps = 1.0;
    int max_retries = 64;
};

using GeneratorParams =
    std::variant<std::monostate, ModricConfig, FatTreeParams, MdcubeParams, JellyfishParams>;

// Immutable capacity-annotated multigraph. Construct through a builder;
// safe to share across threads once built.
class Topology {
public:
    struct Incidence {
        int32_t link = -1;
        int32_t peer = -1;
    };

    Topology() = default;
    Topology(std::string generator, GeneratorParams params, std::vector<NodeRef> nodes,
             std::vector<Link> links);

    const std::string& generator() const { return generator_; }
    const GeneratorParams& params() const { return params_; }
    const std::vector<NodeRef>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }
    const std::vector<Incidence>& neighbors(int32_t node) const { return adj_[node]; }
    const NodeRef& node(int32_t id) const { return nodes_[id]; }
    const Link& link(int32_t id) const { return links_[id]; }
    int32_t node_count() const { return static_cast<int32_t>(nodes_.size()); }
    int32_t link_count() const { return static_cast<int32_t>(links_.size()); }

    // -1 if absent.
    int32_t find(const NodeRef& ref) const;
    int32_t require(const NodeRef& ref) const;

    std::vector<int32_t> nodes_of_kind(NodeKind k) const;
    std::vector<int32_t> hosts() const { return nodes_of_kind(NodeKind::Host); }
    std::vector<int32_t> switches() const;  // all non-host nodes, ascending id

    const ModricConfig* modric_config() const;

    bool connected() const;
    // FNV-1a over the canonical edge list; stable across runs.
    uint64_t structure_hash() const;

    // Edge list: "node_a node_b class capacity_gbps", one link per line.
    std::string to_edge_list() const;
    // Graphviz description for visualization tools.
    std::string to_dot() const;

private:
    std::string generator_;
    GeneratorParams params_;
    std::vector<NodeRef> nodes_;
    std::vector<Link> links_;
    std::vector<std::vector<Incidence>> adj_;
    std::vector<std::pair<NodeRef, int32_t>> index_;  // sorted by NodeRef
};

// Formats a double with the shortest round-trip decimal form ("10", "0.4").
std::string format_gbps(double v);

}  // namespace modric
