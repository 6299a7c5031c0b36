#include "modric/topology.hpp"

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <queue>
#include <sstream>

namespace modric {

const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Host: return "host";
        case NodeKind::AccessSwitch: return "as";
        case NodeKind::Eps: return "eps";
    }
    return "?";
}

const char* to_string(LinkClass c) {
    return c == LinkClass::S1 ? "S1" : "S2";
}

std::string NodeRef::str() const {
    std::string s = to_string(kind);
    s += ':' + std::to_string(row) + ':' + std::to_string(col) + ':' + std::to_string(rank);
    if (kind == NodeKind::Eps) s += ':' + std::to_string(layer);
    return s;
}

std::string format_gbps(double v) {
    if (v == static_cast<double>(static_cast<long long>(v)) && std::abs(v) < 1e15)
        return std::to_string(static_cast<long long>(v));
    // shortest fixed form that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char t[40];
        std::snprintf(t, sizeof t, "%.*f", prec, v);
        double back = 0.0;
        std::sscanf(t, "%lf", &back);
        if (back == v) return t;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void ModricConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConstraintViolation(msg); };
    if (m < 1 || n < 1) fail("grid dimensions must satisfy m >= 1, n >= 1 (m=" +
                             std::to_string(m) + ", n=" + std::to_string(n) + ")");
    if (q < 1) fail("q >= 1 required, got " + std::to_string(q));
    if (x < 1) fail("x >= 1 required, got " + std::to_string(x));
    if (y < 1) fail("y >= 1 required, got " + std::to_string(y));
    if (cap_s1_gbps <= 0 || cap_s2_gbps <= 0) fail("link capacities must be positive");
    // y*c <= 4*C: AS downlink aggregate within its uplink aggregate.
    if (static_cast<double>(y) * cap_s2_gbps > 4.0 * cap_s1_gbps + 1e-9)
        fail("y <= 4C/c violated: y=" + std::to_string(y) + " c=" + format_gbps(cap_s2_gbps) +
             " C=" + format_gbps(cap_s1_gbps));
    // x <= inter-container links per EPSC, unless an extra-link plan covers the
    // deficit. A single container has no inter-container traffic to protect.
    if (containers() > 1 && x > m + n - 2 && extra_links == ExtraLinkPolicy::None)
        fail("x=" + std::to_string(x) + " exceeds m+n-2=" + std::to_string(m + n - 2) +
             " inter-container links per EPSC and no extra-link plan is enabled");
    if (eps_port_budget > 0) {
        // Heaviest EPS: mesh (q-1)+3, plus AS attachments on its layer, plus
        // inter-container links round-robined over q layers.
        int as_on_layer = (x + q - 1) / q;
        int inter_per_epsc = std::max(m + n - 2, containers() > 1 ? x : 0);
        int inter_on_layer = (inter_per_epsc + q - 1) / q;
        int degree = (q - 1) + 3 + as_on_layer + inter_on_layer;
        if (degree > eps_port_budget)
            fail("EPS port budget " + std::to_string(eps_port_budget) +
                 " exceeded: worst-case EPS degree " + std::to_string(degree));
    }
}

Topology::Topology(std::string generator, GeneratorParams params, std::vector<NodeRef> nodes,
                   std::vector<Link> links)
    : generator_(std::move(generator)),
      params_(std::move(params)),
      nodes_(std::move(nodes)),
      links_(std::move(links)) {
    adj_.resize(nodes_.size());
    for (int32_t i = 0; i < static_cast<int32_t>(links_.size()); ++i) {
        const Link& l = links_[i];
        if (l.a == l.b) throw ConstraintViolation("self-loop on " + nodes_[l.a].str());
        adj_[l.a].push_back({i, l.b});
        adj_[l.b].push_back({i, l.a});
    }
    index_.reserve(nodes_.size());
    for (int32_t i = 0; i < static_cast<int32_t>(nodes_.size()); ++i)
        index_.emplace_back(nodes_[i], i);
    std::sort(index_.begin(), index_.end());
}

int32_t Topology::find(const NodeRef& ref) const {
    auto it = std::lower_bound(index_.begin(), index_.end(), ref,
                               [](const auto& p, const NodeRef& r) { return p.first < r; });
    if (it != index_.end() && it->first == ref) return it->second;
    return -1;
}

int32_t Topology::require(const NodeRef& ref) const {
    int32_t id = find(ref);
    if (id < 0) throw ConstraintViolation("no such node: " + ref.str());
    return id;
}

std::vector<int32_t> Topology::nodes_of_kind(NodeKind k) const {
    std::vector<int32_t> out;
    for (int32_t i = 0; i < node_count(); ++i)
        if (nodes_[i].kind == k) out.push_back(i);
    return out;
}

std::vector<int32_t> Topology::switches() const {
    std::vector<int32_t> out;
    for (int32_t i = 0; i < node_count(); ++i)
        if (nodes_[i].kind != NodeKind::Host) out.push_back(i);
    return out;
}

const ModricConfig* Topology::modric_config() const {
    return std::get_if<ModricConfig>(&params_);
}

bool Topology::connected() const {
    if (nodes_.empty()) return true;
    std::vector<char> seen(nodes_.size(), 0);
    std::queue<int32_t> q;
    q.push(0);
    seen[0] = 1;
    size_t count = 1;
    while (!q.empty()) {
        int32_t u = q.front();
        q.pop();
        for (const auto& inc : adj_[u]) {
            if (!seen[inc.peer]) {
                seen[inc.peer] = 1;
                ++count;
                q.push(inc.peer);
            }
        }
    }
    return count == nodes_.size();
}

uint64_t Topology::structure_hash() const {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    for (const Link& l : links_) {
        std::string a = nodes_[l.a].str(), b = nodes_[l.b].str();
        if (b < a) std::swap(a, b);
        mix(a);
        mix("|");
        mix(b);
        mix("|");
        mix(to_string(l.cls));
        mix(format_gbps(l.capacity_gbps));
        mix("\n");
    }
    return h;
}

std::string Topology::to_edge_list() const {
    std::string out;
    for (const Link& l : links_) {
        out += nodes_[l.a].str();
        out += ' ';
        out += nodes_[l.b].str();
        out += ' ';
        out += to_string(l.cls);
        out += ' ';
        out += format_gbps(l.capacity_gbps);
        out += '\n';
    }
    return out;
}

std::string Topology::to_dot() const {
    std::ostringstream os;
    os << "graph topology {\n";
    for (const NodeRef& nd : nodes_) {
        const char* shape = nd.kind == NodeKind::Host ? "point"
                            : nd.kind == NodeKind::AccessSwitch ? "box" : "ellipse";
        os << "  \"" << nd.str() << "\" [shape=" << shape << "];\n";
    }
    for (const Link& l : links_) {
        os << "  \"" << nodes_[l.a].str() << "\" -- \"" << nodes_[l.b].str() << "\" [label=\""
           << to_string(l.cls) << ' ' << format_gbps(l.capacity_gbps) << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace modric
