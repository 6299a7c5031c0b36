#include "modric/builders.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <sstream>

namespace modric {

namespace {

NodeRef eps_ref(int i, int j, int r, int l) {
    return {NodeKind::Eps, i, j, r, l};
}
NodeRef as_ref(int i, int j, int rank) {
    return {NodeKind::AccessSwitch, i, j, rank, 0};
}
NodeRef host_ref(int i, int j, int h) {
    return {NodeKind::Host, i, j, h, 0};
}

struct Builder {
    std::vector<NodeRef> nodes;
    std::vector<Link> links;
    std::map<NodeRef, int32_t> ids;

    int32_t add_node(const NodeRef& ref) {
        auto [it, fresh] = ids.emplace(ref, static_cast<int32_t>(nodes.size()));
        if (fresh) nodes.push_back(ref);
        return it->second;
    }
    void link(const NodeRef& a, const NodeRef& b, LinkClass cls, double cap) {
        links.push_back({ids.at(a), ids.at(b), cls, cap});
    }
};

}  // namespace

std::vector<std::pair<int, int>> modric_adjacency_order(const ModricConfig& cfg, int row,
                                                        int col) {
    std::vector<std::pair<int, int>> out;
    for (int j = 0; j < cfg.n; ++j)
        if (j != col) out.emplace_back(row, j);
    for (int i = 0; i < cfg.m; ++i)
        if (i != row) out.emplace_back(i, col);
    return out;
}

int modric_link_layer(const ModricConfig& cfg, int row, int col, int to_row, int to_col) {
    auto order = modric_adjacency_order(cfg, row, col);
    auto it = std::find(order.begin(), order.end(), std::make_pair(to_row, to_col));
    if (it == order.end())
        throw ConstraintViolation("containers not adjacent: (" + std::to_string(row) + "," +
                                  std::to_string(col) + ") -> (" + std::to_string(to_row) + "," +
                                  std::to_string(to_col) + ")");
    return static_cast<int>(it - order.begin()) % cfg.q;
}

Topology build_modric(const ModricConfig& cfg) {
    cfg.validate();
    Builder b;
    const double C = cfg.cap_s1_gbps, c = cfg.cap_s2_gbps;
    for (int i = 0; i < cfg.m; ++i) {
        for (int j = 0; j < cfg.n; ++j) {
            for (int r = 0; r < 4; ++r)
                for (int l = 0; l < cfg.q; ++l) b.add_node(eps_ref(i, j, r, l));
            for (int a = 0; a < cfg.x; ++a) b.add_node(as_ref(i, j, 4 + a));
            for (int h = 0; h < cfg.x * cfg.y; ++h) b.add_node(host_ref(i, j, h));
        }
    }
    for (int i = 0; i < cfg.m; ++i) {
        for (int j = 0; j < cfg.n; ++j) {
            // q EPSes of an EPSC form a full mesh
            for (int r = 0; r < 4; ++r)
                for (int l1 = 0; l1 < cfg.q; ++l1)
                    for (int l2 = l1 + 1; l2 < cfg.q; ++l2)
                        b.link(eps_ref(i, j, r, l1), eps_ref(i, j, r, l2), LinkClass::S1, C);
            // same-layer EPSes across the 4 EPSCs form a full mesh
            for (int l = 0; l < cfg.q; ++l)
                for (int r1 = 0; r1 < 4; ++r1)
                    for (int r2 = r1 + 1; r2 < 4; ++r2)
                        b.link(eps_ref(i, j, r1, l), eps_ref(i, j, r2, l), LinkClass::S1, C);
            // AS rank 4+a attaches to layer a mod q in every EPSC
            for (int a = 0; a < cfg.x; ++a)
                for (int r = 0; r < 4; ++r)
                    b.link(as_ref(i, j, 4 + a), eps_ref(i, j, r, a % cfg.q), LinkClass::S1, C);
            for (int h = 0; h < cfg.x * cfg.y; ++h)
                b.link(host_ref(i, j, h), as_ref(i, j, 4 + h / cfg.y), LinkClass::S2, c);
        }
    }
    // Inter-container links, one per rank between same-row / same-column
    // containers; each side's EPS layer follows its own round-robin order.
    for (int i = 0; i < cfg.m; ++i)
        for (int j1 = 0; j1 < cfg.n; ++j1)
            for (int j2 = j1 + 1; j2 < cfg.n; ++j2) {
                int l1 = modric_link_layer(cfg, i, j1, i, j2);
                int l2 = modric_link_layer(cfg, i, j2, i, j1);
                for (int r = 0; r < 4; ++r)
                    b.link(eps_ref(i, j1, r, l1), eps_ref(i, j2, r, l2), LinkClass::S1, C);
            }
    for (int j = 0; j < cfg.n; ++j)
        for (int i1 = 0; i1 < cfg.m; ++i1)
            for (int i2 = i1 + 1; i2 < cfg.m; ++i2) {
                int l1 = modric_link_layer(cfg, i1, j, i2, j);
                int l2 = modric_link_layer(cfg, i2, j, i1, j);
                for (int r = 0; r < 4; ++r)
                    b.link(eps_ref(i1, j, r, l1), eps_ref(i2, j, r, l2), LinkClass::S1, C);
            }
    // Extra-link plan: when x > m+n-2 every EPSC needs x inter-container
    // links; add along rows first, cycling nearest-neighbour pairs.
    if (cfg.containers() > 1 && cfg.x > cfg.m + cfg.n - 2) {
        std::map<std::tuple<int, int, int>, int> need;
        for (int i = 0; i < cfg.m; ++i)
            for (int j = 0; j < cfg.n; ++j)
                for (int r = 0; r < 4; ++r)
                    need[{i, j, r}] = cfg.x - (cfg.m + cfg.n - 2);
        auto deficient = [&need]() {
            for (const auto& [k, v] : need)
                if (v > 0) return true;
            return false;
        };
        int guard = 0;
        while (deficient()) {
            if (++guard > 1 << 20) throw ConstraintViolation("extra-link plan did not converge");
            bool progressed = false;
            for (int i = 0; i < cfg.m; ++i)
                for (int j = 0; j + 1 < cfg.n; ++j)
                    for (int r = 0; r < 4; ++r) {
                        int& na = need[{i, j, r}];
                        int& nb = need[{i, j + 1, r}];
                        if (na > 0 || nb > 0) {
                            int l1 = modric_link_layer(cfg, i, j, i, j + 1);
                            int l2 = modric_link_layer(cfg, i, j + 1, i, j);
                            b.link(eps_ref(i, j, r, l1), eps_ref(i, j + 1, r, l2), LinkClass::S1,
                                   C);
                            na = std::max(0, na - 1);
                            nb = std::max(0, nb - 1);
                            progressed = true;
                        }
                    }
            if (!progressed) {
                for (int j = 0; j < cfg.n; ++j)
                    for (int i = 0; i + 1 < cfg.m; ++i)
                        for (int r = 0; r < 4; ++r) {
                            int& na = need[{i, j, r}];
                            int& nb = need[{i + 1, j, r}];
                            if (na > 0 || nb > 0) {
                                int l1 = modric_link_layer(cfg, i, j, i + 1, j);
                                int l2 = modric_link_layer(cfg, i + 1, j, i, j);
                                b.link(eps_ref(i, j, r, l1), eps_ref(i + 1, j, r, l2),
                                       LinkClass::S1, C);
                                na = std::max(0, na - 1);
                                nb = std::max(0, nb - 1);
                                progressed = true;
                            }
                        }
                if (!progressed) throw ConstraintViolation("extra-link plan infeasible");
            }
        }
    }
    return Topology("modric", cfg, std::move(b.nodes), std::move(b.links));
}

Topology build_fattree(const FatTreeParams& p) {
    const int R = p.radix;
    if (R < 4 || R % 2 != 0)
        throw InvalidRadix("fat-tree radix must be even and >= 4, got " + std::to_string(R));
    const int half = R / 2;
    Builder b;
    // pods: col = pod; edge switches host-facing, aggregation layer=1,
    // core switches in row 1 grouped by the aggregation index they serve
    for (int pod = 0; pod < R; ++pod) {
        for (int e = 0; e < half; ++e) b.add_node(as_ref(0, pod, e));
        for (int a = 0; a < half; ++a) b.add_node(eps_ref(0, pod, a, 1));
        for (int h = 0; h < half * half; ++h) b.add_node(host_ref(0, pod, h));
    }
    for (int g = 0; g < half; ++g)
        for (int i = 0; i < half; ++i) b.add_node(eps_ref(1, g, i, 2));
    for (int pod = 0; pod < R; ++pod) {
        for (int h = 0; h < half * half; ++h)
            b.link(host_ref(0, pod, h), as_ref(0, pod, h / half), LinkClass::S2, p.cap_host_gbps);
        for (int e = 0; e < half; ++e)
            for (int a = 0; a < half; ++a)
                b.link(as_ref(0, pod, e), eps_ref(0, pod, a, 1), LinkClass::S2, p.cap_switch_gbps);
        for (int a = 0; a < half; ++a)
            for (int i = 0; i < half; ++i)
                b.link(eps_ref(0, pod, a, 1), eps_ref(1, a, i, 2), LinkClass::S2,
                       p.cap_switch_gbps);
    }
    return Topology("fattree", p, std::move(b.nodes), std::move(b.links));
}

Topology build_mdcube(const MdcubeParams& p) {
    if (p.k != 1) throw Unsupported("MDCube is built for k=1 only, got k=" + std::to_string(p.k));
    if (p.m < 1 || p.n < 1 || p.r < 2)
        throw ConstraintViolation("MDCube requires m,n >= 1 and r >= 2");
    Builder b;
    const int r = p.r;
    // BCube(r,1) per container: level-0 switch j serves hosts j*r..j*r+r-1,
    // level-1 switch j serves hosts with low digit j
    for (int i = 0; i < p.m; ++i)
        for (int j = 0; j < p.n; ++j) {
            for (int s = 0; s < r; ++s) b.add_node(as_ref(i, j, s));         // level 0
            for (int s = 0; s < r; ++s) b.add_node(eps_ref(i, j, s, 1));     // level 1
            for (int h = 0; h < r * r; ++h) b.add_node(host_ref(i, j, h));
        }
    for (int i = 0; i < p.m; ++i)
        for (int j = 0; j < p.n; ++j)
            for (int h = 0; h < r * r; ++h) {
                b.link(host_ref(i, j, h), as_ref(i, j, h / r), LinkClass::S2, p.cap_s2_gbps);
                b.link(host_ref(i, j, h), eps_ref(i, j, h % r, 1), LinkClass::S2, p.cap_s2_gbps);
            }
    // 4 parallel links between same-row/column containers. Each side
    // attaches all links toward its t-th neighbour to level-1 switch t mod r,
    // as in the generalized-hypercube switch indexing: different neighbours
    // land on different switches.
    ModricConfig order_cfg;
    order_cfg.m = p.m;
    order_cfg.n = p.n;
    order_cfg.q = 1;
    auto switch_toward = [&order_cfg, r](int i, int j, int ti, int tj) {
        auto order = modric_adjacency_order(order_cfg, i, j);
        auto it = std::find(order.begin(), order.end(), std::make_pair(ti, tj));
        return static_cast<int>(it - order.begin()) % r;
    };
    for (int i = 0; i < p.m; ++i)
        for (int j = 0; j < p.n; ++j)
            for (auto [ti, tj] : modric_adjacency_order(order_cfg, i, j)) {
                if (std::make_pair(i, j) > std::make_pair(ti, tj)) continue;  // one side emits
                int sa = switch_toward(i, j, ti, tj);
                int sb = switch_toward(ti, tj, i, j);
                for (int l = 0; l < 4; ++l)
                    b.link(eps_ref(i, j, sa, 1), eps_ref(ti, tj, sb, 1), LinkClass::S1,
                           p.cap_s1_gbps);
            }
    return Topology("mdcube", p, std::move(b.nodes), std::move(b.links));
}

namespace {

// One stub-matching attempt for a d-regular simple graph; edge-swap repair
// for leftover invalid pairs, as in the usual Jellyfish generators.
bool try_regular_graph(int sw, int d, std::mt19937_64& rng,
                       std::set<std::pair<int, int>>& edges) {
    edges.clear();
    std::vector<int> stubs;
    stubs.reserve(static_cast<size_t>(sw) * d);
    for (int s = 0; s < sw; ++s)
        for (int i = 0; i < d; ++i) stubs.push_back(s);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::vector<std::pair<int, int>> leftover;
    for (size_t i = 0; i + 1 < stubs.size(); i += 2) {
        int u = stubs[i], v = stubs[i + 1];
        if (u > v) std::swap(u, v);
        if (u == v || edges.count({u, v}))
            leftover.emplace_back(u, v);
        else
            edges.insert({u, v});
    }
    for (auto [u, v] : leftover) {
        bool fixed = false;
        std::vector<std::pair<int, int>> pool(edges.begin(), edges.end());
        std::shuffle(pool.begin(), pool.end(), rng);
        for (auto [a, bn] : pool) {
            // rewire (a,b) + stubs(u,v) -> (u,a),(v,b)
            int ua = std::min(u, a), ua2 = std::max(u, a);
            int vb = std::min(v, bn), vb2 = std::max(v, bn);
            if (u == a || v == bn || edges.count({ua, ua2}) || edges.count({vb, vb2})) continue;
            if (std::make_pair(ua, ua2) == std::make_pair(vb, vb2)) continue;
            edges.erase({a, bn});
            edges.insert({ua, ua2});
            edges.insert({vb, vb2});
            fixed = true;
            break;
        }
        if (!fixed) return false;
    }
    return true;
}

bool edges_connected(int sw, const std::set<std::pair<int, int>>& edges) {
    if (sw == 0) return true;
    std::vector<std::vector<int>> adj(sw);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<char> seen(sw, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int cnt = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                ++cnt;
                q.push(v);
            }
    }
    return cnt == sw;
}

}  // namespace

Topology build_jellyfish(const JellyfishParams& p) {
    if (p.switches < 1 || p.ports_per_switch < 1 || p.hosts_per_switch < 0)
        throw ConstraintViolation("jellyfish parameters must be positive");
    const int d = p.ports_per_switch - p.hosts_per_switch;
    if (d < 1) throw InfeasibleDegree("no switch ports left for the switch graph");
    if (d > p.switches - 1)
        throw InfeasibleDegree("degree " + std::to_string(d) + " needs at least " +
                               std::to_string(d + 1) + " switches");
    if ((static_cast<long long>(d) * p.switches) % 2 != 0)
        throw InfeasibleDegree("degree * switches must be even");
    std::set<std::pair<int, int>> edges;
    bool ok = false;
    for (int attempt = 0; attempt < p.max_retries && !ok; ++attempt) {
        std::mt19937_64 rng(p.seed * 0x9E3779B97F4A7C15ull + attempt);
        ok = try_regular_graph(p.switches, d, rng, edges) && edges_connected(p.switches, edges);
    }
    if (!ok) throw InfeasibleDegree("failed to sample a connected regular graph");
    Builder b;
    for (int s = 0; s < p.switches; ++s) {
        b.add_node(as_ref(0, s, 0));
        for (int h = 0; h < p.hosts_per_switch; ++h) b.add_node(host_ref(0, s, h));
    }
    for (int s = 0; s < p.switches; ++s)
        for (int h = 0; h < p.hosts_per_switch; ++h)
            b.link(host_ref(0, s, h), as_ref(0, s, 0), LinkClass::S2, p.cap_s2_gbps);
    for (auto [u, v] : edges) b.link(as_ref(0, u, 0), as_ref(0, v, 0), LinkClass::S1, p.cap_s1_gbps);
    return Topology("jellyfish", p, std::move(b.nodes), std::move(b.links));
}

Topology expand(const Topology& topo, const ExpandAction& action) {
    const ModricConfig* cfg = topo.modric_config();
    if (!cfg) throw NotModric("expansion requires a MODRIC topology");
    switch (action.kind) {
        case ExpandAction::AddRow: {
            ModricConfig next = *cfg;
            next.m += 1;
            return build_modric(next);
        }
        case ExpandAction::AddColumn: {
            ModricConfig next = *cfg;
            next.n += 1;
            return build_modric(next);
        }
        case ExpandAction::AddEpsLayer: {
            ModricConfig next = *cfg;
            next.q += 1;
            return build_modric(next);
        }
        case ExpandAction::AddAs: {
            int i = action.container_row, j = action.container_col;
            if (i < 0 || i >= cfg->m || j < 0 || j >= cfg->n)
                throw ConstraintViolation("container out of range");
            // current AS count in that container
            int xc = 0;
            for (const NodeRef& nd : topo.nodes())
                if (nd.kind == NodeKind::AccessSwitch && nd.row == i && nd.col == j) ++xc;
            // inter-container links of the rank-0 EPSC; ranks are symmetric
            int inter = 0;
            for (const Link& l : topo.links()) {
                const NodeRef& a = topo.node(l.a);
                const NodeRef& b = topo.node(l.b);
                if (a.kind != NodeKind::Eps || b.kind != NodeKind::Eps) continue;
                if (a.row == b.row && a.col == b.col) continue;
                bool a_in = a.row == i && a.col == j && a.rank == 0;
                bool b_in = b.row == i && b.col == j && b.rank == 0;
                if (a_in || b_in) ++inter;
            }
            if (cfg->containers() > 1 && xc + 1 > inter)
                throw ConstraintViolation("container (" + std::to_string(i) + "," +
                                          std::to_string(j) + ") has " + std::to_string(inter) +
                                          " inter-container links per EPSC; x=" +
                                          std::to_string(xc + 1) + " would oversubscribe them");
            std::vector<NodeRef> nodes = topo.nodes();
            std::vector<Link> links = topo.links();
            NodeRef asn = {NodeKind::AccessSwitch, i, j, 4 + xc, 0};
            nodes.push_back(asn);
            int32_t as_id = static_cast<int32_t>(nodes.size()) - 1;
            for (int r = 0; r < 4; ++r)
                links.push_back({as_id, topo.require({NodeKind::Eps, i, j, r, xc % cfg->q}),
                                 LinkClass::S1, cfg->cap_s1_gbps});
            return Topology("modric", *cfg, std::move(nodes), std::move(links));
        }
        case ExpandAction::AddHosts: {
            int32_t as_id = topo.require(action.as_ref);
            if (topo.node(as_id).kind != NodeKind::AccessSwitch)
                throw ConstraintViolation(action.as_ref.str() + " is not an access switch");
            if (action.count < 0) throw ConstraintViolation("host count must be >= 0");
            if (action.count == 0) return topo;
            int attached = 0;
            for (const auto& inc : topo.neighbors(as_id))
                if (topo.node(inc.peer).kind == NodeKind::Host) ++attached;
            double after = (attached + action.count) * cfg->cap_s2_gbps;
            if (after > 4.0 * cfg->cap_s1_gbps + 1e-9)
                throw ConstraintViolation("y <= 4C/c violated on " + action.as_ref.str() +
                                          ": y would become " +
                                          std::to_string(attached + action.count));
            int next_rank = -1;
            for (const NodeRef& nd : topo.nodes())
                if (nd.kind == NodeKind::Host && nd.row == action.as_ref.row &&
                    nd.col == action.as_ref.col)
                    next_rank = std::max(next_rank, nd.rank);
            std::vector<NodeRef> nodes = topo.nodes();
            std::vector<Link> links = topo.links();
            for (int h = 0; h < action.count; ++h) {
                nodes.push_back(
                    {NodeKind::Host, action.as_ref.row, action.as_ref.col, next_rank + 1 + h, 0});
                links.push_back({static_cast<int32_t>(nodes.size()) - 1, as_id, LinkClass::S2,
                                 cfg->cap_s2_gbps});
            }
            return Topology("modric", *cfg, std::move(nodes), std::move(links));
        }
    }
    throw ConstraintViolation("unknown expansion action");
}

namespace {

struct EndpointKey {
    NodeKind kind;
    int row, col, rank, layer;
};

std::string link_desc(const Topology& t, const Link& l) {
    return t.node(l.a).str() + " -- " + t.node(l.b).str();
}

}  // namespace

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.detail.empty()) os << " (" << c.detail << ")";
        os << '\n';
        size_t shown = 0;
        for (const auto& o : c.offenders) {
            if (shown++ == 8) {
                os << "    ... " << c.offenders.size() - 8 << " more\n";
                break;
            }
            os << "    " << o << '\n';
        }
    }
    return os.str();
}

ValidationReport validate(const Topology& topo) {
    ValidationReport rep;
    auto& checks = rep.checks;
    const ModricConfig* cfg = topo.modric_config();
    checks.push_back({"modric-metadata", cfg != nullptr, {}, ""});
    if (!cfg) return rep;
    const int q = cfg->q;

    // hosts: exactly one S2 link, to an access switch
    {
        ValidationReport::Check ch{"host-single-s2-link", true, {}, "every host has exactly one S2 link to an AS"};
        for (int32_t v = 0; v < topo.node_count(); ++v) {
            if (topo.node(v).kind != NodeKind::Host) continue;
            const auto& inc = topo.neighbors(v);
            bool ok = inc.size() == 1 && topo.link(inc[0].link).cls == LinkClass::S2 &&
                      topo.node(inc[0].peer).kind == NodeKind::AccessSwitch;
            if (!ok) {
                ch.passed = false;
                ch.offenders.push_back(topo.node(v).str() + " has " +
                                       std::to_string(inc.size()) + " links");
            }
        }
        checks.push_back(std::move(ch));
    }
    // access switches: 4 S1 uplinks covering all 4 EPSC ranks; host aggregate within 4C
    {
        ValidationReport::Check ch{"as-four-s1-uplinks", true, {}, "one uplink to each of the 4 EPSCs"};
        ValidationReport::Check cap{"as-capacity", true, {}, "y*c <= 4*C per AS"};
        for (int32_t v = 0; v < topo.node_count(); ++v) {
            const NodeRef& nd = topo.node(v);
            if (nd.kind != NodeKind::AccessSwitch) continue;
            std::set<int> ranks;
            int uplinks = 0, hosts = 0;
            bool clean = true;
            for (const auto& inc : topo.neighbors(v)) {
                const NodeRef& peer = topo.node(inc.peer);
                if (peer.kind == NodeKind::Eps) {
                    ++uplinks;
                    if (peer.row != nd.row || peer.col != nd.col) clean = false;
                    ranks.insert(peer.rank);
                } else if (peer.kind == NodeKind::Host) {
                    ++hosts;
                }
            }
            if (uplinks != 4 || ranks != std::set<int>{0, 1, 2, 3} || !clean) {
                ch.passed = false;
                ch.offenders.push_back(nd.str() + " uplinks=" + std::to_string(uplinks));
            }
            if (hosts * cfg->cap_s2_gbps > 4.0 * cfg->cap_s1_gbps + 1e-9) {
                cap.passed = false;
                cap.offenders.push_back(nd.str() + " y=" + std::to_string(hosts));
            }
        }
        checks.push_back(std::move(ch));
        checks.push_back(std::move(cap));
    }
    // EPSC meshes
    {
        ValidationReport::Check intra{"epsc-intra-mesh", true, {}, "q EPSes full S1 mesh per EPSC"};
        ValidationReport::Check layer{"epsc-layer-mesh", true, {}, "same-layer EPSes meshed across the 4 EPSCs"};
        std::map<std::tuple<int, int, int, int, int, int, int, int>, int> eps_pairs;
        for (const Link& l : topo.links()) {
            const NodeRef& a = topo.node(l.a);
            const NodeRef& b = topo.node(l.b);
            if (a.kind != NodeKind::Eps || b.kind != NodeKind::Eps) continue;
            if (a.row != b.row || a.col != b.col) continue;
            auto ka = std::make_pair(a.rank, a.layer), kb = std::make_pair(b.rank, b.layer);
            if (kb < ka) std::swap(ka, kb);
            eps_pairs[{a.row, a.col, ka.first, ka.second, kb.first, kb.second, 0, 0}]++;
        }
        for (int i = 0; i < cfg->m; ++i)
            for (int j = 0; j < cfg->n; ++j) {
                for (int r = 0; r < 4; ++r)
                    for (int l1 = 0; l1 < q; ++l1)
                        for (int l2 = l1 + 1; l2 < q; ++l2)
                            if (!eps_pairs.count({i, j, r, l1, r, l2, 0, 0})) {
                                intra.passed = false;
                                intra.offenders.push_back(eps_ref(i, j, r, l1).str() + " !- " +
                                                          eps_ref(i, j, r, l2).str());
                            }
                for (int l = 0; l < q; ++l)
                    for (int r1 = 0; r1 < 4; ++r1)
                        for (int r2 = r1 + 1; r2 < 4; ++r2)
                            if (!eps_pairs.count({i, j, r1, l, r2, l, 0, 0})) {
                                layer.passed = false;
                                layer.offenders.push_back(eps_ref(i, j, r1, l).str() + " !- " +
                                                          eps_ref(i, j, r2, l).str());
                            }
            }
        checks.push_back(std::move(intra));
        checks.push_back(std::move(layer));
    }
    // inter-container connectivity and the EPSC traffic constraint
    {
        ValidationReport::Check pairs{"inter-container-links", true, {},
                                      "one link per rank to every same-row/column container"};
        ValidationReport::Check traffic{"epsc-traffic-constraint", true, {},
                                        "inter-container links per EPSC >= x"};
        std::map<std::tuple<int, int, int>, int> inter_count;  // (row,col,rank) -> links
        std::map<std::tuple<int, int, int, int, int>, int> pair_count;
        for (const Link& l : topo.links()) {
            const NodeRef& a = topo.node(l.a);
            const NodeRef& b = topo.node(l.b);
            if (a.kind != NodeKind::Eps || b.kind != NodeKind::Eps) continue;
            if (a.row == b.row && a.col == b.col) continue;
            bool same_line = a.row == b.row || a.col == b.col;
            if (!same_line || a.rank != b.rank) {
                pairs.passed = false;
                pairs.offenders.push_back("rogue link " + link_desc(topo, l));
                continue;
            }
            inter_count[{a.row, a.col, a.rank}]++;
            inter_count[{b.row, b.col, b.rank}]++;
            auto ca = std::make_pair(a.row, a.col), cb = std::make_pair(b.row, b.col);
            if (cb < ca) std::swap(ca, cb);
            pair_count[{ca.first, ca.second, cb.first, cb.second, a.rank}]++;
        }
        for (int i = 0; i < cfg->m; ++i)
            for (int j = 0; j < cfg->n; ++j)
                for (auto [ti, tj] : modric_adjacency_order(*cfg, i, j)) {
                    auto ca = std::make_pair(i, j), cb = std::make_pair(ti, tj);
                    if (cb < ca) continue;
                    for (int r = 0; r < 4; ++r)
                        if (pair_count[{ca.first, ca.second, cb.first, cb.second, r}] < 1) {
                            pairs.passed = false;
                            pairs.offenders.push_back(
                                "missing rank-" + std::to_string(r) + " link (" +
                                std::to_string(i) + "," + std::to_string(j) + ")-(" +
                                std::to_string(ti) + "," + std::to_string(tj) + ")");
                        }
                }
        if (cfg->containers() > 1) {
            std::map<std::pair<int, int>, int> as_count;
            for (const NodeRef& nd : topo.nodes())
                if (nd.kind == NodeKind::AccessSwitch) as_count[{nd.row, nd.col}]++;
            for (int i = 0; i < cfg->m; ++i)
                for (int j = 0; j < cfg->n; ++j)
                    for (int r = 0; r < 4; ++r)
                        if (inter_count[{i, j, r}] < as_count[{i, j}]) {
                            traffic.passed = false;
                            traffic.offenders.push_back(
                                "EPSC (" + std::to_string(i) + "," + std::to_string(j) + ") rank " +
                                std::to_string(r) + ": " + std::to_string(inter_count[{i, j, r}]) +
                                " inter links < x=" + std::to_string(as_count[{i, j}]));
                        }
        }
        checks.push_back(std::move(pairs));
        checks.push_back(std::move(traffic));
    }
    checks.push_back({"connected", topo.connected(), {}, ""});
    return rep;
}

namespace {

// 1-WL colour refinement; colours fold in node kind and incident link
// class/capacity so only structure-preserving maps survive.
std::vector<uint64_t> refine_colors(const Topology& t) {
    auto mix = [](uint64_t h, uint64_t v) {
        h ^= v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        return h;
    };
    std::vector<uint64_t> color(t.node_count());
    for (int32_t v = 0; v < t.node_count(); ++v)
        color[v] = static_cast<uint64_t>(t.node(v).kind) * 1000003ull + 7;
    for (int iter = 0; iter < 24; ++iter) {
        std::vector<uint64_t> next(t.node_count());
        for (int32_t v = 0; v < t.node_count(); ++v) {
            std::vector<uint64_t> sig;
            for (const auto& inc : t.neighbors(v)) {
                const Link& l = t.link(inc.link);
                uint64_t e = mix(static_cast<uint64_t>(l.cls) + 11,
                                 static_cast<uint64_t>(l.capacity_gbps * 1e6));
                sig.push_back(mix(e, color[inc.peer]));
            }
            std::sort(sig.begin(), sig.end());
            uint64_t h = mix(color[v], 0x51ED2701);
            for (uint64_t s : sig) h = mix(h, s);
            next[v] = h;
        }
        if (next == color) break;
        color = std::move(next);
    }
    return color;
}

using PairCount = std::map<std::pair<int32_t, uint64_t>, int>;

// multiset of (peer, edge signature) for adjacency-consistency checks

bool extend_mapping(const Topology& a, const Topology& b, const std::vector<uint64_t>& ca,
                    const std::vector<uint64_t>& cb, std::vector<int32_t>& map_ab,
                    std::vector<char>& used_b, size_t idx, const std::vector<int32_t>& order) {
    if (idx == order.size()) return true;
    int32_t v = order[idx];
    // try the same-id candidate first: expansion rebuilds usually line up
    std::vector<int32_t> cands;
    if (v < b.node_count() && !used_b[v] && cb[v] == ca[v] && b.node(v).kind == a.node(v).kind)
        cands.push_back(v);
    for (int32_t w = 0; w < b.node_count(); ++w)
        if (!used_b[w] && w != v && cb[w] == ca[v]) cands.push_back(w);
    for (int32_t w : cands) {
        bool ok = true;
        // every already-mapped neighbour of v must be a matching neighbour of w
        PairCount need;
        for (const auto& inc : a.neighbors(v)) {
            if (map_ab[inc.peer] < 0) continue;
            const Link& l = a.link(inc.link);
            uint64_t e = static_cast<uint64_t>(l.cls) * 1000003ull +
                         static_cast<uint64_t>(l.capacity_gbps * 1e6);
            need[{map_ab[inc.peer], e}]++;
        }
        PairCount have;
        for (const auto& inc : b.neighbors(w)) {
            const Link& l = b.link(inc.link);
            uint64_t e = static_cast<uint64_t>(l.cls) * 1000003ull +
                         static_cast<uint64_t>(l.capacity_gbps * 1e6);
            auto key = std::make_pair(inc.peer, e);
            if (need.count(key)) have[key]++;
        }
        for (const auto& [k, cnt] : need)
            if (have[k] != cnt) {
                ok = false;
                break;
            }
        if (!ok) continue;
        map_ab[v] = w;
        used_b[w] = 1;
        if (extend_mapping(a, b, ca, cb, map_ab, used_b, idx + 1, order)) return true;
        map_ab[v] = -1;
        used_b[w] = 0;
    }
    return false;
}

}  // namespace

bool isomorphic(const Topology& a, const Topology& b) {
    if (a.node_count() != b.node_count() || a.link_count() != b.link_count()) return false;
    auto ca = refine_colors(a);
    auto cb = refine_colors(b);
    std::map<uint64_t, int> ha, hb;
    for (uint64_t c : ca) ha[c]++;
    for (uint64_t c : cb) hb[c]++;
    if (ha != hb) return false;
    // rarest colours first shrinks the search
    std::vector<int32_t> order(a.node_count());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int32_t u, int32_t v) {
        if (ha[ca[u]] != ha[ca[v]]) return ha[ca[u]] < ha[ca[v]];
        return u < v;
    });
    std::vector<int32_t> map_ab(a.node_count(), -1);
    std::vector<char> used_b(b.node_count(), 0);
    return extend_mapping(a, b, ca, cb, map_ab, used_b, 0, order);
}

}  // namespace modric
