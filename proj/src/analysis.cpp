#include "modric/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>

#include "modric/builders.hpp"

namespace modric {

namespace {

// BFS over switches only; hosts are leaves and never transit.
std::vector<int> switch_bfs(const Topology& t, int32_t src) {
    std::vector<int> dist(t.node_count(), -1);
    std::queue<int32_t> q;
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
        int32_t u = q.front();
        q.pop();
        for (const auto& inc : t.neighbors(u)) {
            if (t.node(inc.peer).kind == NodeKind::Host) continue;
            if (dist[inc.peer] < 0) {
                dist[inc.peer] = dist[u] + 1;
                q.push(inc.peer);
            }
        }
    }
    return dist;
}

}  // namespace

int host_diameter(const Topology& topo) {
    // attachment switches and how many hosts hang off each
    std::vector<int32_t> attach;
    for (int32_t v = 0; v < topo.node_count(); ++v) {
        if (topo.node(v).kind == NodeKind::Host) continue;
        for (const auto& inc : topo.neighbors(v))
            if (topo.node(inc.peer).kind == NodeKind::Host) {
                attach.push_back(v);
                break;
            }
    }
    size_t host_count = topo.hosts().size();
    if (host_count < 2) return 0;
    int best = -1;
    for (int32_t a : attach) {
        auto dist = switch_bfs(topo, a);
        for (int32_t b : attach) {
            if (dist[b] < 0) throw Disconnected("switch graph is disconnected");
            if (a == b) {
                // two hosts under one switch still need 2 hops
                continue;
            }
            best = std::max(best, dist[b]);
        }
    }
    if (best < 0) best = 0;  // all hosts under a single switch
    return best + 2;
}

namespace {

// Canonical switch graph: EPSCs collapsed over layers, plus access switches.
struct CanonGraph {
    std::vector<NodeRef> nodes;            // layer forced to 0 for EPS
    std::map<NodeRef, int> id;
    std::vector<std::map<int, int>> adj;   // peer -> parallel edge count

    int intern(NodeRef r) {
        if (r.kind == NodeKind::Eps) r.layer = 0;
        auto [it, fresh] = id.emplace(r, static_cast<int>(nodes.size()));
        if (fresh) {
            nodes.push_back(r);
            adj.emplace_back();
        }
        return it->second;
    }
};

CanonGraph canonical_graph(const Topology& t) {
    CanonGraph g;
    for (const NodeRef& nd : t.nodes())
        if (nd.kind != NodeKind::Host) g.intern(nd);
    for (const Link& l : t.links()) {
        NodeRef a = t.node(l.a), b = t.node(l.b);
        if (a.kind == NodeKind::Host || b.kind == NodeKind::Host) continue;
        int u = g.intern(a), v = g.intern(b);
        if (u == v) continue;  // intra-EPSC mesh collapses away
        g.adj[u][v]++;
        g.adj[v][u]++;
    }
    return g;
}

std::vector<int> canon_bfs(const CanonGraph& g, const std::vector<int>& sources) {
    std::vector<int> dist(g.nodes.size(), -1);
    std::queue<int> q;
    for (int s : sources) {
        dist[s] = 0;
        q.push(s);
    }
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (const auto& [v, cnt] : g.adj[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
    }
    return dist;
}

// Edmonds-Karp on an integer-capacity digraph.
struct FlowNet {
    struct Edge {
        int to, cap;
        size_t rev;
    };
    std::vector<std::vector<Edge>> g;
    explicit FlowNet(size_t n) : g(n) {}
    void add(int u, int v, int cap) {
        g[u].push_back({v, cap, g[v].size()});
        g[v].push_back({u, 0, g[u].size() - 1});
    }
    int max_flow(int s, int t) {
        int flow = 0;
        while (true) {
            std::vector<std::pair<int, size_t>> par(g.size(), {-1, 0});
            std::queue<int> q;
            q.push(s);
            par[s] = {s, 0};
            while (!q.empty() && par[t].first < 0) {
                int u = q.front();
                q.pop();
                for (size_t i = 0; i < g[u].size(); ++i)
                    if (g[u][i].cap > 0 && par[g[u][i].to].first < 0) {
                        par[g[u][i].to] = {u, i};
                        q.push(g[u][i].to);
                    }
            }
            if (par[t].first < 0) return flow;
            int aug = 1 << 30;
            for (int v = t; v != s;) {
                auto [u, i] = par[v];
                aug = std::min(aug, g[u][i].cap);
                v = u;
            }
            for (int v = t; v != s;) {
                auto [u, i] = par[v];
                g[u][i].cap -= aug;
                g[g[u][i].to][g[u][i].rev].cap += aug;
                v = u;
            }
            flow += aug;
        }
    }
};

int disjoint_shortest_paths(const CanonGraph& g, const std::vector<int>& src,
                            const std::vector<int>& dst) {
    std::set<int> srcs(src.begin(), src.end()), dsts(dst.begin(), dst.end());
    auto ds = canon_bfs(g, src);
    auto dt = canon_bfs(g, dst);
    int D = -1;
    for (int s : src)
        if (dt[s] >= 0) D = D < 0 ? dt[s] : std::min(D, dt[s]);
    if (D < 0) throw Disconnected("no path between the endpoints");
    // node splitting: internal node u -> u_in (2u) / u_out (2u+1), capacity 1
    const int N = static_cast<int>(g.nodes.size());
    FlowNet net(2 * N + 2);
    const int S = 2 * N, T = 2 * N + 1;
    const int INF = 1 << 20;
    for (int u = 0; u < N; ++u)
        if (!srcs.count(u) && !dsts.count(u)) net.add(2 * u, 2 * u + 1, 1);
    for (int s : src) net.add(S, 2 * s + 1, INF);
    for (int d : dst) net.add(2 * d, T, INF);
    for (int s : src) net.add(2 * s, 2 * s + 1, INF);
    for (int d : dst) net.add(2 * d, 2 * d + 1, INF);
    for (int u = 0; u < N; ++u)
        for (const auto& [v, cnt] : g.adj[u]) {
            if (ds[u] < 0 || dt[v] < 0) continue;
            if (ds[u] + 1 + dt[v] != D) continue;      // shortest-path DAG only
            if (dsts.count(u) || srcs.count(v)) continue;
            net.add(2 * u + 1, 2 * v, cnt);
        }
    return net.max_flow(S, T);
}

}  // namespace

int vertex_disjoint_paths(const Topology& topo, const NodeRef& as_a, const NodeRef& as_b) {
    if (as_a == as_b) throw ConstraintViolation("endpoints must differ");
    CanonGraph g = canonical_graph(topo);
    auto ia = g.id.find(as_a), ib = g.id.find(as_b);
    if (ia == g.id.end() || ib == g.id.end())
        throw ConstraintViolation("no such access switch in the topology");
    return disjoint_shortest_paths(g, {ia->second}, {ib->second});
}

int vertex_disjoint_paths(const Topology& topo, std::pair<int, int> ca, std::pair<int, int> cb) {
    if (ca == cb) throw ConstraintViolation("containers must differ");
    CanonGraph g = canonical_graph(topo);
    std::vector<int> src, dst;
    for (size_t u = 0; u < g.nodes.size(); ++u) {
        const NodeRef& nd = g.nodes[u];
        if (nd.kind != NodeKind::Eps) continue;
        if (nd.row == ca.first && nd.col == ca.second) src.push_back(static_cast<int>(u));
        if (nd.row == cb.first && nd.col == cb.second) dst.push_back(static_cast<int>(u));
    }
    if (src.empty() || dst.empty()) throw ConstraintViolation("container has no EPSCs");
    return disjoint_shortest_paths(g, src, dst);
}

double container_bisection_formula(int x, int q, double C) {
    return (2.0 * x + 4.0 * q) * C;
}

CutResult container_bisection_brute(int x, int q, double C) {
    if (4 + x > 20) throw TooLarge("brute-force bisection is bounded at 20 nodes, got " +
                                   std::to_string(4 + x));
    // canonical container: EPSC pairs carry q parallel C links; each AS has
    // one C link to each EPSC
    struct Edge {
        int u, v;  // 0..3 EPSC, 4.. AS
        double cap;
    };
    std::vector<Edge> edges;
    for (int r1 = 0; r1 < 4; ++r1)
        for (int r2 = r1 + 1; r2 < 4; ++r2) edges.push_back({r1, r2, q * C});
    for (int a = 0; a < x; ++a)
        for (int r = 0; r < 4; ++r) edges.push_back({4 + a, r, C});
    auto name = [x](int u) {
        return u < 4 ? "epsc:" + std::to_string(u) : "as:" + std::to_string(4 + u - 4);
    };
    CutResult best;
    best.capacity_gbps = -1.0;
    int half_as = x / 2;
    // EPSC 0 pinned to side A; iterate its partner and the AS subset
    for (int partner = 1; partner < 4; ++partner) {
        std::vector<int> as_idx(x);
        for (int i = 0; i < x; ++i) as_idx[i] = i;
        std::vector<int> pick(x, 0);
        std::fill(pick.begin(), pick.begin() + half_as, 1);
        std::sort(pick.begin(), pick.end());
        do {
            std::set<int> side{0, partner};
            for (int i = 0; i < x; ++i)
                if (pick[i]) side.insert(4 + i);
            double cut = 0.0;
            std::vector<std::string> cut_links;
            for (const Edge& e : edges)
                if (side.count(e.u) != side.count(e.v)) {
                    cut += e.cap;
                    cut_links.push_back(name(e.u) + " -- " + name(e.v));
                }
            if (best.capacity_gbps < 0 || cut < best.capacity_gbps) {
                best.capacity_gbps = cut;
                best.partition_a.clear();
                best.partition_b.clear();
                for (int u = 0; u < 4 + x; ++u)
                    (side.count(u) ? best.partition_a : best.partition_b).push_back(name(u));
                best.cut_links = std::move(cut_links);
            }
        } while (std::next_permutation(pick.begin(), pick.end()));
    }
    return best;
}

NetworkBisection network_bisection_structured(const ModricConfig& cfg) {
    const double C = cfg.cap_s1_gbps;
    const int m = cfg.m, n = cfg.n, x = cfg.x, q = cfg.q;
    auto odd_line = [&](int len) {
        long long h = len / 2;
        return (4.0 * h * h + 4.0 * h + (2.0 * x + 4.0 * q)) * C;
    };
    NetworkBisection out;
    out.row_bisection_gbps = n % 2 == 0 ? double(n) * n * C : odd_line(n);
    out.col_bisection_gbps = m % 2 == 0 ? double(m) * m * C : odd_line(m);
    const double horizontal = double(n) * m * m * C;  // cuts all n columns
    const double vertical = double(m) * n * n * C;
    if (m % 2 == 0 && n % 2 == 0) {
        out.case_label = "m even, n even";
        out.horizontal_gbps = horizontal;
        out.vertical_gbps = vertical;
    } else if (m % 2 == 1 && n % 2 == 0) {
        out.case_label = "m odd, n even";
        out.vertical_gbps = vertical;                       // Eq. (1)
        out.horizontal_gbps = double(n) * C * (m * m + n);  // Eq. (2), middle row cut vertically
    } else if (m % 2 == 0 && n % 2 == 1) {
        out.case_label = "m even, n odd";
        out.horizontal_gbps = horizontal;
    } else {
        out.case_label = "m odd, n odd";
        out.horizontal_gbps = horizontal + odd_line(n);  // one middle-row container bisected
        out.vertical_gbps = vertical + odd_line(m);      // symmetric column variant
    }
    out.bisection_gbps = out.horizontal_gbps.value_or(1e300);
    if (out.vertical_gbps) out.bisection_gbps = std::min(out.bisection_gbps, *out.vertical_gbps);
    return out;
}

double container_level_min_bisection(const ModricConfig& cfg) {
    const int total = cfg.containers();
    if (total > 16) throw TooLarge("container-level enumeration bounded at 16 containers");
    if (total % 2 != 0)
        throw ConstraintViolation("balanced whole-container bipartition needs an even count");
    // container multigraph from the built topology (includes extra links)
    Topology t = build_modric(cfg);
    std::map<std::pair<int, int>, double> pair_cap;
    for (const Link& l : t.links()) {
        const NodeRef& a = t.node(l.a);
        const NodeRef& b = t.node(l.b);
        if (a.kind != NodeKind::Eps || b.kind != NodeKind::Eps) continue;
        if (a.row == b.row && a.col == b.col) continue;
        int ca = a.row * cfg.n + a.col, cb = b.row * cfg.n + b.col;
        pair_cap[{std::min(ca, cb), std::max(ca, cb)}] += l.capacity_gbps;
    }
    double best = -1.0;
    const int half = total / 2;
    std::vector<int> pick(total, 0);
    std::fill(pick.begin(), pick.begin() + half, 1);
    std::sort(pick.begin(), pick.end());
    do {
        if (!pick[0]) continue;  // pin container 0, halves the enumeration
        double cut = 0.0;
        for (const auto& [pr, cap] : pair_cap)
            if (pick[pr.first] != pick[pr.second]) cut += cap;
        if (best < 0 || cut < best) best = cut;
    } while (std::next_permutation(pick.begin(), pick.end()));
    return best;
}

PortCensus modric_port_census_formula(const ModricConfig& cfg) {
    PortCensus pc;
    const long long m = cfg.m, n = cfg.n, q = cfg.q, x = cfg.x, y = cfg.y;
    long long inter_per_epsc = cfg.containers() > 1 ? m + n - 2 : 0;
    long long per_container = 4 * q * (q - 1) + 12 * q + 8 * x + 4 * inter_per_epsc;
    pc.s1_ports = m * n * per_container;
    pc.s2_ports = m * n * x * y;
    pc.hosts = m * n * x * y;
    return pc;
}

PortCensus modric_port_census_max(int m, int n, int q, double C, double c) {
    PortCensus pc;
    long long hosts = static_cast<long long>(m) * n * (m + n - 2) *
                      static_cast<long long>(std::llround(4.0 * C / c));
    pc.hosts = hosts;
    pc.s2_ports = hosts;
    pc.s1_ports = 4ll * m * n *
                  (static_cast<long long>(q) * q + 2 * q + 3 * m + 3 * n - 6);
    return pc;
}

PortCensus mdcube_port_census_formula(const MdcubeParams& p) {
    PortCensus pc;
    long long rk1 = 1;
    for (int i = 0; i <= p.k; ++i) rk1 *= p.r;  // r^(k+1)
    pc.hosts = static_cast<long long>(p.m) * p.n * rk1;
    pc.s2_ports = static_cast<long long>(p.m) * p.n * rk1 * (p.k + 1);
    pc.s1_ports = p.m * p.n > 1
                      ? static_cast<long long>(p.m) * p.n * p.z * (p.m + p.n - 2)
                      : 0;
    return pc;
}

PortCensus fattree_port_census_formula(int radix) {
    PortCensus pc;
    long long R = radix;
    pc.hosts = R * R * R / 4;
    pc.s2_ports = 5 * R * R * R / 4;
    pc.s1_ports = 0;
    return pc;
}

PortCensus port_census_from_graph(const Topology& topo) {
    PortCensus pc;
    pc.hosts = static_cast<long long>(topo.hosts().size());
    for (const Link& l : topo.links()) {
        int switch_sides = (topo.node(l.a).kind != NodeKind::Host) +
                           (topo.node(l.b).kind != NodeKind::Host);
        if (l.cls == LinkClass::S1)
            pc.s1_ports += switch_sides;
        else
            pc.s2_ports += switch_sides;
    }
    return pc;
}

double cable_length(const ModricConfig& cfg, CableMode mode) {
    const ModricGeometry& g = cfg.geometry;
    if (g.length_m <= 0 || g.width_m <= 0 || g.gap_row_m < 0 || g.gap_col_m < 0)
        throw MissingGeometry("container geometry is not set");
    if (mode == CableMode::Formula) {
        double nn = cfg.n, mm = cfg.m;
        return (2.0 / 3.0) * (mm * (nn * nn * nn - nn) * (g.length_m + g.gap_row_m) +
                              nn * (mm * mm * mm - mm) * (g.width_m + g.gap_col_m));
    }
    return cable_length_per_link(build_modric(cfg), g);
}

double cable_length_per_link(const Topology& topo, const ModricGeometry& g) {
    double total = 0.0;
    for (const Link& l : topo.links()) {
        const NodeRef& a = topo.node(l.a);
        const NodeRef& b = topo.node(l.b);
        if (a.kind != NodeKind::Eps || b.kind != NodeKind::Eps) continue;
        if (a.row == b.row && a.col == b.col) continue;
        if (a.row == b.row)
            total += std::abs(a.col - b.col) * (g.length_m + g.gap_row_m);
        else
            total += std::abs(a.row - b.row) * (g.width_m + g.gap_col_m);
    }
    return total;
}

}  // namespace modric
