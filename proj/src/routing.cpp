#include "modric/routing.hpp"

#include <algorithm>
#include <queue>

namespace modric {

uint64_t stable_mix(uint64_t a, uint64_t b) {
    uint64_t x = a * 0x9E3779B97F4A7C15ull + b + 0xD1B54A32D192ED03ull;
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

uint64_t flow_hash(uint32_t src_addr, uint32_t dst_addr, uint64_t flow_id) {
    return stable_mix(stable_mix(src_addr, dst_addr), flow_id);
}

const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::Modric: return "modric";
        case Scheme::EcmpOnly: return "ecmp";
        case Scheme::Spr: return "spr";
    }
    return "?";
}

bool RoutedPath::loop_free() const {
    std::set<int32_t> seen(nodes.begin(), nodes.end());
    return seen.size() == nodes.size();
}

ForwardingTables compile_tables(const Topology& topo, const BitPlan& plan) {
    const ModricConfig* cfg = topo.modric_config();
    if (!cfg) throw NotModric("forwarding tables are compiled for MODRIC topologies");
    ForwardingTables ft;
    ft.plan = plan;
    ft.host_addr.assign(topo.node_count(), 0);
    ft.host_fields.assign(topo.node_count(), {});

    // per-AS host lists, sorted by rank, give the local host index
    std::map<int32_t, std::vector<std::pair<int, int32_t>>> as_hosts;  // as -> (host rank, host)
    for (int32_t v = 0; v < topo.node_count(); ++v) {
        if (topo.node(v).kind != NodeKind::Host) continue;
        if (topo.neighbors(v).size() != 1)
            throw AddressingIncomplete("host " + topo.node(v).str() + " is not singly attached");
        as_hosts[topo.neighbors(v)[0].peer].emplace_back(topo.node(v).rank, v);
    }
    for (auto& [as_id, hosts] : as_hosts) {
        std::sort(hosts.begin(), hosts.end());
        const NodeRef& asn = topo.node(as_id);
        for (size_t idx = 0; idx < hosts.size(); ++idx) {
            AddrFields f{asn.row, asn.col, asn.rank, static_cast<int>(idx)};
            ft.host_fields[hosts[idx].second] = f;
            ft.host_addr[hosts[idx].second] = encode_addr(f, plan);
        }
    }

    for (int32_t v = 0; v < topo.node_count(); ++v) {
        const NodeRef& nd = topo.node(v);
        if (nd.kind == NodeKind::AccessSwitch) {
            ForwardingTables::AsEntry e;
            std::map<int, int32_t> uplink_by_rank;
            for (const auto& inc : topo.neighbors(v)) {
                const NodeRef& peer = topo.node(inc.peer);
                if (peer.kind == NodeKind::Eps)
                    uplink_by_rank[peer.rank] = inc.link;
                else if (peer.kind == NodeKind::Host)
                    e.host_links[ft.host_fields[inc.peer].host] = inc.link;
            }
            for (const auto& [r, l] : uplink_by_rank) e.uplinks.push_back(l);
            e.rules.push_back({nd.row, nd.col, nd.rank, ForwardingTables::Action::DeliverHost});
            e.rules.push_back({-1, -1, -1, ForwardingTables::Action::UplinkEcmp});
            ft.as.emplace(v, std::move(e));
        } else if (nd.kind == NodeKind::Eps) {
            ForwardingTables::EpsEntry e;
            // direct links from this EPS, and this EPSC's layer map
            std::map<std::pair<int, int>, std::vector<int32_t>> direct;
            std::map<int, std::vector<int32_t>> direct_as;
            std::map<int, int32_t> mesh_to_layer;  // intra-EPSC link per layer
            for (const auto& inc : topo.neighbors(v)) {
                const NodeRef& peer = topo.node(inc.peer);
                if (peer.kind == NodeKind::AccessSwitch) {
                    direct_as[peer.rank].push_back(inc.link);
                } else if (peer.kind == NodeKind::Eps) {
                    if (peer.row == nd.row && peer.col == nd.col) {
                        if (peer.rank == nd.rank) mesh_to_layer[peer.layer] = inc.link;
                    } else {
                        direct[{peer.row, peer.col}].push_back(inc.link);
                    }
                }
            }
            // which layers of this EPSC carry links toward each container / AS
            std::map<std::pair<int, int>, std::set<int>> layers_toward;
            std::map<int, std::set<int>> layers_toward_as;
            for (int32_t w = 0; w < topo.node_count(); ++w) {
                const NodeRef& o = topo.node(w);
                if (o.kind != NodeKind::Eps || o.row != nd.row || o.col != nd.col ||
                    o.rank != nd.rank)
                    continue;
                for (const auto& inc : topo.neighbors(w)) {
                    const NodeRef& peer = topo.node(inc.peer);
                    if (peer.kind == NodeKind::Eps && (peer.row != o.row || peer.col != o.col))
                        layers_toward[{peer.row, peer.col}].insert(o.layer);
                    if (peer.kind == NodeKind::AccessSwitch)
                        layers_toward_as[peer.rank].insert(o.layer);
                }
            }
            for (const auto& [target, layers] : layers_toward) {
                auto it = direct.find(target);
                if (it != direct.end()) {
                    e.toward_container[target] = it->second;
                } else {
                    std::vector<int32_t>& cands = e.toward_container[target];
                    for (int l : layers)
                        if (mesh_to_layer.count(l)) cands.push_back(mesh_to_layer[l]);
                }
            }
            std::vector<int> as_ranks;
            for (const auto& [rank, layers] : layers_toward_as) {
                as_ranks.push_back(rank);
                auto it = direct_as.find(rank);
                if (it != direct_as.end()) {
                    e.toward_as[rank] = it->second;
                } else {
                    std::vector<int32_t>& cands = e.toward_as[rank];
                    for (int l : layers)
                        if (mesh_to_layer.count(l)) cands.push_back(mesh_to_layer[l]);
                }
            }
            // rule order: local ASes, same row, same column, diagonal catch-all
            for (int rank : as_ranks)
                e.rules.push_back({nd.row, nd.col, rank, ForwardingTables::Action::DeliverAs});
            for (int j = 0; j < cfg->n; ++j)
                if (j != nd.col)
                    e.rules.push_back({nd.row, j, -1, ForwardingTables::Action::RowDirect});
            for (int i = 0; i < cfg->m; ++i)
                if (i != nd.row)
                    e.rules.push_back({i, nd.col, -1, ForwardingTables::Action::ColDirect});
            e.rules.push_back({-1, -1, -1, ForwardingTables::Action::Diagonal});
            ft.eps.emplace(v, std::move(e));
        }
    }
    return ft;
}

namespace {

struct WalkContext {
    const Topology& topo;
    const ForwardingTables& ft;
    const FailureSet* failures;  // nullptr: nothing is dead
    std::set<int32_t> visited;

    bool live_link(int32_t l) const { return !failures || !failures->link_dead(l); }
    bool live_node(int32_t v) const { return !failures || !failures->node_dead(v); }
    bool usable(int32_t link) const {
        const Link& l = topo.link(link);
        return live_link(link) && live_node(l.a) && live_node(l.b);
    }
    int32_t peer_of(int32_t link, int32_t from) const {
        const Link& l = topo.link(link);
        return l.a == from ? l.b : l.a;
    }
    std::vector<int32_t> filter(const std::vector<int32_t>& cands, int32_t from) const {
        std::vector<int32_t> out;
        for (int32_t l : cands)
            if (usable(l) && !visited.count(peer_of(l, from))) out.push_back(l);
        return out;
    }
};

int32_t pick(const std::vector<int32_t>& cands, uint64_t h, uint64_t salt) {
    return cands[stable_mix(h, salt) % cands.size()];
}

// Plain BFS over the surviving graph; transits switches only (hosts are
// leaves on every topology this walk runs on).
RoutedPath survivor_bfs(const WalkContext& ctx, int32_t src_host, int32_t dst_host) {
    const Topology& t = ctx.topo;
    std::vector<int32_t> par_node(t.node_count(), -1), par_link(t.node_count(), -1);
    std::vector<char> seen(t.node_count(), 0);
    std::queue<int32_t> q;
    seen[src_host] = 1;
    q.push(src_host);
    while (!q.empty() && !seen[dst_host]) {
        int32_t u = q.front();
        q.pop();
        if (t.node(u).kind == NodeKind::Host && u != src_host) continue;
        for (const auto& inc : t.neighbors(u)) {
            if (!ctx.usable(inc.link) || seen[inc.peer]) continue;
            seen[inc.peer] = 1;
            par_node[inc.peer] = u;
            par_link[inc.peer] = inc.link;
            q.push(inc.peer);
        }
    }
    if (!seen[dst_host]) throw NoRoute("src and dst are disconnected by the failures");
    RoutedPath p;
    p.scheme = Scheme::Modric;
    for (int32_t v = dst_host; v != -1; v = par_node[v]) {
        p.nodes.push_back(v);
        if (par_link[v] != -1) p.links.push_back(par_link[v]);
        if (v == src_host) break;
    }
    std::reverse(p.nodes.begin(), p.nodes.end());
    std::reverse(p.links.begin(), p.links.end());
    return p;
}

RoutedPath table_walk(const Topology& topo, const ForwardingTables& ft, int32_t src_host,
                      int32_t dst_host, uint64_t flow_id, const FailureSet* failures) {
    if (src_host == dst_host) throw ConstraintViolation("src and dst must differ");
    if (topo.node(src_host).kind != NodeKind::Host || topo.node(dst_host).kind != NodeKind::Host)
        throw ConstraintViolation("route endpoints must be hosts");
    WalkContext ctx{topo, ft, failures, {}};
    if (!ctx.live_node(src_host) || !ctx.live_node(dst_host))
        throw NoRoute("an endpoint host is marked dead");
    const AddrFields dst = ft.host_fields[dst_host];
    const uint64_t h = flow_hash(ft.host_addr[src_host], ft.host_addr[dst_host], flow_id);

    RoutedPath path;
    path.scheme = Scheme::Modric;
    path.nodes.push_back(src_host);
    ctx.visited.insert(src_host);
    int32_t cur = src_host;
    auto advance = [&](int32_t link) {
        int32_t nxt = ctx.peer_of(link, cur);
        path.links.push_back(link);
        path.nodes.push_back(nxt);
        ctx.visited.insert(nxt);
        cur = nxt;
    };
    // src host's single access link
    {
        const auto& inc = topo.neighbors(src_host);
        if (inc.empty() || !ctx.usable(inc[0].link))
            throw NoRoute("source host has no live access link");
        advance(inc[0].link);
    }
    for (int hop = 0; hop < 40; ++hop) {
        if (cur == dst_host) return path;
        const NodeRef& nd = topo.node(cur);
        std::vector<int32_t> cands;
        uint64_t salt = 0;
        if (nd.kind == NodeKind::AccessSwitch) {
            auto it = ft.as.find(cur);
            if (it == ft.as.end()) break;
            const auto& entry = it->second;
            const ForwardingTables::Rule* rule = nullptr;
            for (const auto& r : entry.rules)
                if (r.matches(dst)) {
                    rule = &r;
                    break;
                }
            if (rule->action == ForwardingTables::Action::DeliverHost) {
                auto hit = entry.host_links.find(dst.host);
                if (hit == entry.host_links.end() || !ctx.usable(hit->second))
                    throw NoRoute("destination host link unavailable");
                advance(hit->second);
                continue;
            }
            cands = ctx.filter(entry.uplinks, cur);
            salt = 0xA5;
        } else if (nd.kind == NodeKind::Eps) {
            auto it = ft.eps.find(cur);
            if (it == ft.eps.end()) break;
            const auto& entry = it->second;
            const ForwardingTables::Rule* rule = nullptr;
            for (const auto& r : entry.rules)
                if (r.matches(dst)) {
                    rule = &r;
                    break;
                }
            auto toward = [&](int trow, int tcol) -> std::vector<int32_t> {
                auto tit = entry.toward_container.find({trow, tcol});
                if (tit == entry.toward_container.end()) return {};
                return ctx.filter(tit->second, cur);
            };
            switch (rule->action) {
                case ForwardingTables::Action::DeliverAs: {
                    auto ait = entry.toward_as.find(dst.as_rank);
                    if (ait != entry.toward_as.end()) cands = ctx.filter(ait->second, cur);
                    salt = 0xDE;
                    break;
                }
                case ForwardingTables::Action::RowDirect:
                    cands = toward(nd.row, dst.col);
                    salt = stable_mix(nd.row, dst.col);
                    break;
                case ForwardingTables::Action::ColDirect:
                    cands = toward(dst.row, nd.col);
                    salt = stable_mix(dst.row, nd.col);
                    break;
                case ForwardingTables::Action::Diagonal: {
                    std::vector<int32_t> row_b = toward(nd.row, dst.col);
                    std::vector<int32_t> col_b = toward(dst.row, nd.col);
                    // direction choice is position-independent: same hash bit
                    // at every EPS of the container, so an intra-EPSC first
                    // hop keeps the direction
                    bool col_first = (h >> 32) & 1;
                    if (col_first && !col_b.empty())
                        cands = std::move(col_b), salt = stable_mix(dst.row, nd.col);
                    else if (!row_b.empty())
                        cands = std::move(row_b), salt = stable_mix(nd.row, dst.col);
                    else
                        cands = std::move(col_b), salt = stable_mix(dst.row, nd.col);
                    break;
                }
                default:
                    break;
            }
        } else {
            break;  // walked into a host that is not dst
        }
        if (cands.empty()) {
            if (!failures) throw NoRoute("no forwarding candidate (unaddressed destination?)");
            // detour: any live intra-container EPS neighbour, then resume
            if (nd.kind == NodeKind::Eps) {
                std::vector<int32_t> detour;
                for (const auto& inc : topo.neighbors(cur)) {
                    const NodeRef& peer = topo.node(inc.peer);
                    if (peer.kind == NodeKind::Eps && peer.row == nd.row && peer.col == nd.col &&
                        ctx.usable(inc.link) && !ctx.visited.count(inc.peer))
                        detour.push_back(inc.link);
                }
                if (!detour.empty()) {
                    advance(pick(detour, h, 0xF00D + hop));
                    continue;
                }
            }
            return survivor_bfs(ctx, src_host, dst_host);
        }
        advance(pick(cands, h, salt));
    }
    if (!failures)
        throw std::logic_error("modric table walk did not converge");
    return survivor_bfs(ctx, src_host, dst_host);
}

}  // namespace

RoutedPath route(const Topology& topo, const ForwardingTables& ft, int32_t src_host,
                 int32_t dst_host, uint64_t flow_id) {
    return table_walk(topo, ft, src_host, dst_host, flow_id, nullptr);
}

RoutedPath reroute(const Topology& topo, const ForwardingTables& ft, const FailureSet& failures,
                   int32_t src_host, int32_t dst_host, uint64_t flow_id) {
    return table_walk(topo, ft, src_host, dst_host, flow_id, &failures);
}

BaselineRouter::BaselineRouter(const Topology& topo, FailureSet failures)
    : topo_(topo), failures_(std::move(failures)) {}

const std::vector<int>& BaselineRouter::dist_to(int32_t dst) const {
    auto it = dist_memo_.find(dst);
    if (it != dist_memo_.end()) return it->second;
    std::vector<int> dist(topo_.node_count(), -1);
    std::queue<int32_t> q;
    dist[dst] = 0;
    q.push(dst);
    while (!q.empty()) {
        int32_t u = q.front();
        q.pop();
        for (const auto& inc : topo_.neighbors(u)) {
            const Link& l = topo_.link(inc.link);
            if (failures_.link_dead(inc.link) || failures_.node_dead(l.a) ||
                failures_.node_dead(l.b))
                continue;
            if (dist[inc.peer] >= 0) continue;
            dist[inc.peer] = dist[u] + 1;
            q.push(inc.peer);
        }
    }
    return dist_memo_.emplace(dst, std::move(dist)).first->second;
}

RoutedPath BaselineRouter::route(Scheme scheme, int32_t src_host, int32_t dst_host,
                                 uint64_t flow_id) const {
    (void)flow_id;  // EcmpOnly deliberately bundles per attachment-switch pair
    if (src_host == dst_host) throw ConstraintViolation("src and dst must differ");
    if (failures_.node_dead(src_host) || failures_.node_dead(dst_host))
        throw NoRoute("an endpoint host is marked dead");
    const std::vector<int>& dist = dist_to(dst_host);
    if (dist[src_host] < 0) throw NoRoute("no surviving path");
    auto first_switch = [this](int32_t host) {
        int32_t best = -1;
        for (const auto& inc : topo_.neighbors(host))
            if (topo_.node(inc.peer).kind != NodeKind::Host)
                best = best < 0 ? inc.peer : std::min(best, inc.peer);
        return best;
    };
    const uint64_t pair_key =
        stable_mix(static_cast<uint64_t>(first_switch(src_host)) + 1,
                   static_cast<uint64_t>(first_switch(dst_host)) + 1);
    RoutedPath path;
    path.scheme = scheme;
    path.nodes.push_back(src_host);
    int32_t cur = src_host;
    while (cur != dst_host) {
        struct Cand {
            NodeRef ref;
            int32_t link;
            int32_t peer;
        };
        std::vector<Cand> cands;
        for (const auto& inc : topo_.neighbors(cur)) {
            const Link& l = topo_.link(inc.link);
            if (failures_.link_dead(inc.link) || failures_.node_dead(l.a) ||
                failures_.node_dead(l.b))
                continue;
            if (dist[inc.peer] != dist[cur] - 1) continue;
            cands.push_back({topo_.node(inc.peer), inc.link, inc.peer});
        }
        if (cands.empty()) throw NoRoute("shortest-path walk trapped");  // cannot happen
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            if (a.ref != b.ref) return a.ref < b.ref;
            return a.link < b.link;
        });
        size_t idx = 0;
        if (scheme == Scheme::EcmpOnly)
            idx = stable_mix(pair_key, static_cast<uint64_t>(cur) * 0x9E3779B1ull) % cands.size();
        path.links.push_back(cands[idx].link);
        path.nodes.push_back(cands[idx].peer);
        cur = cands[idx].peer;
    }
    return path;
}

RoutedPath baseline_route(const Topology& topo, Scheme scheme, int32_t src_host,
                          int32_t dst_host, uint64_t flow_id, const FailureSet& failures) {
    return BaselineRouter(topo, failures).route(scheme, src_host, dst_host, flow_id);
}

}  // namespace modric
