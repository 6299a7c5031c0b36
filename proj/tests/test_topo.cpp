#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "modric/builders.hpp"
#include "modric/config.hpp"

using namespace modric;

namespace {

ModricConfig cfg(int m, int n, int q, int x, int y, double C = 10.0, double c = 1.0) {
    ModricConfig out;
    out.m = m;
    out.n = n;
    out.q = q;
    out.x = x;
    out.y = y;
    out.cap_s1_gbps = C;
    out.cap_s2_gbps = c;
    return out;
}

int count_kind(const Topology& t, NodeKind k) {
    return static_cast<int>(t.nodes_of_kind(k).size());
}

}  // namespace

TEST_CASE("modric node counts") {
    Topology t = build_modric(cfg(2, 3, 1, 3, 4));
    // independent oracle: 6 containers of 12 hosts + 3 ASes + 4 EPSes
    CHECK(t.node_count() == 6 * (12 + 3 + 4));
    CHECK(count_kind(t, NodeKind::Host) == 72);
    CHECK(count_kind(t, NodeKind::AccessSwitch) == 18);
    CHECK(count_kind(t, NodeKind::Eps) == 24);
    CHECK(t.node_count() == cfg(2, 3, 1, 3, 4).nodes());
}

TEST_CASE("modric degenerate single container") {
    Topology t = build_modric(cfg(1, 1, 1, 1, 1));
    CHECK(t.node_count() == 4 + 1 + 1);
    for (const Link& l : t.links()) {
        const NodeRef& a = t.node(l.a);
        const NodeRef& b = t.node(l.b);
        CHECK(a.row == b.row);
        CHECK(a.col == b.col);
    }
    CHECK(t.connected());
}

TEST_CASE("modric full-scale host count") {
    ModricConfig c = cfg(10, 10, 2, 18, 40, 10.0, 1.0);
    CHECK(c.hosts() == 72000);
    // the builder agrees without materializing all hosts twice
    Topology t = build_modric(c);
    CHECK(count_kind(t, NodeKind::Host) == 72000);
}

TEST_CASE("modric invariants on the built graph") {
    ModricConfig c = cfg(3, 2, 2, 3, 6);
    Topology t = build_modric(c);
    ValidationReport rep = validate(t);
    CHECK(rep.passed());
    // per-AS downlink aggregate within uplink aggregate
    for (int32_t v = 0; v < t.node_count(); ++v) {
        if (t.node(v).kind != NodeKind::AccessSwitch) continue;
        int hosts = 0, ups = 0;
        for (const auto& inc : t.neighbors(v)) {
            hosts += t.node(inc.peer).kind == NodeKind::Host;
            ups += t.node(inc.peer).kind == NodeKind::Eps;
        }
        CHECK(hosts * c.cap_s2_gbps <= 4 * c.cap_s1_gbps);
        CHECK(ups == 4);
    }
    // per-EPSC inter-container links: m+n-2 when x <= m+n-2
    std::map<std::tuple<int, int, int>, int> inter;
    for (const Link& l : t.links()) {
        const NodeRef& a = t.node(l.a);
        const NodeRef& b = t.node(l.b);
        if (a.kind != NodeKind::Eps || b.kind != NodeKind::Eps) continue;
        if (a.row == b.row && a.col == b.col) continue;
        inter[{a.row, a.col, a.rank}]++;
        inter[{b.row, b.col, b.rank}]++;
    }
    for (const auto& [key, cnt] : inter) CHECK(cnt == c.m + c.n - 2);
}

TEST_CASE("modric determinism") {
    Topology a = build_modric(cfg(2, 2, 2, 2, 3));
    Topology b = build_modric(cfg(2, 2, 2, 2, 3));
    CHECK(a.to_edge_list() == b.to_edge_list());
    CHECK(a.structure_hash() == b.structure_hash());
}

TEST_CASE("modric config constraints") {
    CHECK_THROWS_AS(build_modric(cfg(2, 2, 1, 2, 41)), ConstraintViolation);  // y > 4C/c
    ModricConfig no_plan = cfg(2, 2, 1, 4, 4);
    no_plan.extra_links = ExtraLinkPolicy::None;
    CHECK_THROWS_AS(build_modric(no_plan), ConstraintViolation);  // x > m+n-2, no plan
    // single container: the inter-container constraint is moot
    CHECK_NOTHROW(build_modric(cfg(1, 1, 1, 3, 4)));
    ModricConfig tight = cfg(2, 2, 1, 2, 4);
    tight.eps_port_budget = 4;  // mesh(0)+3 + 2 AS + 2 inter = 7 needed
    CHECK_THROWS_AS(build_modric(tight), ConstraintViolation);
}

TEST_CASE("modric extra-link plan tops every EPSC up to x") {
    ModricConfig c = cfg(2, 2, 1, 4, 4);  // x=4 > m+n-2=2
    Topology t = build_modric(c);
    REQUIRE(validate(t).passed());
    std::map<std::tuple<int, int, int>, int> inter;
    for (const Link& l : t.links()) {
        const NodeRef& a = t.node(l.a);
        const NodeRef& b = t.node(l.b);
        if (a.kind != NodeKind::Eps || b.kind != NodeKind::Eps) continue;
        if (a.row == b.row && a.col == b.col) continue;
        inter[{a.row, a.col, a.rank}]++;
        inter[{b.row, b.col, b.rank}]++;
    }
    for (const auto& [key, cnt] : inter) CHECK(cnt >= 4);
}

TEST_CASE("fat-tree structure") {
    FatTreeParams p;
    p.radix = 4;
    Topology t = build_fattree(p);
    CHECK(count_kind(t, NodeKind::Host) == 16);
    CHECK(static_cast<int>(t.switches().size()) == 20);
    CHECK(t.connected());
    p.radix = 8;
    CHECK(count_kind(build_fattree(p), NodeKind::Host) == 128);
    p.radix = 5;
    CHECK_THROWS_AS(build_fattree(p), InvalidRadix);
    p.radix = 2;
    CHECK_THROWS_AS(build_fattree(p), InvalidRadix);
}

TEST_CASE("mdcube structure") {
    MdcubeParams p{2, 4, 4, 1, 4, 10.0, 1.0};
    Topology t = build_mdcube(p);
    CHECK(count_kind(t, NodeKind::Host) == 128);
    // 8 switches per container
    CHECK(static_cast<int>(t.switches().size()) == 8 * 8);
    CHECK(t.connected());
    // every host has one port per BCube level
    for (int32_t h : t.hosts()) CHECK(t.neighbors(h).size() == 2);
    // 4 parallel links between adjacent containers
    std::map<std::pair<std::pair<int, int>, std::pair<int, int>>, int> pairs;
    for (const Link& l : t.links()) {
        const NodeRef& a = t.node(l.a);
        const NodeRef& b = t.node(l.b);
        if (l.cls != LinkClass::S1) continue;
        auto ca = std::make_pair(a.row, a.col), cb = std::make_pair(b.row, b.col);
        if (cb < ca) std::swap(ca, cb);
        pairs[{ca, cb}]++;
    }
    for (const auto& [key, cnt] : pairs) CHECK(cnt == 4);
}

TEST_CASE("mdcube adjacent pair count") {
    // m x n grid: same-row pairs m*C(n,2), same-column pairs n*C(m,2)
    MdcubeParams p{2, 4, 4, 1, 4, 10.0, 1.0};
    Topology t = build_mdcube(p);
    std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> pairs;
    for (const Link& l : t.links()) {
        if (l.cls != LinkClass::S1) continue;
        const NodeRef& a = t.node(l.a);
        const NodeRef& b = t.node(l.b);
        auto ca = std::make_pair(a.row, a.col), cb = std::make_pair(b.row, b.col);
        if (cb < ca) std::swap(ca, cb);
        pairs.insert({ca, cb});
    }
    CHECK(pairs.size() == 2u * 6 + 4u * 1);
}

TEST_CASE("mdcube degenerate and unsupported") {
    MdcubeParams p{1, 1, 2, 1, 4, 10.0, 1.0};
    Topology t = build_mdcube(p);
    CHECK(count_kind(t, NodeKind::Host) == 4);
    CHECK(static_cast<int>(t.switches().size()) == 4);
    for (const Link& l : t.links()) CHECK(l.cls == LinkClass::S2);
    p.k = 2;
    CHECK_THROWS_AS(build_mdcube(p), Unsupported);
}

TEST_CASE("jellyfish regular graph") {
    JellyfishParams p;
    p.switches = 16;
    p.ports_per_switch = 12;
    p.hosts_per_switch = 8;
    p.seed = 1;
    Topology t = build_jellyfish(p);
    CHECK(count_kind(t, NodeKind::Host) == 128);
    for (int32_t s : t.switches()) {
        int sw_deg = 0;
        for (const auto& inc : t.neighbors(s))
            sw_deg += t.node(inc.peer).kind != NodeKind::Host;
        CHECK(sw_deg == 4);
    }
    CHECK(t.connected());
    // same seed: byte-identical
    CHECK(build_jellyfish(p).to_edge_list() == t.to_edge_list());
    JellyfishParams tiny;
    tiny.switches = 2;
    tiny.ports_per_switch = 3;
    tiny.hosts_per_switch = 2;
    Topology t2 = build_jellyfish(tiny);
    int s1_links = 0;
    for (const Link& l : t2.links()) s1_links += l.cls == LinkClass::S1;
    CHECK(s1_links == 1);
    JellyfishParams bad = tiny;
    bad.switches = 3;  // degree 1 * 3 switches is odd
    CHECK_THROWS_AS(build_jellyfish(bad), InfeasibleDegree);
    bad.switches = 2;
    bad.ports_per_switch = 2;
    bad.hosts_per_switch = 2;
    CHECK_THROWS_AS(build_jellyfish(bad), InfeasibleDegree);
}

TEST_CASE("expand rebuild actions") {
    Topology base = build_modric(cfg(2, 2, 1, 2, 3));
    ExpandAction add_col;
    add_col.kind = ExpandAction::AddColumn;
    Topology grown = expand(base, add_col);
    Topology fresh = build_modric(cfg(2, 3, 1, 2, 3));
    CHECK(grown.to_edge_list() == fresh.to_edge_list());
    CHECK(isomorphic(grown, fresh));
    // existing node ids survive
    for (const NodeRef& nd : base.nodes()) CHECK(grown.find(nd) >= 0);

    ExpandAction add_row;
    add_row.kind = ExpandAction::AddRow;
    Topology taller = expand(build_modric(cfg(1, 3, 1, 2, 2)), add_row);
    CHECK(validate(taller).passed());
    CHECK(taller.to_edge_list() == build_modric(cfg(2, 3, 1, 2, 2)).to_edge_list());

    ExpandAction layer;
    layer.kind = ExpandAction::AddEpsLayer;
    Topology deeper = expand(base, layer);
    CHECK(deeper.to_edge_list() == build_modric(cfg(2, 2, 2, 2, 3)).to_edge_list());
}

TEST_CASE("expand patch actions") {
    Topology base = build_modric(cfg(2, 2, 1, 1, 3));
    ExpandAction add_as;
    add_as.kind = ExpandAction::AddAs;
    add_as.container_row = 0;
    add_as.container_col = 1;
    Topology more = expand(base, add_as);
    CHECK(more.node_count() == base.node_count() + 1);
    int32_t asn = more.require({NodeKind::AccessSwitch, 0, 1, 5, 0});
    CHECK(more.neighbors(asn).size() == 4);

    ExpandAction none;
    none.kind = ExpandAction::AddHosts;
    none.as_ref = {NodeKind::AccessSwitch, 0, 0, 4, 0};
    none.count = 0;
    CHECK(expand(base, none).to_edge_list() == base.to_edge_list());

    none.count = 2;
    Topology hosts = expand(base, none);
    CHECK(hosts.node_count() == base.node_count() + 2);
    none.count = 50;  // blows past 4C/c = 40
    CHECK_THROWS_AS(expand(base, none), ConstraintViolation);

    CHECK_THROWS_AS(expand(build_fattree(FatTreeParams{}), add_as), NotModric);
}

TEST_CASE("validate flags targeted mutations") {
    Topology good = build_modric(cfg(2, 2, 1, 2, 2));
    REQUIRE(validate(good).passed());

    // delete one AS uplink
    std::vector<Link> links = good.links();
    auto cut = std::find_if(links.begin(), links.end(), [&](const Link& l) {
        return (good.node(l.a).kind == NodeKind::AccessSwitch &&
                good.node(l.b).kind == NodeKind::Eps) ||
               (good.node(l.b).kind == NodeKind::AccessSwitch &&
                good.node(l.a).kind == NodeKind::Eps);
    });
    REQUIRE(cut != links.end());
    links.erase(cut);
    Topology broken("modric", *good.modric_config(), good.nodes(), links);
    ValidationReport rep = validate(broken);
    CHECK_FALSE(rep.passed());
    bool uplink_failed = false;
    for (const auto& c : rep.checks)
        if (c.name == "as-four-s1-uplinks") uplink_failed = !c.passed;
    CHECK(uplink_failed);

    // duplicate a host link
    links = good.links();
    auto host_link = std::find_if(links.begin(), links.end(), [&](const Link& l) {
        return l.cls == LinkClass::S2;
    });
    links.push_back(*host_link);
    Topology doubled("modric", *good.modric_config(), good.nodes(), links);
    rep = validate(doubled);
    CHECK_FALSE(rep.passed());
    bool host_failed = false;
    for (const auto& c : rep.checks)
        if (c.name == "host-single-s2-link") host_failed = !c.passed;
    CHECK(host_failed);
}

TEST_CASE("edge list format") {
    Topology t = build_modric(cfg(1, 1, 1, 1, 1));
    std::string edges = t.to_edge_list();
    CHECK(edges.find("host:0:0:0 as:0:0:4 S2 1\n") != std::string::npos);
    CHECK(edges.find("eps:0:0:0:0 eps:0:0:1:0 S1 10\n") != std::string::npos);
    std::string dot = t.to_dot();
    CHECK(dot.find("graph topology {") == 0);
}

TEST_CASE("config file parsing") {
    std::string text =
        "# comment\n[modric]\nm=2\nn=3\nq = 1\nx=3\ny=4\ncap_s1_gbps=10\nextra_links=none\n";
    ModricConfig c;
    apply_modric_section(parse_config_text(text), c);
    CHECK(c.m == 2);
    CHECK(c.n == 3);
    CHECK(c.x == 3);
    CHECK(c.extra_links == ExtraLinkPolicy::None);
    CHECK_THROWS_AS(apply_modric_section(parse_config_text("[modric]\nbogus=1\n"), c),
                    ConstraintViolation);
    CHECK_THROWS_AS(parse_config_text("[modric\nm=1\n"), ConstraintViolation);
}

TEST_CASE("eps degrees follow the construction arithmetic") {
    ModricConfig c = cfg(3, 2, 2, 3, 4);
    Topology t = build_modric(c);
    long long container_s1_degree = 0;
    for (int32_t v = 0; v < t.node_count(); ++v) {
        const NodeRef& nd = t.node(v);
        if (nd.kind == NodeKind::Eps) {
            if (nd.row == 0 && nd.col == 0) container_s1_degree += t.neighbors(v).size();
            int as_here = 0, inter_here = 0;
            for (const auto& inc : t.neighbors(v)) {
                const NodeRef& peer = t.node(inc.peer);
                as_here += peer.kind == NodeKind::AccessSwitch;
                inter_here += peer.kind == NodeKind::Eps &&
                              (peer.row != nd.row || peer.col != nd.col);
            }
            CHECK(static_cast<int>(t.neighbors(v).size()) ==
                  (c.q - 1) + 3 + as_here + inter_here);
        }
        if (nd.kind == NodeKind::AccessSwitch && nd.row == 0 && nd.col == 0)
            container_s1_degree += 4;  // AS-side S1 ports
    }
    // per-container S1 ports: 4q(q-1) + 12q + 8x + 4(m+n-2)
    CHECK(container_s1_degree ==
          4 * c.q * (c.q - 1) + 12 * c.q + 8 * c.x + 4 * (c.m + c.n - 2));
}

TEST_CASE("random configs validate clean") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 8; ++trial) {
        int m = 1 + rng() % 4, n = 1 + rng() % 4;
        int q = 1 + rng() % 3;
        int x = 1 + rng() % std::max(m + n - 2, 1);
        int y = 1 + rng() % 40;
        Topology t = build_modric(cfg(m, n, q, x, y));
        CHECK(validate(t).passed());
    }
}
