#include <cmath>
#include <queue>
#include <random>

#include "doctest.h"
#include "modric/analysis.hpp"
#include "modric/builders.hpp"

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

// test-side oracle: full-graph BFS over every node, including hosts
int bfs_host_diameter(const Topology& t) {
    auto hosts = t.hosts();
    int best = 0;
    for (int32_t src : hosts) {
        std::vector<int> dist(t.node_count(), -1);
        std::queue<int32_t> q;
        dist[src] = 0;
        q.push(src);
        while (!q.empty()) {
            int32_t u = q.front();
            q.pop();
            for (const auto& inc : t.neighbors(u))
                if (dist[inc.peer] < 0) {
                    dist[inc.peer] = dist[u] + 1;
                    q.push(inc.peer);
                }
        }
        for (int32_t dst : hosts) {
            REQUIRE(dist[dst] >= 0);
            best = std::max(best, dist[dst]);
        }
    }
    return best;
}

}  // namespace

TEST_CASE("host diameter: single container") {
    Topology t = build_modric(cfg(1, 1, 1, 2, 1));
    CHECK(host_diameter(t) == 4);  // host-AS-EPS-AS-host
    CHECK(host_diameter(t) == bfs_host_diameter(t));
}

TEST_CASE("host diameter: 3x3 with two EPS layers hits 9") {
    Topology t = build_modric(cfg(3, 3, 2, 4, 8));
    CHECK(host_diameter(t) == 9);
    CHECK(bfs_host_diameter(t) == 9);
}

TEST_CASE("host diameter: bounded by 9 on random valid configs") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 12; ++trial) {
        int m = 1 + rng() % 4, n = 1 + rng() % 4;
        int q = 1 + rng() % 3;
        int x = 1 + rng() % std::max(m + n - 2, 1);
        int y = 1 + rng() % 8;
        Topology t = build_modric(cfg(m, n, q, x, y));
        int d = host_diameter(t);
        CHECK(d <= 9);
        CHECK(d == bfs_host_diameter(t));
    }
}

TEST_CASE("vertex-disjoint paths on a 3x3 build") {
    for (int q : {1, 2}) {
        Topology t = build_modric(cfg(3, 3, q, 4, 2));
        CHECK(vertex_disjoint_paths(t, {NodeKind::AccessSwitch, 0, 0, 4, 0},
                                    {NodeKind::AccessSwitch, 2, 2, 6, 0}) == 4);
        CHECK(vertex_disjoint_paths(t, {NodeKind::AccessSwitch, 0, 0, 5, 0},
                                    {NodeKind::AccessSwitch, 0, 1, 7, 0}) == 4);
        CHECK(vertex_disjoint_paths(t, {0, 0}, {0, 2}) == 4);
        CHECK(vertex_disjoint_paths(t, {0, 0}, {1, 0}) == 4);
        CHECK(vertex_disjoint_paths(t, {0, 0}, {2, 2}) == 8);
        CHECK(vertex_disjoint_paths(t, {1, 0}, {0, 1}) == 8);
    }
}

TEST_CASE("vertex-disjoint paths hold over random small grids") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 4; ++trial) {
        int m = 2 + rng() % 2, n = 2 + rng() % 2;
        int q = 1 + rng() % 2;
        int x = 1 + rng() % std::max(m + n - 2, 1);
        Topology t = build_modric(cfg(m, n, q, x, 2));
        for (int i1 = 0; i1 < m; ++i1)
            for (int j1 = 0; j1 < n; ++j1)
                for (int i2 = 0; i2 < m; ++i2)
                    for (int j2 = 0; j2 < n; ++j2) {
                        if (std::make_pair(i1, j1) >= std::make_pair(i2, j2)) continue;
                        int v = vertex_disjoint_paths(t, {i1, j1}, {i2, j2});
                        CHECK(v == ((i1 == i2 || j1 == j2) ? 4 : 8));
                    }
    }
}

TEST_CASE("vertex-disjoint paths: degenerate two-switch graph") {
    std::vector<NodeRef> nodes = {{NodeKind::AccessSwitch, 0, 0, 4, 0},
                                  {NodeKind::AccessSwitch, 0, 0, 5, 0}};
    std::vector<Link> links = {{0, 1, LinkClass::S1, 10.0}};
    Topology t("custom", std::monostate{}, nodes, links);
    CHECK(vertex_disjoint_paths(t, nodes[0], nodes[1]) == 1);
}

TEST_CASE("container bisection: brute force equals formula") {
    for (int x : {2, 4, 6})
        for (int q : {1, 2, 3}) {
            CutResult r = container_bisection_brute(x, q, 10.0);
            CHECK(r.capacity_gbps == doctest::Approx(container_bisection_formula(x, q, 10.0)));
            // per-class balance: 2 EPSCs and x/2 ASes on each side
            int eps_a = 0, as_a = 0;
            for (const auto& n : r.partition_a) {
                eps_a += n.rfind("epsc:", 0) == 0;
                as_a += n.rfind("as:", 0) == 0;
            }
            CHECK(eps_a == 2);
            CHECK(as_a == x / 2);
        }
    CHECK(container_bisection_formula(4, 1, 10.0) == doctest::Approx(120.0));
    CHECK(container_bisection_formula(2, 2, 10.0) == doctest::Approx(120.0));
    CHECK_THROWS_AS(container_bisection_brute(18, 2, 10.0), TooLarge);
}

TEST_CASE("network bisection structured cases") {
    // m,n even
    auto b22 = network_bisection_structured(cfg(2, 2, 1, 2, 2));
    CHECK(*b22.horizontal_gbps == doctest::Approx(2 * 4 * 10.0));
    CHECK(b22.bisection_gbps == doctest::Approx(80.0));
    // m even, n even, rectangular
    auto b24 = network_bisection_structured(cfg(2, 4, 1, 2, 2));
    CHECK(*b24.horizontal_gbps == doctest::Approx(160.0));
    CHECK(*b24.vertical_gbps == doctest::Approx(320.0));
    CHECK(b24.bisection_gbps == doctest::Approx(160.0));
    CHECK(container_level_min_bisection(cfg(2, 4, 1, 2, 2)) == doctest::Approx(160.0));
    // m odd, n even: both cuts reported
    auto b34 = network_bisection_structured(cfg(3, 4, 1, 2, 2));
    CHECK(*b34.vertical_gbps == doctest::Approx(3 * 16 * 10.0));        // Eq. (1)
    CHECK(*b34.horizontal_gbps == doctest::Approx(4 * (9 + 4) * 10.0));  // Eq. (2)
    CHECK(b34.bisection_gbps == doctest::Approx(480.0));
    CHECK(container_level_min_bisection(cfg(3, 4, 1, 2, 2)) == doctest::Approx(480.0));
    // m,n odd: middle container bisected
    auto b33 = network_bisection_structured(cfg(3, 3, 1, 2, 2));
    CHECK(*b33.horizontal_gbps == doctest::Approx((27 + 4 + 4 + 8) * 10.0));
    // row bisection, even and odd
    CHECK(network_bisection_structured(cfg(1, 2, 1, 1, 2)).row_bisection_gbps ==
          doctest::Approx(4 * 10.0));
    CHECK(network_bisection_structured(cfg(1, 3, 1, 1, 2)).row_bisection_gbps ==
          doctest::Approx((4 + 4 + 2 * 1 + 4 * 1) * 10.0));
}

TEST_CASE("network bisection monotone under parity-preserving growth") {
    // the cut grows with the grid when parity is preserved; an odd->even step
    // can shrink it (e.g. 6x3 at 108C vs 6x4 at 96C) because the even side
    // unlocks the cheap whole-container halving
    for (int m = 2; m <= 6; ++m)
        for (int n = 2; n <= 6; ++n) {
            double here = network_bisection_structured(cfg(m, n, 1, 2, 2)).bisection_gbps;
            CHECK(network_bisection_structured(cfg(m, n + 2, 1, 2, 2)).bisection_gbps >= here);
            CHECK(network_bisection_structured(cfg(m + 2, n, 1, 2, 2)).bisection_gbps >= here);
        }
}

TEST_CASE("port census formulas vs graph counts") {
    // published maxima
    PortCensus t3 = modric_port_census_max(10, 10, 2, 10.0, 1.0);
    CHECK(t3.s1_ports == 24800);
    CHECK(t3.s2_ports == 72000);
    // fully populated configs: graph equals the Property 4/5 maxima
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 6; ++trial) {
        int m = 1 + rng() % 4, n = 1 + rng() % 4;
        if (m + n < 3) n = 2;
        int q = 1 + rng() % 3;
        ModricConfig c = cfg(m, n, q, m + n - 2, 40);
        PortCensus maxima = modric_port_census_max(m, n, q, 10.0, 1.0);
        PortCensus graph = port_census_from_graph(build_modric(c));
        CHECK(maxima == graph);
        CHECK(modric_port_census_formula(c) == graph);
    }
    // per-config formula also covers partially populated networks
    ModricConfig part = cfg(3, 2, 2, 2, 7);
    CHECK(modric_port_census_formula(part) == port_census_from_graph(build_modric(part)));
    ModricConfig degenerate = cfg(1, 1, 1, 1, 1);
    CHECK(modric_port_census_formula(degenerate) ==
          port_census_from_graph(build_modric(degenerate)));
}

TEST_CASE("port census mdcube and fat-tree") {
    MdcubeParams md{15, 15, 33, 1, 4, 10.0, 1.0};
    PortCensus f = mdcube_port_census_formula(md);
    CHECK(f.hosts == 245025);
    CHECK(f.s2_ports == 490050);
    CHECK(f.s1_ports == 25200);
    MdcubeParams small{2, 4, 4, 1, 4, 10.0, 1.0};
    PortCensus g = port_census_from_graph(build_mdcube(small));
    CHECK(g == mdcube_port_census_formula(small));
    PortCensus ft = fattree_port_census_formula(66);
    CHECK(ft.hosts == 71874);
    CHECK(ft.s2_ports == 359370);
    FatTreeParams p;
    p.radix = 6;
    CHECK(port_census_from_graph(build_fattree(p)) == fattree_port_census_formula(6));
}

TEST_CASE("cable length formula vs per-link sum") {
    ModricConfig c22 = cfg(2, 2, 1, 2, 2);
    c22.geometry = {6.1, 2.44, 1.0, 1.0};
    CHECK(cable_length(c22, CableMode::Formula) == doctest::Approx(84.32));
    CHECK(cable_length(c22, CableMode::PerLink) == doctest::Approx(84.32));
    ModricConfig c11 = cfg(1, 1, 1, 1, 1);
    CHECK(cable_length(c11, CableMode::Formula) == doctest::Approx(0.0));
    CHECK(cable_length(c11, CableMode::PerLink) == doctest::Approx(0.0));
    for (int m = 1; m <= 6; ++m)
        for (int n = 1; n <= 6; ++n) {
            ModricConfig c = cfg(m, n, 1, std::max(m + n - 2, 1), 1);
            double f = cable_length(c, CableMode::Formula);
            double p = cable_length(c, CableMode::PerLink);
            CHECK(std::abs(f - p) <= 1e-9 * std::max(1.0, f));
        }
    ModricConfig big = cfg(10, 10, 1, 1, 1);
    CHECK(cable_length(big, CableMode::Formula) ==
          doctest::Approx(cable_length(big, CableMode::PerLink)).epsilon(1e-12));
    ModricConfig bad = cfg(2, 2, 1, 2, 2);
    bad.geometry.length_m = 0.0;
    CHECK_THROWS_AS(cable_length(bad, CableMode::Formula), MissingGeometry);
}
