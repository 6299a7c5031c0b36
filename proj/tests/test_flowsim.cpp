#include <algorithm>
#include <random>
#include <map>
#include <set>

#include "doctest.h"
#include "modric/builders.hpp"
#include "modric/flowsim.hpp"

using namespace modric;

namespace {

// hand-rolled line topology for allocator tests: hosts at the ends of a
// chain of access switches
Topology line_topology(const std::vector<double>& caps_mbps) {
    std::vector<NodeRef> nodes;
    std::vector<Link> links;
    int n = static_cast<int>(caps_mbps.size());
    for (int i = 0; i <= n; ++i) nodes.push_back({NodeKind::AccessSwitch, 0, i, 4, 0});
    for (int i = 0; i < n; ++i)
        links.push_back({i, i + 1, LinkClass::S1, caps_mbps[i] / 1000.0});
    return Topology("custom", std::monostate{}, nodes, links);
}

RoutedPath path_over(const Topology& t, std::vector<int32_t> nodes) {
    RoutedPath p;
    p.nodes = std::move(nodes);
    for (size_t i = 0; i + 1 < p.nodes.size(); ++i) {
        for (const auto& inc : t.neighbors(p.nodes[i]))
            if (inc.peer == p.nodes[i + 1]) {
                p.links.push_back(inc.link);
                break;
            }
    }
    return p;
}

ModricConfig small_exp_cfg() {
    ModricConfig c;
    c.m = 2;
    c.n = 4;
    c.q = 1;
    c.x = 4;
    c.y = 4;
    c.cap_s1_gbps = 0.4;
    c.cap_s2_gbps = 0.1;
    return c;
}

}  // namespace

TEST_CASE("max-min fair allocation") {
    SUBCASE("uncontended flow reaches its demand") {
        Topology t = line_topology({1000.0});
        std::vector<FlowDemand> d = {{0, 1, 100.0, 0}};
        std::vector<RoutedPath> p = {path_over(t, {0, 1})};
        auto res = allocate_maxmin(t, d, p, {true});
        CHECK(res[0].rate_mbps == doctest::Approx(100.0));
    }
    SUBCASE("two flows split a shared link") {
        Topology t = line_topology({100.0});
        std::vector<FlowDemand> d = {{0, 1, 100.0, 0}, {0, 1, 100.0, 1}};
        std::vector<RoutedPath> p = {path_over(t, {0, 1}), path_over(t, {0, 1})};
        auto res = allocate_maxmin(t, d, p, {true, true});
        CHECK(res[0].rate_mbps == doctest::Approx(50.0));
        CHECK(res[1].rate_mbps == doctest::Approx(50.0));
    }
    SUBCASE("shared 100 link with a 40 side constraint") {
        // all three flows share the 100 link; flow 0 also crosses a 40 link.
        // progressive filling freezes everyone at the 100/3 bottleneck.
        Topology t = line_topology({100.0, 40.0});
        std::vector<FlowDemand> d = {{0, 2, 100.0, 0}, {0, 1, 100.0, 1}, {0, 1, 100.0, 2}};
        std::vector<RoutedPath> p = {path_over(t, {0, 1, 2}), path_over(t, {0, 1}),
                                     path_over(t, {0, 1})};
        auto res = allocate_maxmin(t, d, p, {true, true, true});
        for (int f = 0; f < 3; ++f) CHECK(res[f].rate_mbps == doctest::Approx(100.0 / 3));
    }
    SUBCASE("demand caps release headroom") {
        Topology t = line_topology({100.0});
        std::vector<FlowDemand> d = {{0, 1, 20.0, 0}, {0, 1, 100.0, 1}};
        std::vector<RoutedPath> p = {path_over(t, {0, 1}), path_over(t, {0, 1})};
        auto res = allocate_maxmin(t, d, p, {true, true});
        CHECK(res[0].rate_mbps == doctest::Approx(20.0));
        CHECK(res[1].rate_mbps == doctest::Approx(80.0));
    }
    SUBCASE("unrouted flows score zero") {
        Topology t = line_topology({100.0});
        std::vector<FlowDemand> d = {{0, 1, 100.0, 0}};
        auto res = allocate_maxmin(t, d, {RoutedPath{}}, {false});
        CHECK(res[0].rate_mbps == 0.0);
        CHECK_FALSE(res[0].routed);
    }
}

TEST_CASE("max-min optimality by perturbation") {
    // random small instances: every flow is demand-capped or owns a
    // saturated arc on which it is a maximum-rate flow
    Topology t = line_topology({100.0, 70.0, 120.0, 50.0});
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 30; ++trial) {
        int nf = 2 + rng() % 8;
        std::vector<FlowDemand> d;
        std::vector<RoutedPath> p;
        for (int f = 0; f < nf; ++f) {
            int a = rng() % 4, b = rng() % 4;
            if (a == b) b = (b + 1) % 5;
            int lo = std::min(a, b), hi = std::max(a, b) + 1;
            std::vector<int32_t> nodes;
            for (int v = lo; v <= hi; ++v) nodes.push_back(v);
            d.push_back({nodes.front(), nodes.back(), 30.0 + rng() % 90,
                         static_cast<uint64_t>(f)});
            p.push_back(path_over(t, nodes));
        }
        auto res = allocate_maxmin(t, d, p, std::vector<bool>(nf, true));
        std::map<int32_t, double> arc_load;
        for (int f = 0; f < nf; ++f)
            for (size_t i = 0; i < p[f].links.size(); ++i) {
                int32_t arc = p[f].links[i] * 2 +
                              (t.link(p[f].links[i]).a == p[f].nodes[i] ? 0 : 1);
                arc_load[arc] += res[f].rate_mbps;
            }
        for (int f = 0; f < nf; ++f) {
            if (res[f].rate_mbps >= d[f].demand_mbps - 1e-6) continue;  // demand-capped
            bool has_bottleneck = false;
            for (size_t i = 0; i < p[f].links.size() && !has_bottleneck; ++i) {
                int32_t link = p[f].links[i];
                int32_t arc = link * 2 + (t.link(link).a == p[f].nodes[i] ? 0 : 1);
                double cap = t.link(link).capacity_gbps * 1000.0;
                if (arc_load[arc] >= cap - 1e-6) {
                    // on a saturated arc no other flow may exceed this one
                    double max_rate = 0.0;
                    for (int g = 0; g < nf; ++g)
                        for (size_t k = 0; k < p[g].links.size(); ++k) {
                            int32_t garc = p[g].links[k] * 2 +
                                           (t.link(p[g].links[k]).a == p[g].nodes[k] ? 0 : 1);
                            if (garc == arc) max_rate = std::max(max_rate, res[g].rate_mbps);
                        }
                    if (res[f].rate_mbps >= max_rate - 1e-6) has_bottleneck = true;
                }
            }
            CHECK(has_bottleneck);
        }
    }
}

TEST_CASE("traffic patterns") {
    Topology t = build_modric(small_exp_cfg());
    SUBCASE("all-to-all between two containers") {
        TrafficPattern p;
        p.kind = TrafficPattern::C2CAllToAll;
        p.group_a = 0;
        p.group_b = 7;
        auto flows = gen_traffic(p, t, 1);
        CHECK(flows.size() == 256u);
        std::set<std::pair<int32_t, int32_t>> uniq;
        for (const auto& f : flows) {
            CHECK(f.src != f.dst);
            uniq.insert({f.src, f.dst});
        }
        CHECK(uniq.size() == 256u);
    }
    SUBCASE("one-to-one pairs i-th with i-th") {
        TrafficPattern p;
        p.kind = TrafficPattern::C2COneToOne;
        p.group_a = 0;
        p.group_b = 3;
        auto flows = gen_traffic(p, t, 1);
        CHECK(flows.size() == 16u);
        auto groups = host_groups(t);
        for (size_t i = 0; i < flows.size(); ++i) {
            CHECK(flows[i].src == groups[0][i]);
            CHECK(flows[i].dst == groups[3][i]);
        }
        p.group_b = 0;
        CHECK_THROWS_AS(gen_traffic(p, t, 1), InfeasiblePattern);
    }
    SUBCASE("permutation covers every host once in each role") {
        TrafficPattern p;
        p.kind = TrafficPattern::Permutation;
        auto flows = gen_traffic(p, t, 9);
        CHECK(flows.size() == 128u);  // 64 pairs, both directions
        std::map<int32_t, int> sends, recvs;
        for (const auto& f : flows) {
            sends[f.src]++;
            recvs[f.dst]++;
        }
        CHECK(sends.size() == 128u);
        for (const auto& [h, cnt] : sends) CHECK(cnt == 1);
        for (const auto& [h, cnt] : recvs) CHECK(cnt == 1);
        CHECK(gen_traffic(p, t, 9).size() == flows.size());
        // determinism
        auto again = gen_traffic(p, t, 9);
        for (size_t i = 0; i < flows.size(); ++i) {
            CHECK(again[i].src == flows[i].src);
            CHECK(again[i].dst == flows[i].dst);
        }
    }
    SUBCASE("random peers excludes the log host and itself") {
        TrafficPattern p;
        p.kind = TrafficPattern::RandomPeers;
        p.peers = 4;
        p.exclude_log_host = true;
        auto flows = gen_traffic(p, t, 3);
        auto groups = host_groups(t);
        std::set<int32_t> log_hosts;
        for (const auto& g : groups) log_hosts.insert(g.back());
        CHECK(flows.size() == (128u - 8u) * 4u);
        std::map<int32_t, std::set<int32_t>> peers;
        for (const auto& f : flows) {
            CHECK(log_hosts.count(f.src) == 0);
            CHECK(log_hosts.count(f.dst) == 0);
            CHECK(f.src != f.dst);
            peers[f.src].insert(f.dst);
        }
        for (const auto& [src, ps] : peers) CHECK(ps.size() == 4u);
        p.peers = 0;
        CHECK(gen_traffic(p, t, 3).empty());
        p.peers = 1000;
        CHECK_THROWS_AS(gen_traffic(p, t, 3), InfeasiblePattern);
    }
}

TEST_CASE("failure injection") {
    // fat-tree radix 8 has exactly 5*8^2/4 = 80 switches
    FatTreeParams ftp;
    ftp.radix = 8;
    Topology ft = build_fattree(ftp);
    REQUIRE(ft.switches().size() == 80u);
    CHECK(inject_failures(ft, 0.1, 3).dead_nodes.size() == 8u);

    Topology t = build_modric(small_exp_cfg());  // 8 containers * (4+4) = 64 switches
    CHECK(inject_failures(t, 0.0, 5).dead_nodes.empty());
    FailureSet ten = inject_failures(t, 0.125, 5);
    CHECK(ten.dead_nodes.size() == 8u);  // floor(0.125 * 64)
    FailureSet again = inject_failures(t, 0.125, 5);
    CHECK(again.dead_nodes == ten.dead_nodes);
    // nested growth with the same seed
    FailureSet more = inject_failures(t, 0.25, 5);
    for (int32_t v : ten.dead_nodes) CHECK(more.dead_nodes.count(v) == 1);
    for (int32_t v : more.dead_nodes) CHECK(t.node(v).kind != NodeKind::Host);
    CHECK_THROWS_AS(inject_failures(t, 1.0, 5), ConstraintViolation);
}

TEST_CASE("experiment runner consistency") {
    ExperimentSpec e4;
    e4.experiment = 4;
    e4.repetitions = 3;
    e4.failure_fractions = {0.0};
    auto r4 = run_experiment(e4);
    ExperimentSpec e2;
    e2.experiment = 2;
    e2.repetitions = 3;
    auto r2 = run_experiment(e2);
    // a zero failure fraction reproduces experiment 2 on the same seeds
    REQUIRE(r4.rows.size() == r2.rows.size());
    for (size_t i = 0; i < r2.rows.size(); ++i) {
        CHECK(r4.rows[i].topology == r2.rows[i].topology);
        CHECK(r4.rows[i].mean_per_server_mbps ==
              doctest::Approx(r2.rows[i].mean_per_server_mbps));
    }
}

TEST_CASE("experiment output is byte-deterministic") {
    ExperimentSpec spec;
    spec.experiment = 3;
    spec.repetitions = 2;
    auto a = run_experiment(spec);
    auto b = run_experiment(spec);
    CHECK(results_to_csv(a.rows) == results_to_csv(b.rows));
    CHECK(results_to_json(a, spec) == results_to_json(b, spec));
    CHECK(results_to_csv(a.rows).rfind("experiment,topology,scheme,param,repetition,"
                                       "mean_per_server_mbps\n", 0) == 0);
}

TEST_CASE("modric outperforms mdcube on container-to-container traffic") {
    ExperimentSpec spec;
    spec.experiment = 3;
    spec.repetitions = 5;
    auto out = run_experiment(spec);
    std::map<std::string, double> means;
    for (auto& [k, v] : aggregate_means(out.rows)) means[k] = v;
    CHECK(means.at("modric-2x4|modric|all-to-all") > means.at("mdcube-2x4|ecmp|all-to-all"));
    CHECK(means.at("modric-2x4|modric|one-to-one") > means.at("mdcube-2x4|ecmp|one-to-one"));
}
