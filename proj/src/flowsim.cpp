#include "modric/flowsim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "modric/builders.hpp"

#include "json.hpp"

namespace modric {

namespace {

constexpr double kEps = 1e-9;

int32_t arc_of(const Topology& t, int32_t link, int32_t from) {
    return link * 2 + (t.link(link).a == from ? 0 : 1);
}

}  // namespace

std::vector<FlowResult> allocate_maxmin(const Topology& topo,
                                        const std::vector<FlowDemand>& demands,
                                        const std::vector<RoutedPath>& paths,
                                        const std::vector<bool>& routed) {
    const size_t nf = demands.size();
    std::vector<FlowResult> out(nf);
    std::vector<std::vector<int32_t>> flow_arcs(nf);
    std::vector<double> remaining(static_cast<size_t>(topo.link_count()) * 2);
    for (int32_t l = 0; l < topo.link_count(); ++l) {
        remaining[l * 2] = topo.link(l).capacity_gbps * 1000.0;
        remaining[l * 2 + 1] = topo.link(l).capacity_gbps * 1000.0;
    }
    std::vector<int> arc_active(remaining.size(), 0);
    std::vector<char> active(nf, 0);
    for (size_t f = 0; f < nf; ++f) {
        out[f].flow_id = demands[f].flow_id;
        out[f].routed = routed[f];
        if (!routed[f]) continue;
        out[f].path = paths[f];
        if (!paths[f].loop_free()) throw ConstraintViolation("flow path has a loop");
        active[f] = 1;
        for (size_t i = 0; i < paths[f].links.size(); ++i) {
            int32_t arc = arc_of(topo, paths[f].links[i], paths[f].nodes[i]);
            flow_arcs[f].push_back(arc);
            arc_active[arc]++;
        }
    }
    std::vector<double> rate(nf, 0.0);
    size_t n_active = 0;
    for (size_t f = 0; f < nf; ++f) n_active += active[f];
    size_t guard = nf + remaining.size() + 2;
    while (n_active > 0 && guard-- > 0) {
        double step = 1e300;
        for (size_t a = 0; a < remaining.size(); ++a)
            if (arc_active[a] > 0) step = std::min(step, remaining[a] / arc_active[a]);
        for (size_t f = 0; f < nf; ++f)
            if (active[f]) step = std::min(step, demands[f].demand_mbps - rate[f]);
        step = std::max(step, 0.0);
        for (size_t f = 0; f < nf; ++f)
            if (active[f]) rate[f] += step;
        for (size_t a = 0; a < remaining.size(); ++a)
            if (arc_active[a] > 0) remaining[a] -= step * arc_active[a];
        // freeze demand-capped flows, then flows on saturated arcs
        for (size_t f = 0; f < nf; ++f) {
            if (!active[f]) continue;
            bool capped = rate[f] >= demands[f].demand_mbps - kEps;
            bool bottled = false;
            if (!capped)
                for (int32_t a : flow_arcs[f])
                    if (remaining[a] <= kEps) {
                        bottled = true;
                        break;
                    }
            if (capped || bottled) {
                active[f] = 0;
                --n_active;
                for (int32_t a : flow_arcs[f]) arc_active[a]--;
            }
        }
    }
    for (size_t f = 0; f < nf; ++f) out[f].rate_mbps = rate[f];
    // capacity feasibility: no arc oversubscribed
    std::vector<double> load(remaining.size(), 0.0);
    for (size_t f = 0; f < nf; ++f)
        for (int32_t a : flow_arcs[f]) load[a] += rate[f];
    for (int32_t l = 0; l < topo.link_count(); ++l) {
        double cap = topo.link(l).capacity_gbps * 1000.0;
        if (load[l * 2] > cap + 1e-6 || load[l * 2 + 1] > cap + 1e-6)
            throw std::logic_error("max-min allocation oversubscribed a link");
    }
    return out;
}

std::vector<std::vector<int32_t>> host_groups(const Topology& topo, int fallback_size) {
    std::vector<int32_t> hosts = topo.hosts();
    std::vector<std::vector<int32_t>> groups;
    if (topo.generator() == "jellyfish") {
        for (size_t i = 0; i < hosts.size(); i += fallback_size) {
            groups.emplace_back(hosts.begin() + i,
                                hosts.begin() + std::min(hosts.size(), i + fallback_size));
        }
        return groups;
    }
    std::map<std::pair<int, int>, std::vector<int32_t>> by_container;
    for (int32_t h : hosts) by_container[{topo.node(h).row, topo.node(h).col}].push_back(h);
    for (auto& [key, members] : by_container) groups.push_back(std::move(members));
    return groups;
}

std::vector<FlowDemand> gen_traffic(const TrafficPattern& p, const Topology& topo,
                                    uint64_t seed) {
    std::mt19937_64 rng(stable_mix(seed, 0x7261FF1C));
    auto groups = host_groups(topo);
    std::vector<FlowDemand> flows;
    uint64_t next_id = 0;
    auto emit = [&](int32_t s, int32_t d) {
        flows.push_back({s, d, p.demand_mbps, next_id++});
    };
    switch (p.kind) {
        case TrafficPattern::RandomPeers: {
            std::vector<int32_t> eligible;
            for (const auto& g : groups)
                for (size_t i = 0; i < g.size(); ++i)
                    if (!p.exclude_log_host || i + 1 < g.size()) eligible.push_back(g[i]);
            if (p.peers < 0 || p.peers > static_cast<int>(eligible.size()) - 1)
                throw InfeasiblePattern("N exceeds the eligible host count");
            for (int32_t src : eligible) {
                std::set<int32_t> chosen;
                while (static_cast<int>(chosen.size()) < p.peers) {
                    int32_t peer = eligible[rng() % eligible.size()];
                    if (peer == src || chosen.count(peer)) continue;  // resample
                    chosen.insert(peer);
                }
                for (int32_t d : chosen) emit(src, d);
            }
            break;
        }
        case TrafficPattern::Permutation: {
            std::vector<int32_t> hosts = topo.hosts();
            if (hosts.size() % 2 != 0)
                throw InfeasiblePattern("permutation needs an even host count");
            std::shuffle(hosts.begin(), hosts.end(), rng);
            for (size_t i = 0; i + 1 < hosts.size(); i += 2) {
                emit(hosts[i], hosts[i + 1]);
                emit(hosts[i + 1], hosts[i]);
            }
            break;
        }
        case TrafficPattern::C2COneToOne:
        case TrafficPattern::C2CAllToAll: {
            if (p.group_a == p.group_b) throw InfeasiblePattern("C2C groups must differ");
            if (p.group_a < 0 || p.group_b < 0 ||
                p.group_a >= static_cast<int>(groups.size()) ||
                p.group_b >= static_cast<int>(groups.size()))
                throw InfeasiblePattern("C2C group index out of range");
            const auto& a = groups[p.group_a];
            const auto& b = groups[p.group_b];
            if (p.kind == TrafficPattern::C2COneToOne) {
                if (a.size() != b.size())
                    throw InfeasiblePattern("one-to-one needs equal group sizes");
                for (size_t i = 0; i < a.size(); ++i) emit(a[i], b[i]);
            } else {
                for (int32_t s : a)
                    for (int32_t d : b) emit(s, d);
            }
            break;
        }
    }
    return flows;
}

FailureSet inject_failures(const Topology& topo, double fraction, uint64_t seed) {
    if (fraction < 0.0 || fraction >= 1.0)
        throw ConstraintViolation("failure fraction must be in [0, 1)");
    std::vector<int32_t> sw = topo.switches();
    std::mt19937_64 rng(stable_mix(seed, 0xFA11));
    std::shuffle(sw.begin(), sw.end(), rng);
    size_t dead = static_cast<size_t>(fraction * sw.size());
    FailureSet fs;
    fs.dead_nodes.insert(sw.begin(), sw.begin() + dead);
    return fs;
}

double mean_per_server_throughput(const Topology& topo, Scheme scheme,
                                  const std::vector<FlowDemand>& demands,
                                  const FailureSet& failures) {
    std::vector<RoutedPath> paths(demands.size());
    std::vector<bool> routed(demands.size(), false);
    if (scheme == Scheme::Modric) {
        ForwardingTables tables = compile_tables(topo, plan_bits(*topo.modric_config()));
        for (size_t f = 0; f < demands.size(); ++f) {
            try {
                paths[f] = failures.empty()
                               ? route(topo, tables, demands[f].src, demands[f].dst,
                                       demands[f].flow_id)
                               : reroute(topo, tables, failures, demands[f].src,
                                         demands[f].dst, demands[f].flow_id);
                routed[f] = true;
            } catch (const NoRoute&) {
            }
        }
    } else {
        BaselineRouter router(topo, failures);
        for (size_t f = 0; f < demands.size(); ++f) {
            try {
                paths[f] = router.route(scheme, demands[f].src, demands[f].dst,
                                        demands[f].flow_id);
                routed[f] = true;
            } catch (const NoRoute&) {
            }
        }
    }
    auto results = allocate_maxmin(topo, demands, paths, routed);
    std::set<int32_t> srcs;
    double total = 0.0;
    for (size_t f = 0; f < demands.size(); ++f) {
        srcs.insert(demands[f].src);
        total += results[f].rate_mbps;
    }
    return srcs.empty() ? 0.0 : total / static_cast<double>(srcs.size());
}

namespace {

// 128-host comparison topologies at the experiment link speeds: host links
// 100 Mbps, switch-to-switch links 400 Mbps.
ModricConfig exp_modric(int m, int n, int x, int y) {
    ModricConfig cfg;
    cfg.m = m;
    cfg.n = n;
    cfg.q = 1;
    cfg.x = x;
    cfg.y = y;
    cfg.cap_s1_gbps = 0.4;
    cfg.cap_s2_gbps = 0.1;
    return cfg;
}

struct ExpTopo {
    std::string name;
    Topology topo;
    Scheme scheme;
};

std::vector<ExpTopo> comparison_topologies() {
    std::vector<ExpTopo> out;
    out.push_back({"modric-2x4", build_modric(exp_modric(2, 4, 4, 4)), Scheme::Modric});
    MdcubeParams md{2, 4, 4, 1, 4, 0.4, 0.1};
    out.push_back({"mdcube-2x4", build_mdcube(md), Scheme::EcmpOnly});
    FatTreeParams ft;
    ft.radix = 8;
    ft.cap_host_gbps = 0.1;
    ft.cap_switch_gbps = 0.4;
    out.push_back({"fattree-8", build_fattree(ft), Scheme::EcmpOnly});
    JellyfishParams jf;
    jf.switches = 16;
    jf.ports_per_switch = 12;
    jf.hosts_per_switch = 8;
    jf.seed = 7;
    jf.cap_s1_gbps = 0.4;
    jf.cap_s2_gbps = 0.1;
    out.push_back({"jellyfish-128", build_jellyfish(jf), Scheme::EcmpOnly});
    return out;
}

int diagonal_group(const Topology& topo) {
    // group index of the container diagonally opposite group 0
    auto groups = host_groups(topo);
    const NodeRef& first = topo.node(groups[0][0]);
    int best = 0, best_score = -1;
    for (size_t g = 1; g < groups.size(); ++g) {
        const NodeRef& nd = topo.node(groups[g][0]);
        int score = std::abs(nd.row - first.row) * 1000 + std::abs(nd.col - first.col);
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(g);
        }
    }
    return best;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentSpec& spec) {
    if (spec.repetitions < 1) throw ConstraintViolation("repetitions must be >= 1");
    ExperimentOutput out;
    out.metadata["host_link_mbps"] = "100";
    out.metadata["switch_link_mbps"] = "400";
    out.metadata["seed"] = std::to_string(spec.seed);
    out.metadata["repetitions"] = std::to_string(spec.repetitions);
    auto add_row = [&](const std::string& topo, const std::string& scheme,
                       const std::string& param, int rep, double mean) {
        out.rows.push_back({spec.experiment, topo, scheme, param, rep, mean});
    };
    auto rep_seed = [&](int rep) { return stable_mix(spec.seed, 1000 + rep); };

    switch (spec.experiment) {
        case 1: {
            auto topos = comparison_topologies();
            for (const auto& t : topos)
                out.metadata["hash_" + t.name] = std::to_string(t.topo.structure_hash());
            for (int N : spec.peer_counts)
                for (int rep = 0; rep < spec.repetitions; ++rep)
                    for (const auto& t : topos) {
                        TrafficPattern p;
                        p.kind = TrafficPattern::RandomPeers;
                        p.peers = N;
                        p.exclude_log_host = true;
                        auto demands = gen_traffic(p, t.topo, rep_seed(rep));
                        add_row(t.name, to_string(t.scheme), std::to_string(N), rep,
                                mean_per_server_throughput(t.topo, t.scheme, demands));
                    }
            break;
        }
        case 2: {
            auto topos = comparison_topologies();
            for (const auto& t : topos)
                out.metadata["hash_" + t.name] = std::to_string(t.topo.structure_hash());
            for (int rep = 0; rep < spec.repetitions; ++rep)
                for (const auto& t : topos) {
                    TrafficPattern p;
                    p.kind = TrafficPattern::Permutation;
                    auto demands = gen_traffic(p, t.topo, rep_seed(rep));
                    add_row(t.name, to_string(t.scheme), "permutation", rep,
                            mean_per_server_throughput(t.topo, t.scheme, demands));
                }
            break;
        }
        case 3: {
            auto topos = comparison_topologies();
            topos.resize(2);  // modric vs mdcube
            for (const auto& t : topos)
                out.metadata["hash_" + t.name] = std::to_string(t.topo.structure_hash());
            for (const char* pat : {"one-to-one", "all-to-all"})
                for (int rep = 0; rep < spec.repetitions; ++rep)
                    for (const auto& t : topos) {
                        TrafficPattern p;
                        p.kind = std::string(pat) == "one-to-one" ? TrafficPattern::C2COneToOne
                                                                  : TrafficPattern::C2CAllToAll;
                        p.group_a = 0;
                        p.group_b = diagonal_group(t.topo);
                        auto demands = gen_traffic(p, t.topo, rep_seed(rep));
                        add_row(t.name, to_string(t.scheme), pat, rep,
                                mean_per_server_throughput(t.topo, t.scheme, demands));
                    }
            break;
        }
        case 4: {
            auto topos = comparison_topologies();
            for (const auto& t : topos)
                out.metadata["hash_" + t.name] = std::to_string(t.topo.structure_hash());
            for (double f : spec.failure_fractions)
                for (int rep = 0; rep < spec.repetitions; ++rep)
                    for (const auto& t : topos) {
                        TrafficPattern p;
                        p.kind = TrafficPattern::Permutation;
                        auto demands = gen_traffic(p, t.topo, rep_seed(rep));
                        FailureSet fs = inject_failures(t.topo, f, stable_mix(rep_seed(rep), 77));
                        char buf[16];
                        std::snprintf(buf, sizeof buf, "%g", f);
                        add_row(t.name, to_string(t.scheme), buf, rep,
                                mean_per_server_throughput(t.topo, t.scheme, demands, fs));
                    }
            break;
        }
        case 5: {
            Topology topo = build_modric(exp_modric(2, 4, 4, 4));
            out.metadata["hash_modric-2x4"] = std::to_string(topo.structure_hash());
            for (const char* pat : {"one-to-one", "all-to-all"})
                for (int rep = 0; rep < spec.repetitions; ++rep)
                    for (Scheme s : {Scheme::Modric, Scheme::EcmpOnly, Scheme::Spr}) {
                        TrafficPattern p;
                        p.kind = std::string(pat) == "one-to-one" ? TrafficPattern::C2COneToOne
                                                                  : TrafficPattern::C2CAllToAll;
                        p.group_a = 0;
                        p.group_b = diagonal_group(topo);
                        auto demands = gen_traffic(p, topo, rep_seed(rep));
                        add_row("modric-2x4", to_string(s), pat, rep,
                                mean_per_server_throughput(topo, s, demands));
                    }
            break;
        }
        case 6: {
            struct Grid {
                int m, n;
            };
            for (Grid g : {Grid{1, 2}, Grid{2, 2}, Grid{2, 4}, Grid{4, 4}}) {
                int y = 128 / (g.m * g.n * 4);
                Topology topo = build_modric(exp_modric(g.m, g.n, 4, y));
                std::string name = std::to_string(g.m) + "x" + std::to_string(g.n);
                out.metadata["hash_modric-" + name] = std::to_string(topo.structure_hash());
                for (int rep = 0; rep < spec.repetitions; ++rep) {
                    TrafficPattern p;
                    p.kind = TrafficPattern::Permutation;
                    auto demands = gen_traffic(p, topo, rep_seed(rep));
                    add_row("modric-" + name, "modric", name, rep,
                            mean_per_server_throughput(topo, Scheme::Modric, demands));
                }
            }
            break;
        }
        default:
            throw ConstraintViolation("experiment id must be 1..6");
    }
    return out;
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    os << "experiment,topology,scheme,param,repetition,mean_per_server_mbps\n";
    for (const auto& r : rows) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", r.mean_per_server_mbps);
        os << r.experiment << ',' << r.topology << ',' << r.scheme << ',' << r.param << ','
           << r.repetition << ',' << buf << '\n';
    }
    return os.str();
}

std::vector<std::pair<std::string, double>> aggregate_means(const std::vector<ResultRow>& rows) {
    std::vector<std::pair<std::string, double>> order;
    std::map<std::string, std::pair<double, int>> acc;
    for (const auto& r : rows) {
        std::string key = r.topology + "|" + r.scheme + "|" + r.param;
        auto [it, fresh] = acc.emplace(key, std::make_pair(0.0, 0));
        if (fresh) order.emplace_back(key, 0.0);
        it->second.first += r.mean_per_server_mbps;
        it->second.second += 1;
    }
    for (auto& [key, mean] : order) mean = acc[key].first / acc[key].second;
    return order;
}

std::string results_to_json(const ExperimentOutput& out, const ExperimentSpec& spec) {
    nlohmann::ordered_json j;
    j["experiment"] = spec.experiment;
    j["seed"] = spec.seed;
    j["repetitions"] = spec.repetitions;
    nlohmann::ordered_json meta;
    for (const auto& [k, v] : out.metadata) meta[k] = v;
    j["metadata"] = meta;
    nlohmann::ordered_json agg = nlohmann::ordered_json::array();
    std::map<std::string, std::vector<double>> samples;
    std::vector<std::string> order;
    for (const auto& r : out.rows) {
        std::string key = r.topology + "|" + r.scheme + "|" + r.param;
        if (!samples.count(key)) order.push_back(key);
        samples[key].push_back(r.mean_per_server_mbps);
    }
    for (const auto& key : order) {
        const auto& v = samples[key];
        double mean = 0.0;
        for (double s : v) mean += s;
        mean /= v.size();
        double var = 0.0;
        for (double s : v) var += (s - mean) * (s - mean);
        double stdev = v.size() > 1 ? std::sqrt(var / (v.size() - 1)) : 0.0;
        size_t p1 = key.find('|'), p2 = key.rfind('|');
        nlohmann::ordered_json row;
        row["topology"] = key.substr(0, p1);
        row["scheme"] = key.substr(p1 + 1, p2 - p1 - 1);
        row["param"] = key.substr(p2 + 1);
        row["mean_mbps"] = mean;
        row["stdev_mbps"] = stdev;
        row["samples"] = v.size();
        agg.push_back(row);
    }
    j["aggregates"] = agg;
    return j.dump(2) + "\n";
}

}  // namespace modric
