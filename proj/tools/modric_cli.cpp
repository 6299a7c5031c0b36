// Command-line front end: build / verify / route / simulate / cost.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "modric/analysis.hpp"
#include "modric/builders.hpp"
#include "modric/config.hpp"
#include "modric/cost.hpp"
#include "modric/flowsim.hpp"
#include "modric/routing.hpp"

using namespace modric;

namespace {

struct TopologyChoice {
    bool use_modric = false;
    bool use_fattree = false;
    bool use_mdcube = false;
    bool use_jellyfish = false;
    ModricConfig modric;
    std::string extra_links = "rows-first";
    FatTreeParams fattree;
    MdcubeParams mdcube;
    JellyfishParams jellyfish;
    std::string config_path;
};

void add_modric_flags(CLI::App* cmd, TopologyChoice& tc) {
    cmd->add_flag("--modric", tc.use_modric, "build a MODRIC grid");
    cmd->add_option("-m,--rows", tc.modric.m, "container rows");
    cmd->add_option("-n,--cols", tc.modric.n, "container columns");
    cmd->add_option("-q,--eps-per-epsc", tc.modric.q, "EPSes per EPSC");
    cmd->add_option("-x,--as-per-container", tc.modric.x, "access switches per container");
    cmd->add_option("-y,--hosts-per-as", tc.modric.y, "hosts per access switch");
    cmd->add_option("--cap-s1", tc.modric.cap_s1_gbps, "S1 link capacity (Gbps)");
    cmd->add_option("--cap-s2", tc.modric.cap_s2_gbps, "S2 link capacity (Gbps)");
    cmd->add_option("--eps-ports", tc.modric.eps_port_budget, "S1 port budget per EPS (0 = unbounded)");
    cmd->add_option("--length", tc.modric.geometry.length_m, "container length L (m)");
    cmd->add_option("--width", tc.modric.geometry.width_m, "container width W (m)");
    cmd->add_option("--gap-row", tc.modric.geometry.gap_row_m, "row spacing dL (m)");
    cmd->add_option("--gap-col", tc.modric.geometry.gap_col_m, "column spacing dW (m)");
    cmd->add_option("--extra-links", tc.extra_links, "extra-link plan: rows-first|none")
        ->check(CLI::IsMember({"rows-first", "none"}));
    cmd->add_option("--config", tc.config_path, "key=value config file ([modric] section)");
}

void finalize_modric(TopologyChoice& tc, CLI::App* cmd) {
    // file first, then explicit CLI flags override
    if (!tc.config_path.empty()) {
        ModricConfig from_file = tc.modric;
        apply_modric_section(load_config_file(tc.config_path), from_file);
        auto keep = [&](const char* flag) { return cmd->count(flag) > 0; };
        ModricConfig merged = from_file;
        if (keep("--rows")) merged.m = tc.modric.m;
        if (keep("--cols")) merged.n = tc.modric.n;
        if (keep("--eps-per-epsc")) merged.q = tc.modric.q;
        if (keep("--as-per-container")) merged.x = tc.modric.x;
        if (keep("--hosts-per-as")) merged.y = tc.modric.y;
        if (keep("--cap-s1")) merged.cap_s1_gbps = tc.modric.cap_s1_gbps;
        if (keep("--cap-s2")) merged.cap_s2_gbps = tc.modric.cap_s2_gbps;
        if (keep("--eps-ports")) merged.eps_port_budget = tc.modric.eps_port_budget;
        if (keep("--length")) merged.geometry.length_m = tc.modric.geometry.length_m;
        if (keep("--width")) merged.geometry.width_m = tc.modric.geometry.width_m;
        if (keep("--gap-row")) merged.geometry.gap_row_m = tc.modric.geometry.gap_row_m;
        if (keep("--gap-col")) merged.geometry.gap_col_m = tc.modric.geometry.gap_col_m;
        tc.modric = merged;
        tc.use_modric = true;
    }
    if (cmd->count("--extra-links") > 0 || tc.config_path.empty())
        tc.modric.extra_links = tc.extra_links == "none" ? ExtraLinkPolicy::None
                                                         : ExtraLinkPolicy::RowsFirst;
}

Topology build_choice(const TopologyChoice& tc) {
    int chosen = tc.use_modric + tc.use_fattree + tc.use_mdcube + tc.use_jellyfish;
    if (chosen != 1)
        throw CLI::ValidationError("topology",
                                   "choose exactly one of --modric/--fattree/--mdcube/--jellyfish");
    if (tc.use_modric) return build_modric(tc.modric);
    if (tc.use_fattree) return build_fattree(tc.fattree);
    if (tc.use_mdcube) return build_mdcube(tc.mdcube);
    return build_jellyfish(tc.jellyfish);
}

std::string default_out_dir() {
    const char* env = std::getenv("MODRIC_OUT_DIR");
    return env && *env ? env : ".";
}

// ---- verify ---------------------------------------------------------------

struct PropertyResult {
    std::string property;
    std::string formula;
    std::string oracle;
    bool pass = false;
};

std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<PropertyResult> verify_properties(const ModricConfig& cfg) {
    std::vector<PropertyResult> out;
    Topology topo = build_modric(cfg);

    int dia = host_diameter(topo);
    out.push_back({"diameter (<= 9)", "9", std::to_string(dia), dia <= 9});

    if (cfg.containers() > 1 && cfg.x > cfg.m + cfg.n - 2) {
        // the extra-link plan adds parallel inter-container links, so the
        // canonical 4/4/8 counts do not apply
        out.push_back({"disjoint paths", "4 / 4 / 8",
                       "n/a (extra-link plan adds parallel paths)", true});
    } else if (cfg.containers() > 1) {
        int as_min = 1 << 30, as_max = 0;
        int rc_min = 1 << 30, rc_max = 0;
        int dg_min = 1 << 30, dg_max = -1;
        for (int i1 = 0; i1 < cfg.m; ++i1)
            for (int j1 = 0; j1 < cfg.n; ++j1)
                for (int i2 = 0; i2 < cfg.m; ++i2)
                    for (int j2 = 0; j2 < cfg.n; ++j2) {
                        if (std::make_pair(i1, j1) >= std::make_pair(i2, j2)) continue;
                        int v = vertex_disjoint_paths(topo, {i1, j1}, {i2, j2});
                        if (i1 == i2 || j1 == j2) {
                            rc_min = std::min(rc_min, v);
                            rc_max = std::max(rc_max, v);
                        } else {
                            dg_min = std::min(dg_min, v);
                            dg_max = std::max(dg_max, v);
                        }
                        int a = vertex_disjoint_paths(
                            topo, {NodeKind::AccessSwitch, i1, j1, 4, 0},
                            {NodeKind::AccessSwitch, i2, j2, 4, 0});
                        as_min = std::min(as_min, a);
                        as_max = std::max(as_max, a);
                    }
        out.push_back({"disjoint paths, AS pairs", "4",
                       std::to_string(as_min) + ".." + std::to_string(as_max),
                       as_min == 4 && as_max == 4});
        out.push_back({"disjoint paths, same row/col containers", "4",
                       std::to_string(rc_min) + ".." + std::to_string(rc_max),
                       rc_min == 4 && rc_max == 4});
        if (dg_max >= 0)
            out.push_back({"disjoint paths, diagonal containers", "8",
                           std::to_string(dg_min) + ".." + std::to_string(dg_max),
                           dg_min == 8 && dg_max == 8});
    }

    double bf_formula = container_bisection_formula(cfg.x, cfg.q, cfg.cap_s1_gbps);
    if (cfg.x % 2 == 0 && cfg.x <= 16) {
        auto brute = container_bisection_brute(cfg.x, cfg.q, cfg.cap_s1_gbps);
        out.push_back({"container bisection (2x+4q)C", fmt_double(bf_formula),
                       fmt_double(brute.capacity_gbps),
                       std::abs(brute.capacity_gbps - bf_formula) < 1e-9});
    } else {
        out.push_back({"container bisection (2x+4q)C", fmt_double(bf_formula),
                       "n/a (needs even x <= 16)", true});
    }

    auto nb = network_bisection_structured(cfg);
    bool oracle_ok = true;
    std::string oracle_str = "n/a";
    if (cfg.containers() % 2 == 0 && cfg.containers() <= 16 && cfg.x <= cfg.m + cfg.n - 2) {
        double enumd = container_level_min_bisection(cfg);
        oracle_str = fmt_double(enumd);
        oracle_ok = std::abs(enumd - nb.bisection_gbps) < 1e-9;
    }
    out.push_back({"network bisection (" + nb.case_label + ")", fmt_double(nb.bisection_gbps),
                   oracle_str, oracle_ok});

    PortCensus formula = modric_port_census_formula(cfg);
    PortCensus graph = port_census_from_graph(topo);
    bool canonical_x = cfg.x <= std::max(cfg.m + cfg.n - 2, 1);
    bool census_ok = canonical_x ? formula == graph : graph.hosts == formula.hosts;
    out.push_back({canonical_x ? "port census s1/s2"
                               : "port census s1/s2 (graph carries extra links)",
                   std::to_string(formula.s1_ports) + "/" + std::to_string(formula.s2_ports),
                   std::to_string(graph.s1_ports) + "/" + std::to_string(graph.s2_ports),
                   census_ok});

    double cable_f = cable_length(cfg, CableMode::Formula);
    double cable_p = cable_length_per_link(topo, cfg.geometry);
    bool cable_ok = cfg.x <= std::max(cfg.m + cfg.n - 2, 1)
                        ? std::abs(cable_f - cable_p) <= 1e-9 * std::max(1.0, cable_f)
                        : cable_p >= cable_f;
    out.push_back({"cable length (m)", fmt_double(cable_f), fmt_double(cable_p), cable_ok});
    return out;
}

int run_verify(const TopologyChoice& tc, const std::string& json_path) {
    auto results = verify_properties(tc.modric);
    std::printf("%-44s %-22s %-22s %s\n", "property", "formula", "oracle", "result");
    bool all = true;
    for (const auto& r : results) {
        std::printf("%-44s %-22s %-22s %s\n", r.property.c_str(), r.formula.c_str(),
                    r.oracle.c_str(), r.pass ? "pass" : "FAIL");
        all = all && r.pass;
    }
    if (!json_path.empty()) {
        nlohmann::ordered_json j;
        j["config"] = {{"m", tc.modric.m}, {"n", tc.modric.n}, {"q", tc.modric.q},
                       {"x", tc.modric.x}, {"y", tc.modric.y},
                       {"cap_s1_gbps", tc.modric.cap_s1_gbps},
                       {"cap_s2_gbps", tc.modric.cap_s2_gbps}};
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : results)
            arr.push_back({{"property", r.property}, {"formula", r.formula},
                           {"oracle", r.oracle}, {"pass", r.pass}});
        j["properties"] = arr;
        j["pass"] = all;
        atomic_write_file(json_path, j.dump(2) + "\n");
    }
    return all ? 0 : 1;
}

// ---- route ----------------------------------------------------------------

AddrFields parse_endpoint(const std::string& s, const BitPlan& plan) {
    if (s.find('.') != std::string::npos) return decode_addr(addr_from_string(s), plan);
    AddrFields f;
    if (std::sscanf(s.c_str(), "%d,%d,%d,%d", &f.row, &f.col, &f.as_rank, &f.host) != 4)
        throw ConstraintViolation("endpoint must be row,col,as,host or a dotted address: " + s);
    return f;
}

FailureSet parse_failure_file(const Topology& topo, const std::string& path) {
    FailureSet fs;
    std::istringstream is(read_file(path));
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        if (kind == "node") {
            std::string ref;
            ls >> ref;
            // kind:row:col:rank[:layer]
            std::string k;
            int parts[4] = {0, 0, 0, 0};
            std::istringstream rs(ref);
            std::getline(rs, k, ':');
            std::string tok;
            int idx = 0;
            while (idx < 4 && std::getline(rs, tok, ':')) parts[idx++] = std::stoi(tok);
            NodeRef nr;
            nr.kind = k == "host" ? NodeKind::Host
                      : k == "as" ? NodeKind::AccessSwitch
                                  : NodeKind::Eps;
            nr.row = parts[0];
            nr.col = parts[1];
            nr.rank = parts[2];
            nr.layer = parts[3];
            fs.dead_nodes.insert(topo.require(nr));
        } else if (kind == "link") {
            int id = -1;
            ls >> id;
            if (id < 0 || id >= topo.link_count())
                throw ConstraintViolation("link id out of range: " + std::to_string(id));
            fs.dead_links.insert(id);
        } else {
            throw ConstraintViolation("failure line must start with 'node' or 'link'");
        }
    }
    return fs;
}

int run_route(const TopologyChoice& tc, const std::string& src_s, const std::string& dst_s,
              const std::string& scheme_s, const std::string& failures_path, uint64_t flow_id) {
    Topology topo = build_modric(tc.modric);
    BitPlan plan = plan_bits(tc.modric);
    AddrFields src_f = parse_endpoint(src_s, plan);
    AddrFields dst_f = parse_endpoint(dst_s, plan);
    auto host_of = [&](const AddrFields& f) {
        if (f.row >= tc.modric.m || f.col >= tc.modric.n || f.as_rank < 4 ||
            f.as_rank >= 4 + tc.modric.x || f.host >= tc.modric.y)
            throw ConstraintViolation("endpoint outside the network: row=" +
                                      std::to_string(f.row) + " col=" + std::to_string(f.col) +
                                      " as=" + std::to_string(f.as_rank) +
                                      " host=" + std::to_string(f.host));
        int container_wide = (f.as_rank - 4) * tc.modric.y + f.host;
        return topo.require({NodeKind::Host, f.row, f.col, container_wide, 0});
    };
    int32_t src = host_of(src_f), dst = host_of(dst_f);
    FailureSet fs;
    if (!failures_path.empty()) fs = parse_failure_file(topo, failures_path);
    RoutedPath path;
    if (scheme_s == "modric") {
        ForwardingTables tables = compile_tables(topo, plan);
        path = fs.empty() ? route(topo, tables, src, dst, flow_id)
                          : reroute(topo, tables, fs, src, dst, flow_id);
    } else {
        Scheme s = scheme_s == "ecmp" ? Scheme::EcmpOnly : Scheme::Spr;
        path = baseline_route(topo, s, src, dst, flow_id, fs);
    }
    for (size_t i = 0; i < path.nodes.size(); ++i)
        std::printf("%s%s", i ? " -> " : "", topo.node(path.nodes[i]).str().c_str());
    std::printf("\nhops: %d scheme: %s\n", path.hops(), to_string(path.scheme));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MODRIC data-center network model: build, verify, route, simulate, cost"};
    app.require_subcommand(1);

    // build ------------------------------------------------------------
    auto* build = app.add_subcommand("build", "construct a topology and export it");
    TopologyChoice btc;
    add_modric_flags(build, btc);
    build->add_flag("--fattree", btc.use_fattree, "build a 3-layer fat-tree");
    build->add_option("-R,--radix", btc.fattree.radix, "fat-tree switch radix (even)");
    build->add_flag("--mdcube", btc.use_mdcube, "build a 2-D MDCube of BCube(r,1) containers");
    build->add_option("-r,--bcube-radix", btc.mdcube.r, "BCube switch radix");
    build->add_option("-k,--bcube-levels", btc.mdcube.k, "BCube level parameter (k=1)");
    build->add_option("-z,--uplinks", btc.mdcube.z, "10GbE uplinks per switch");
    build->add_flag("--jellyfish", btc.use_jellyfish, "build a random regular switch graph");
    build->add_option("--switches", btc.jellyfish.switches, "jellyfish switch count");
    build->add_option("--ports", btc.jellyfish.ports_per_switch, "ports per switch");
    build->add_option("--hosts-per-switch", btc.jellyfish.hosts_per_switch, "hosts per switch");
    build->add_option("--seed", btc.jellyfish.seed, "jellyfish construction seed");
    std::string out_edges, out_dot;
    bool do_validate = false;
    build->add_option("--out", out_edges, "edge-list output file");
    build->add_option("--dot", out_dot, "graphviz output file");
    build->add_flag("--validate", do_validate, "run the invariant checks and report");

    // verify -----------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "check the topological properties on a config");
    TopologyChoice vtc;
    add_modric_flags(verify, vtc);
    bool all_props = false;
    std::string verify_json;
    verify->add_flag("--all-properties", all_props, "verify every property (default)");
    verify->add_option("--json", verify_json, "write a machine-readable report");

    // route ------------------------------------------------------------
    auto* route_cmd = app.add_subcommand("route", "route one flow between two hosts");
    TopologyChoice rtc;
    add_modric_flags(route_cmd, rtc);
    std::string src_s, dst_s, scheme_s = "modric", failures_path;
    uint64_t flow_id = 0;
    route_cmd->add_option("--src", src_s, "source: row,col,as,host or dotted address")
        ->required();
    route_cmd->add_option("--dst", dst_s, "destination: row,col,as,host or dotted address")
        ->required();
    route_cmd->add_option("--scheme", scheme_s, "modric|ecmp|spr")
        ->check(CLI::IsMember({"modric", "ecmp", "spr"}));
    route_cmd->add_option("--failures", failures_path,
                          "file with dead elements: 'node <ref>' / 'link <id>' lines");
    route_cmd->add_option("--flow-id", flow_id, "flow id used for the ECMP hash");

    // simulate ----------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "run a flow-level throughput experiment");
    ExperimentSpec spec;
    std::string out_dir = default_out_dir();
    sim->add_option("--experiment", spec.experiment, "experiment id 1..6")
        ->required()
        ->check(CLI::Range(1, 6));
    sim->add_option("--repetitions", spec.repetitions, "repetitions per parameter (default 20)");
    sim->add_option("--seed", spec.seed, "base seed");
    sim->add_option("--peers", spec.peer_counts, "experiment-1 peer counts");
    sim->add_option("--fractions", spec.failure_fractions, "experiment-4 switch failure fractions");
    sim->add_option("--out-dir", out_dir, "output directory (env MODRIC_OUT_DIR)");

    // cost ---------------------------------------------------------------
    auto* cost = app.add_subcommand("cost", "evaluate the switch + cabling cost model");
    TopologyChoice ctc;
    add_modric_flags(cost, ctc);
    cost->add_flag("--fattree", ctc.use_fattree, "cost a fat-tree");
    cost->add_option("-R,--radix", ctc.fattree.radix, "fat-tree radix");
    cost->add_flag("--mdcube", ctc.use_mdcube, "cost an MDCube");
    cost->add_option("-r,--bcube-radix", ctc.mdcube.r, "BCube switch radix");
    cost->add_option("-z,--uplinks", ctc.mdcube.z, "10GbE uplinks per switch");
    bool table3 = false, table5 = false, merchant = false, faithful_cbn = false;
    std::string prices_path, cost_out;
    cost->add_flag("--table3", table3, "reproduce the published port/cost table");
    cost->add_flag("--table5", table5, "reproduce the merchant-silicon table");
    cost->add_flag("--merchant", merchant, "price 10GbE ports at the merchant-silicon rate");
    cost->add_flag("--per-q-cbn", faithful_cbn,
                   "cost CBN copper at the configured q instead of the full 6U rack");
    cost->add_option("--prices", prices_path, "price book file (key=value)");
    cost->add_option("--out", cost_out, "CSV output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (build->parsed()) {
            finalize_modric(btc, build);
            btc.mdcube.m = btc.modric.m;
            btc.mdcube.n = btc.modric.n;
            Topology topo = build_choice(btc);
            if (do_validate) {
                ValidationReport rep = validate(topo);
                std::fputs(rep.to_string().c_str(), stdout);
                if (!rep.passed()) return 1;
            }
            if (!out_edges.empty()) atomic_write_file(out_edges, topo.to_edge_list());
            if (!out_dot.empty()) atomic_write_file(out_dot, topo.to_dot());
            std::printf("built %s: %d nodes, %d links\n", topo.generator().c_str(),
                        topo.node_count(), topo.link_count());
            return 0;
        }
        if (verify->parsed()) {
            finalize_modric(vtc, verify);
            vtc.use_modric = true;
            return run_verify(vtc, verify_json);
        }
        if (route_cmd->parsed()) {
            finalize_modric(rtc, route_cmd);
            rtc.use_modric = true;
            return run_route(rtc, src_s, dst_s, scheme_s, failures_path, flow_id);
        }
        if (sim->parsed()) {
            ExperimentOutput out = run_experiment(spec);
            std::string base = out_dir + "/exp" + std::to_string(spec.experiment);
            atomic_write_file(base + "_results.csv", results_to_csv(out.rows));
            atomic_write_file(base + "_summary.json", results_to_json(out, spec));
            std::printf("wrote %s_results.csv and %s_summary.json\n", base.c_str(), base.c_str());
            return 0;
        }
        if (cost->parsed()) {
            PriceBook pb;
            if (!prices_path.empty()) pb = parse_price_book(read_file(prices_path));
            std::string csv;
            if (table3) {
                csv = table_comparisons_to_csv(reproduce_table3(pb));
            } else if (table5) {
                csv = table_comparisons_to_csv(reproduce_table5(pb));
            } else {
                finalize_modric(ctc, cost);
                ctc.mdcube.m = ctc.modric.m;
                ctc.mdcube.n = ctc.modric.n;
                RackModel rack;
                rack.cbn_full_population = !faithful_cbn;
                CostBreakdown cb;
                std::string label;
                if (ctc.use_fattree) {
                    cb = cost_fattree(ctc.fattree.radix, pb);
                    label = "fattree R=" + std::to_string(ctc.fattree.radix);
                } else if (ctc.use_mdcube) {
                    cb = cost_mdcube(ctc.mdcube, ModricGeometry{}, pb, rack);
                    label = "mdcube";
                } else {
                    cb = cost_modric(ctc.modric, pb, rack, merchant);
                    label = "modric";
                }
                std::ostringstream os;
                os << "label,hosts,ten_gbe_ports,gbe_ports,switch_mdollars,cable_mdollars,"
                      "total_mdollars\n"
                   << label << ',' << cb.hosts << ',' << cb.ten_g_ports << ',' << cb.one_g_ports
                   << ',' << mdollars_3dp(cb.switch_cost) << ',' << mdollars_3dp(cb.cable_cost)
                   << ',' << mdollars_3dp(cb.total()) << '\n';
                csv = os.str();
            }
            if (cost_out.empty())
                std::fputs(csv.c_str(), stdout);
            else
                atomic_write_file(cost_out, csv);
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        nlohmann::ordered_json err;
        err["error"] = e.what();
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        return 1;
    }
    return 2;
}
