#include "modric/cost.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "modric/analysis.hpp"

namespace modric {

std::string mdollars_3dp(Millicents v) {
    long long th = mdollars_thousandths(v);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%lld.%03lld", th / 1000, th % 1000);
    return buf;
}

long long mdollars_thousandths(Millicents v) {
    // 1 M$ = 1e11 millicents; one thousandth = 1e8
    return (v + 50000000ll) / 100000000ll;
}

void PriceBook::validate() const {
    for (Millicents p : {gbe_port, ten_gbe_port, merchant_ten_gbe_port, cat5e_per_m, cat6_per_m,
                         mmf_per_m})
        if (p <= 0) throw ConstraintViolation("all prices must be positive");
}

PriceBook parse_price_book(const std::string& text) {
    PriceBook pb;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t'))
            line.pop_back();
        size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        line.erase(0, start);
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConstraintViolation("price book line " + std::to_string(lineno) +
                                      ": expected key=value");
        std::string key = line.substr(0, eq);
        double value = 0.0;
        if (std::sscanf(line.c_str() + eq + 1, "%lf", &value) != 1)
            throw ConstraintViolation("price book line " + std::to_string(lineno) +
                                      ": bad number");
        Millicents mc = static_cast<Millicents>(value * 100000.0 + 0.5);
        if (key == "gbe_port")
            pb.gbe_port = mc;
        else if (key == "ten_gbe_port")
            pb.ten_gbe_port = mc;
        else if (key == "merchant_ten_gbe_port")
            pb.merchant_ten_gbe_port = mc;
        else if (key == "cat5e_per_m")
            pb.cat5e_per_m = mc;
        else if (key == "cat6_per_m")
            pb.cat6_per_m = mc;
        else if (key == "mmf_per_m")
            pb.mmf_per_m = mc;
        else
            throw ConstraintViolation("price book: unknown key '" + key + "'");
    }
    pb.validate();
    return pb;
}

namespace {

Millicents cable_cost_mm(long long mm, Millicents per_m) {
    // per_m is millicents per meter; mm * per_m / 1000 stays integral for
    // every whole-decimeter length in use
    return mm * per_m / 1000;
}

void add_cable(CostBreakdown& cb, const std::string& name, const std::string& type,
               long long count, long long mm_each, Millicents per_m) {
    CostBreakdown::CableClass c;
    c.name = name;
    c.cable_type = type;
    c.count = count;
    c.mm_total = count * mm_each;
    c.cost = cable_cost_mm(c.mm_total, per_m);
    cb.cable_cost += c.cost;
    cb.ledger.push_back(std::move(c));
}

void add_fiber(CostBreakdown& cb, long long mm_total, Millicents per_m) {
    CostBreakdown::CableClass c;
    c.name = "inter-container fiber";
    c.cable_type = "mmf";
    c.count = 0;
    c.mm_total = mm_total;
    c.cost = cable_cost_mm(mm_total, per_m);
    cb.cable_cost += c.cost;
    cb.ledger.push_back(std::move(c));
}

// Property-6 fiber length in millimeters, exact integer arithmetic:
// (2/3)*(m*(n^3-n)*(L+dL) + n*(m^3-m)*(W+dW)).
long long fiber_mm(int m, int n, const ModricGeometry& g) {
    auto span_mm = [](double a, double b) { return std::llround((a + b) * 1000.0); };
    long long row_units = 2ll * (static_cast<long long>(n) * n * n - n) / 3 * m;
    long long col_units = 2ll * (static_cast<long long>(m) * m * m - m) / 3 * n;
    return row_units * span_mm(g.length_m, g.gap_row_m) +
           col_units * span_mm(g.width_m, g.gap_col_m);
}

}  // namespace

CostBreakdown cost_modric(const ModricConfig& cfg, const PriceBook& prices, const RackModel& rack,
                          bool merchant_silicon) {
    cfg.validate();
    prices.validate();
    CostBreakdown cb;
    PortCensus pc = modric_port_census_formula(cfg);
    cb.hosts = pc.hosts;
    cb.ten_g_ports = pc.s1_ports;
    cb.one_g_ports = pc.s2_ports;
    Millicents ten_price = merchant_silicon ? prices.merchant_ten_gbe_port : prices.ten_gbe_port;
    cb.switch_cost = cb.ten_g_ports * ten_price + cb.one_g_ports * prices.gbe_port;

    const long long containers = cfg.containers();
    int cbn_q = rack.cbn_full_population ? 6 : cfg.q;
    add_cable(cb, "inter-epsc mesh", "cat6", containers * 6ll * cbn_q, rack.inter_rack_mm,
              prices.cat6_per_m);
    add_cable(cb, "intra-epsc mesh", "cat6", containers * 2ll * cbn_q * (cbn_q - 1),
              rack.intra_rack_mm, prices.cat6_per_m);
    add_cable(cb, "eps-as", "cat6", containers * 4ll * cfg.x, rack.inter_rack_mm,
              prices.cat6_per_m);
    add_cable(cb, "host-as", "cat5e", containers * static_cast<long long>(cfg.x) * cfg.y,
              rack.intra_rack_mm, prices.cat5e_per_m);
    add_fiber(cb, fiber_mm(cfg.m, cfg.n, cfg.geometry), prices.mmf_per_m);
    return cb;
}

CostBreakdown cost_mdcube(const MdcubeParams& p, const ModricGeometry& geometry,
                          const PriceBook& prices, const RackModel& rack) {
    if (p.k < 1) throw Unsupported("MDCube cost model needs k >= 1");
    prices.validate();
    CostBreakdown cb;
    PortCensus pc = mdcube_port_census_formula(p);
    cb.hosts = pc.hosts;
    cb.ten_g_ports = pc.s1_ports;
    cb.one_g_ports = pc.s2_ports;
    cb.switch_cost = cb.ten_g_ports * prices.ten_gbe_port + cb.one_g_ports * prices.gbe_port;

    const long long containers = static_cast<long long>(p.m) * p.n;
    long long rk1 = 1;
    for (int i = 0; i <= p.k; ++i) rk1 *= p.r;
    add_cable(cb, "host level-0", "cat5e", containers * rk1, rack.intra_rack_mm,
              prices.cat5e_per_m);
    // sum_{i=1..k} i * r^(i+1) links to the upper switch levels
    long long upper = 0, pw = static_cast<long long>(p.r) * p.r;
    for (int i = 1; i <= p.k; ++i) {
        upper += static_cast<long long>(i) * pw;
        pw *= p.r;
    }
    add_cable(cb, "host level-k", "cat5e", containers * upper, rack.inter_rack_mm,
              prices.cat5e_per_m);
    add_fiber(cb, fiber_mm(p.m, p.n, geometry), prices.mmf_per_m);
    return cb;
}

CostBreakdown cost_fattree(int radix, const PriceBook& prices) {
    if (radix < 4 || radix % 2 != 0)
        throw InvalidRadix("fat-tree radix must be even and >= 4");
    prices.validate();
    CostBreakdown cb;
    const long long R = radix;
    cb.hosts = R * R * R / 4;
    cb.one_g_ports = 5 * R * R * R / 4;
    cb.ten_g_ports = 0;
    cb.switch_cost = cb.one_g_ports * prices.gbe_port;
    // cable counts as published: R^3/4 host links and R^2/4 access-to-
    // aggregation links at 1 m, R^3/4 aggregation-to-core links at 3 m
    add_cable(cb, "host-access", "cat5e", R * R * R / 4, 1000, prices.cat5e_per_m);
    add_cable(cb, "access-aggregation", "cat5e", R * R / 4, 1000, prices.cat5e_per_m);
    add_cable(cb, "aggregation-core", "cat5e", R * R * R / 4, 3000, prices.cat5e_per_m);
    return cb;
}

namespace {

struct PrintedRow {
    const char* label;
    long long hosts, ten_g, one_g;
    long long sw_th, cable_th, total_th;  // thousandths of M$
};

// Published switch-port and cost table.
constexpr PrintedRow kTable3Modric[] = {
    {"modric m=10 n=10 q=2 x=18", 72000, 24800, 72000, 19600, 1136, 20736},
    {"modric m=15 n=15 q=3 x=28", 252000, 89100, 252000, 69750, 5345, 75095},
    {"modric m=20 n=20 q=5 x=38", 608000, 238400, 608000, 180000, 16264, 196264},
    {"modric m=25 n=25 q=6 x=48", 1200000, 480000, 1200000, 360000, 38799, 398799},
};
constexpr int kTable3ModricParams[][4] = {
    {10, 10, 2, 18}, {15, 15, 3, 28}, {20, 20, 5, 38}, {25, 25, 6, 48}};

constexpr PrintedRow kTable3Mdcube[] = {
    {"mdcube m=10 n=10 r=27", 72900, 7200, 145800, 18180, 1471, 19651},
    {"mdcube m=15 n=15 r=33", 245025, 25200, 490050, 61605, 6491, 68096},
    {"mdcube m=20 n=20 r=39", 608400, 60800, 1216800, 152080, 19229, 171309},
    {"mdcube m=25 n=25 r=44", 1210000, 120000, 2420000, 302000, 44797, 346797},
};
constexpr int kTable3MdcubeParams[][3] = {{10, 10, 27}, {15, 15, 33}, {20, 20, 39}, {25, 25, 44}};

constexpr PrintedRow kTable3Fattree[] = {
    {"fattree R=66", 71874, 0, 359370, 35937, 571, 35508},
    {"fattree R=100", 250000, 0, 1250000, 125000, 1985, 126985},
    {"fattree R=134", 601526, 0, 3007630, 300763, 4773, 305546},
    {"fattree R=168", 1185408, 0, 5927040, 592704, 9402, 602106},
};
constexpr int kTable3FattreeRadix[] = {66, 100, 134, 168};

// Published merchant-silicon variant of the MODRIC rows.
constexpr PrintedRow kTable5[] = {
    {"modric-merchant 72000 hosts", 72000, 24800, 72000, 14144, 1136, 15280},
    {"modric-merchant 252000 hosts", 252000, 89100, 252000, 50150, 5345, 55496},
    {"modric-merchant 608000 hosts", 608000, 238400, 608000, 127550, 16264, 144814},
    {"modric-merchant 1200000 hosts", 1200000, 480000, 1200000, 254400, 38799, 293199},
};

ModricConfig table_modric_cfg(const int params[4]) {
    ModricConfig cfg;
    cfg.m = params[0];
    cfg.n = params[1];
    cfg.q = params[2];
    cfg.x = params[3];
    cfg.y = 40;
    cfg.cap_s1_gbps = 10.0;
    cfg.cap_s2_gbps = 1.0;
    return cfg;
}

TableComparison compare(const PrintedRow& printed, CostBreakdown computed) {
    TableComparison tc;
    tc.label = printed.label;
    tc.computed = std::move(computed);
    tc.printed_hosts = printed.hosts;
    tc.printed_ten_g = printed.ten_g;
    tc.printed_one_g = printed.one_g;
    tc.printed_switch_thousandths = printed.sw_th;
    tc.printed_cable_thousandths = printed.cable_th;
    tc.printed_total_thousandths = printed.total_th;
    auto note = [&tc](const std::string& s) { tc.flags.push_back(s); };
    if (tc.computed.hosts != printed.hosts)
        note("hosts: computed " + std::to_string(tc.computed.hosts) + " vs printed " +
             std::to_string(printed.hosts));
    if (tc.computed.ten_g_ports != printed.ten_g)
        note("10GbE ports: computed " + std::to_string(tc.computed.ten_g_ports) +
             " vs printed " + std::to_string(printed.ten_g));
    if (tc.computed.one_g_ports != printed.one_g)
        note("GbE ports: computed " + std::to_string(tc.computed.one_g_ports) + " vs printed " +
             std::to_string(printed.one_g));
    if (mdollars_thousandths(tc.computed.switch_cost) != printed.sw_th)
        note("switch M$: computed " + mdollars_3dp(tc.computed.switch_cost) + " vs printed " +
             mdollars_3dp(printed.sw_th * 100000000ll));
    if (mdollars_thousandths(tc.computed.cable_cost) != printed.cable_th)
        note("cable M$: computed " + mdollars_3dp(tc.computed.cable_cost) + " vs printed " +
             mdollars_3dp(printed.cable_th * 100000000ll));
    if (mdollars_thousandths(tc.computed.total()) != printed.total_th)
        note("total M$: computed " + mdollars_3dp(tc.computed.total()) + " vs printed " +
             mdollars_3dp(printed.total_th * 100000000ll));
    return tc;
}

}  // namespace

std::vector<TableComparison> reproduce_table3(const PriceBook& prices) {
    std::vector<TableComparison> rows;
    RackModel rack;
    ModricGeometry geo;
    for (int i = 0; i < 4; ++i)
        rows.push_back(
            compare(kTable3Modric[i], cost_modric(table_modric_cfg(kTable3ModricParams[i]),
                                                  prices, rack, false)));
    for (int i = 0; i < 4; ++i) {
        MdcubeParams p;
        p.m = kTable3MdcubeParams[i][0];
        p.n = kTable3MdcubeParams[i][1];
        p.r = kTable3MdcubeParams[i][2];
        p.k = 1;
        p.z = 4;
        rows.push_back(compare(kTable3Mdcube[i], cost_mdcube(p, geo, prices, rack)));
    }
    for (int i = 0; i < 4; ++i)
        rows.push_back(compare(kTable3Fattree[i], cost_fattree(kTable3FattreeRadix[i], prices)));
    return rows;
}

std::vector<TableComparison> reproduce_table5(const PriceBook& prices) {
    std::vector<TableComparison> rows;
    RackModel rack;
    for (int i = 0; i < 4; ++i)
        rows.push_back(compare(
            kTable5[i], cost_modric(table_modric_cfg(kTable3ModricParams[i]), prices, rack,
                                    /*merchant_silicon=*/true)));
    return rows;
}

std::string table_comparisons_to_csv(const std::vector<TableComparison>& rows) {
    std::ostringstream os;
    os << "label,hosts,ten_gbe_ports,gbe_ports,switch_mdollars,cable_mdollars,total_mdollars,"
          "printed_total_mdollars,flags\n";
    for (const auto& r : rows) {
        os << r.label << ',' << r.computed.hosts << ',' << r.computed.ten_g_ports << ','
           << r.computed.one_g_ports << ',' << mdollars_3dp(r.computed.switch_cost) << ','
           << mdollars_3dp(r.computed.cable_cost) << ',' << mdollars_3dp(r.computed.total())
           << ',' << mdollars_3dp(r.printed_total_thousandths * 100000000ll) << ',';
        if (r.flags.empty()) {
            os << "ok";
        } else {
            for (size_t i = 0; i < r.flags.size(); ++i)
                os << (i ? "; " : "") << r.flags[i];
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace modric
