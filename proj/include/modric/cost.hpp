#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modric/topology.hpp"

namespace modric {

// Money is held in integer millicents (1/1000 cent); every table value in
// play is exact in this unit, so reproduction never depends on float drift.
using Millicents = long long;

constexpr Millicents dollars(long long d) { return d * 100000ll; }

// Rendered M$ at 3 decimals, round half up ("19.600", "1.136").
std::string mdollars_3dp(Millicents v);
// Integer thousandths of a M$ (19.6 M$ -> 19600), round half up.
long long mdollars_thousandths(Millicents v);

struct PriceBook {
    Millicents gbe_port = dollars(100);
    Millicents ten_gbe_port = dollars(500);
    Millicents merchant_ten_gbe_port = dollars(280);
    Millicents cat5e_per_m = 198 * 1000ll;   // $1.98/m
    Millicents cat6_per_m = 260 * 1000ll;    // $2.60/m
    Millicents mmf_per_m = 1285 * 1000ll;    // $12.85/m
    void validate() const;
};

PriceBook parse_price_book(const std::string& text);

struct RackModel {
    long long intra_rack_mm = 1000;  // average intra-rack cable
    long long inter_rack_mm = 3000;  // average inter-rack cable
    // Cost the CBN copper at the fully populated q=6 EPSC rack regardless of
    // the configured q; this is what the published cable column uses. The
    // faithful per-q ledger is the alternative.
    bool cbn_full_population = true;
};

struct CostBreakdown {
    long long hosts = 0;
    long long ten_g_ports = 0;
    long long one_g_ports = 0;
    Millicents switch_cost = 0;
    Millicents cable_cost = 0;
    Millicents total() const { return switch_cost + cable_cost; }
    struct CableClass {
        std::string name;        // "host-as", "inter-epsc", "fiber", ...
        std::string cable_type;  // "cat5e", "cat6", "mmf"
        long long count = 0;     // cables (0 for the geometric fiber entry)
        long long mm_total = 0;
        Millicents cost = 0;
    };
    std::vector<CableClass> ledger;
};

CostBreakdown cost_modric(const ModricConfig& cfg, const PriceBook& prices,
                          const RackModel& rack, bool merchant_silicon = false);
CostBreakdown cost_mdcube(const MdcubeParams& p, const ModricGeometry& geometry,
                          const PriceBook& prices, const RackModel& rack);
CostBreakdown cost_fattree(int radix, const PriceBook& prices);

// Printed-table reproduction with per-field discrepancy flags.
struct TableComparison {
    std::string label;
    CostBreakdown computed;
    long long printed_hosts = 0;
    long long printed_ten_g = 0;
    long long printed_one_g = 0;
    long long printed_switch_thousandths = 0;  // M$ * 1000
    long long printed_cable_thousandths = 0;
    long long printed_total_thousandths = 0;
    std::vector<std::string> flags;  // human-readable mismatch notes
    bool clean() const { return flags.empty(); }
};

std::vector<TableComparison> reproduce_table3(const PriceBook& prices);
std::vector<TableComparison> reproduce_table5(const PriceBook& prices);

std::string table_comparisons_to_csv(const std::vector<TableComparison>& rows);

}  // namespace modric
