#include "modric/addressing.hpp"

#include <cstdio>

namespace modric {

namespace {

int bits_for(int values) {
    int b = 1;
    while ((1 << b) < values) ++b;
    return b;
}

void check_field(int v, int bits, const char* name) {
    if (v < 0 || v >= (1 << bits))
        throw FieldOverflow(std::string(name) + "=" + std::to_string(v) +
                            " does not fit in " + std::to_string(bits) + " bits");
}

}  // namespace

BitPlan plan_bits(const ModricConfig& cfg) {
    BitPlan p;
    p.k1 = bits_for(cfg.m);
    p.k2 = bits_for(cfg.n);
    p.k3 = bits_for(cfg.x + 4);  // ranks run 4 .. 4+x-1
    int k4min = bits_for(cfg.y);
    int used = p.k1 + p.k2 + p.k3 + k4min;
    if (used > 24)
        throw Overflow("network needs " + std::to_string(used) +
                       " host bits, only 24 available");
    p.k4 = 24 - p.k1 - p.k2 - p.k3;
    return p;
}

uint32_t encode_addr(const AddrFields& f, const BitPlan& plan) {
    check_field(f.row, plan.k1, "row");
    check_field(f.col, plan.k2, "col");
    check_field(f.as_rank, plan.k3, "as_rank");
    check_field(f.host, plan.k4, "host");
    uint32_t host_bits = (static_cast<uint32_t>(f.row) << (plan.k2 + plan.k3 + plan.k4)) |
                         (static_cast<uint32_t>(f.col) << (plan.k3 + plan.k4)) |
                         (static_cast<uint32_t>(f.as_rank) << plan.k4) |
                         static_cast<uint32_t>(f.host);
    return (10u << 24) | host_bits;
}

AddrFields decode_addr(uint32_t addr, const BitPlan& plan) {
    if ((addr >> 24) != 10u) throw FieldOverflow("address outside the 10/8 prefix");
    AddrFields f;
    f.host = static_cast<int>(addr & ((1u << plan.k4) - 1));
    addr >>= plan.k4;
    f.as_rank = static_cast<int>(addr & ((1u << plan.k3) - 1));
    addr >>= plan.k3;
    f.col = static_cast<int>(addr & ((1u << plan.k2) - 1));
    addr >>= plan.k2;
    f.row = static_cast<int>(addr & ((1u << plan.k1) - 1));
    return f;
}

std::string addr_to_string(uint32_t addr) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", addr >> 24, (addr >> 16) & 0xff,
                  (addr >> 8) & 0xff, addr & 0xff);
    return buf;
}

uint32_t addr_from_string(const std::string& s) {
    unsigned a = 0, b = 0, c = 0, d = 0;
    if (std::sscanf(s.c_str(), "%u.%u.%u.%u", &a, &b, &c, &d) != 4 || a > 255 || b > 255 ||
        c > 255 || d > 255)
        throw FieldOverflow("not a dotted-quad address: " + s);
    return (a << 24) | (b << 16) | (c << 8) | d;
}

}  // namespace modric
