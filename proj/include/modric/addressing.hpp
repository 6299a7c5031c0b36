#pragma once

#include <cstdint>
#include <string>

#include "modric/topology.hpp"

namespace modric {

struct Overflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FieldOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Widths of the row/column/AS/host fields inside the 24 host bits of
// 10.0.0.0/8. k1+k2+k3+k4 == 24.
struct BitPlan {
    int k1 = 0, k2 = 0, k3 = 0, k4 = 0;
    friend bool operator==(const BitPlan&, const BitPlan&) = default;
};

struct AddrFields {
    int row = 0, col = 0, as_rank = 0, host = 0;
    friend bool operator==(const AddrFields&, const AddrFields&) = default;
};

// Minimal ceil-log2 widths per field (clamped at 1 bit), slack appended to
// the host field. AS ranks start at 4, so k3 covers x+4 values.
BitPlan plan_bits(const ModricConfig& cfg);

uint32_t encode_addr(const AddrFields& f, const BitPlan& plan);
AddrFields decode_addr(uint32_t addr, const BitPlan& plan);

std::string addr_to_string(uint32_t addr);    // dotted quad
uint32_t addr_from_string(const std::string& s);

}  // namespace modric
