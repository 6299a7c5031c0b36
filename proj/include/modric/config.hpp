#pragma once

#include <map>
#include <string>

#include "modric/topology.hpp"

namespace modric {

// Plain key=value configuration with [section] headers; '#' starts a
// comment. Unknown keys are hard errors.
using ConfigSections = std::map<std::string, std::map<std::string, std::string>>;

ConfigSections parse_config_text(const std::string& text);
ConfigSections load_config_file(const std::string& path);

// Applies the [modric] section onto cfg; keys it does not mention are left
// untouched so CLI flags can pre- or post-fill them.
void apply_modric_section(const ConfigSections& sections, ModricConfig& cfg);

std::string read_file(const std::string& path);
// Write-temp-then-rename; parent directories are created if absent.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace modric
