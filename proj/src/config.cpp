#include "modric/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace modric {

ConfigSections parse_config_text(const std::string& text) {
    ConfigSections out;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string& s) {
            size_t b = s.find_first_not_of(" \t\r");
            size_t e = s.find_last_not_of(" \t\r");
            s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
        };
        trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConstraintViolation("config line " + std::to_string(lineno) +
                                          ": unterminated section header");
            section = line.substr(1, line.size() - 2);
            out[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConstraintViolation("config line " + std::to_string(lineno) +
                                      ": expected key=value");
        std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        trim(key);
        trim(value);
        out[section][key] = value;
    }
    return out;
}

ConfigSections load_config_file(const std::string& path) {
    return parse_config_text(read_file(path));
}

void apply_modric_section(const ConfigSections& sections, ModricConfig& cfg) {
    auto it = sections.find("modric");
    if (it == sections.end()) return;
    for (const auto& [key, value] : it->second) {
        auto as_int = [&]() { return std::stoi(value); };
        auto as_double = [&]() { return std::stod(value); };
        if (key == "m")
            cfg.m = as_int();
        else if (key == "n")
            cfg.n = as_int();
        else if (key == "q")
            cfg.q = as_int();
        else if (key == "x")
            cfg.x = as_int();
        else if (key == "y")
            cfg.y = as_int();
        else if (key == "cap_s1_gbps")
            cfg.cap_s1_gbps = as_double();
        else if (key == "cap_s2_gbps")
            cfg.cap_s2_gbps = as_double();
        else if (key == "eps_port_budget")
            cfg.eps_port_budget = as_int();
        else if (key == "length_m")
            cfg.geometry.length_m = as_double();
        else if (key == "width_m")
            cfg.geometry.width_m = as_double();
        else if (key == "gap_row_m")
            cfg.geometry.gap_row_m = as_double();
        else if (key == "gap_col_m")
            cfg.geometry.gap_col_m = as_double();
        else if (key == "extra_links") {
            if (value == "none")
                cfg.extra_links = ExtraLinkPolicy::None;
            else if (value == "rows-first")
                cfg.extra_links = ExtraLinkPolicy::RowsFirst;
            else
                throw ConstraintViolation("extra_links must be 'none' or 'rows-first'");
        } else {
            throw ConstraintViolation("unknown [modric] key '" + key + "'");
        }
    }
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConstraintViolation("cannot open " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void atomic_write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConstraintViolation("cannot write " + tmp.string());
        f << content;
    }
    fs::rename(tmp, target);
}

}  // namespace modric
