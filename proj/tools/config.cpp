#include "config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "heisflow/common.hpp"
#include "heisflow/io.hpp"

namespace heisflow::cli {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void Config::declare(const std::string& name, const std::string& value, const std::string& help) {
    entries_[name] = {value, "default", help};
}

void Config::set(const std::string& name, const std::string& value, const std::string& source) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("unknown configuration key \"" + name + "\"");
    it->second.value = trim(value);
    it->second.source = source;
}

void Config::load_file(const std::filesystem::path& path) { load_text(io::read_text(path), path.string()); }

void Config::load_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto where = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        if (section.empty()) throw ConfigError(where + ": key outside of a section");
        auto key = section + "." + trim(line.substr(0, eq));
        if (!has(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
        set(key, line.substr(eq + 1), "file");
    }
}

const Config::Entry& Config::entry(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("undeclared configuration key \"" + name + "\"");
    return it->second;
}

std::string Config::str(const std::string& name) const { return entry(name).value; }

double Config::num(const std::string& name) const {
    const auto& v = entry(name).value;
    double x = 0.0;
    try {
        x = io::parse_double(v);
    } catch (const ConfigError&) {
        throw ConfigError(name + ": not a number: \"" + v + "\"");
    }
    if (!std::isfinite(x)) throw ConfigError(name + ": must be finite");
    return x;
}

double Config::positive(const std::string& name) const {
    double x = num(name);
    if (!(x > 0.0)) throw ConfigError(name + ": must be positive");
    return x;
}

std::size_t Config::count(const std::string& name) const {
    const auto& v = entry(name).value;
    std::size_t x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(name + ": not a non-negative integer: \"" + v + "\"");
    return x;
}

std::uint64_t Config::seed(const std::string& name) const { return static_cast<std::uint64_t>(count(name)); }

bool Config::flag(const std::string& name) const {
    const auto& v = entry(name).value;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(name + ": not a boolean: \"" + v + "\"");
}

std::vector<double> Config::list(const std::string& name) const {
    const auto& v = entry(name).value;
    std::vector<double> out;
    std::istringstream in(v);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        cell = trim(cell);
        if (cell.empty()) continue;
        try {
            out.push_back(io::parse_double(cell));
        } catch (const ConfigError&) {
            throw ConfigError(name + ": not a number: \"" + cell + "\"");
        }
    }
    if (out.empty()) throw ConfigError(name + ": empty list");
    return out;
}

nlohmann::json Config::echo() const {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [name, e] : entries_) {
        auto dot = name.find('.');
        out[name.substr(0, dot)][name.substr(dot + 1)] = e.value;
    }
    return out;
}

nlohmann::json Config::sources() const {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [name, e] : entries_)
        if (e.source != "default") out[name] = e.source;
    return out;
}

nlohmann::json Config::section(const std::string& prefix) const {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [name, e] : entries_)
        if (name.rfind(prefix + ".", 0) == 0) {
            nlohmann::json v;
            try {
                v = io::parse_double(e.value);
            } catch (const ConfigError&) {
                v = e.value;
            }
            out[name.substr(prefix.size() + 1)] = {{"value", v}, {"source", e.source}};
        }
    return out;
}

}  // namespace heisflow::cli
