#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace heisflow::cli {

// Flat sectioned key=value configuration:
//
//   # comment
//   [section]
//   key = value
//
// Every key must be declared with a default before a file or flag can set it.
// Values remember where they came from (default, file, flag, env).
class Config {
public:
    struct Entry {
        std::string value;
        std::string source = "default";
        std::string help;
    };

    void declare(const std::string& name, const std::string& value, const std::string& help);
    bool has(const std::string& name) const { return entries_.count(name) > 0; }
    void set(const std::string& name, const std::string& value, const std::string& source);
    void load_file(const std::filesystem::path& path);
    void load_text(const std::string& text, const std::string& origin);

    const std::map<std::string, Entry>& entries() const { return entries_; }

    std::string str(const std::string& name) const;
    double num(const std::string& name) const;
    double positive(const std::string& name) const;
    std::size_t count(const std::string& name) const;
    bool flag(const std::string& name) const;
    std::vector<double> list(const std::string& name) const;
    std::uint64_t seed(const std::string& name) const;

    // {"section": {"key": value}} and {"section.key": source}
    nlohmann::json echo() const;
    nlohmann::json sources() const;
    // entries of one section with their sources, for the manifest's tolerance table
    nlohmann::json section(const std::string& prefix) const;

private:
    const Entry& entry(const std::string& name) const;
    std::map<std::string, Entry> entries_;
};

}  // namespace heisflow::cli
