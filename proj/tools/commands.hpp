#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "config.hpp"

namespace heisflow::cli {

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    std::string tolerance_key;  // config key the tolerance came from
    bool pass = false;
};

// State of one subcommand invocation; serialized into manifest.json.
class Run {
public:
    Run(std::string subcommand, Config cfg, std::filesystem::path out, std::size_t workers);

    const Config& cfg() const { return cfg_; }
    const std::filesystem::path& out() const { return out_; }
    std::size_t workers() const { return workers_; }

    // Records value <= tolerance (or the supplied verdict) under the name.
    void check(const std::string& name, double value, const std::string& tolerance_key, bool pass);
    void check_le(const std::string& name, double value, const std::string& tolerance_key);
    void check_ge(const std::string& name, double value, const std::string& tolerance_key);
    void derived(const std::string& key, nlohmann::json value) { derived_[key] = std::move(value); }
    // Path inside the output directory; recorded in the manifest.
    std::filesystem::path file(const std::string& relative);
    void stage(const std::string& name) { stage_ = name; }
    const std::string& stage() const { return stage_; }

    template <class F>
    auto timed(const std::string& name, F&& f) {
        auto t0 = std::chrono::steady_clock::now();
        stage_ = name;
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            timings_[name] = seconds_since(t0);
        } else {
            auto r = f();
            timings_[name] = seconds_since(t0);
            return r;
        }
    }

    bool passed() const;
    void write_manifest(const std::string& status, const std::string& error = "");

private:
    static double seconds_since(std::chrono::steady_clock::time_point t0);

    std::string subcommand_;
    Config cfg_;
    std::filesystem::path out_;
    std::size_t workers_;
    std::vector<Check> checks_;
    std::vector<std::string> files_;
    nlohmann::json derived_ = nlohmann::json::object();
    nlohmann::json timings_ = nlohmann::json::object();
    std::string stage_ = "setup";
    std::chrono::steady_clock::time_point start_;
};

struct Command {
    std::string name;
    std::string description;
    std::function<void(Config&)> declare;
    std::function<void(Run&)> run;
};

const std::vector<Command>& commands();

}  // namespace heisflow::cli
