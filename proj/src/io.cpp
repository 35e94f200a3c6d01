#include "heisflow/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace heisflow::io {

namespace {

using json = nlohmann::json;

fs::path sidecar(const fs::path& csv) { return fs::path(csv.string() + ".json"); }

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Data rows of a CSV whose header must equal `header`.
std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::string& header, std::size_t cols) {
    std::istringstream in(read_text(path));
    std::string line;
    if (!std::getline(in, line) || line != header)
        throw ConfigError(path.string() + ": expected header \"" + header + "\"");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != cols) throw ConfigError(path.string() + ": malformed row \"" + line + "\"");
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::size_t parse_size(const std::string& s) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("not an integer: \"" + s + "\"");
    return v;
}

json read_json(const fs::path& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace

void write_text_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw ConfigError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("not a number: \"" + s + "\"");
    return v;
}

void write_hardy(const fs::path& csv, const HardyFunction& f) {
    const auto& g = f.grid();
    std::string out = "sigma,re,im\n";
    for (std::size_t j = 0; j < f.size(); ++j)
        out += format_double(g.node(j)) + ',' + format_double(f[j].real()) + ',' + format_double(f[j].imag()) + '\n';
    json side{{"sigma_min", g.node(0)},
              {"sigma_max", g.node(g.size() - 1)},
              {"n_points", g.size()},
              {"rule", g.rule() == GridRule::cell_centered ? "cell_centered" : "trapezoid"},
              {"spacing", g.spacing()}};
    write_text_atomic(sidecar(csv), side.dump(2) + '\n');
    write_text_atomic(csv, out);
}

HardyFunction read_hardy(const fs::path& csv) {
    auto side = read_json(sidecar(csv));
    FrequencyGrid grid;
    try {
        auto n = side.at("n_points").get<std::size_t>();
        auto rule = side.at("rule").get<std::string>();
        if (rule == "cell_centered")
            grid = FrequencyGrid::cell_centered(side.at("spacing").get<double>(), n);
        else if (rule == "trapezoid")
            grid = FrequencyGrid::trapezoid(side.at("sigma_min").get<double>(), side.at("sigma_max").get<double>(), n);
        else
            throw ConfigError(csv.string() + ": unknown grid rule \"" + rule + "\"");
    } catch (const json::exception& e) {
        throw ConfigError(csv.string() + ".json: " + e.what());
    }
    auto rows = read_csv(csv, "sigma,re,im", 3);
    if (rows.size() != grid.size()) throw ConfigError(csv.string() + ": row count does not match the sidecar");
    HardyFunction f(grid);
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (parse_double(rows[j][0]) != grid.node(j)) throw ConfigError(csv.string() + ": node mismatch");
        f[j] = {parse_double(rows[j][1]), parse_double(rows[j][2])};
    }
    return f;
}

void write_radial(const fs::path& csv, const RadialField& u) {
    const auto& g = u.grid();
    const auto& s = g.spec();
    std::string out = "k,sign,sigma,re,im\n";
    for (std::size_t k = 0; k <= g.k_max(); ++k)
        for (Sign sg : {Sign::plus, Sign::minus})
            for (std::size_t m = 0; m < g.n_sigma(); ++m) {
                cplx z = u.at(k, sg, m);
                out += std::to_string(k) + (sg == Sign::plus ? ",+," : ",-,") + format_double(g.sigma(sg, m)) + ',' +
                       format_double(z.real()) + ',' + format_double(z.imag()) + '\n';
            }
    json side{{"k_max", s.k_max},         {"n_sigma", s.n_sigma},
              {"sigma_max", s.sigma_max}, {"n_s", s.n_s},
              {"nodes_per_panel", s.nodes_per_panel}, {"panel_ratio", s.panel_ratio}};
    write_text_atomic(sidecar(csv), side.dump(2) + '\n');
    write_text_atomic(csv, out);
}

RadialField read_radial(const fs::path& csv) {
    auto side = read_json(sidecar(csv));
    RadialGridSpec spec;
    try {
        spec.k_max = side.at("k_max").get<std::size_t>();
        spec.n_sigma = side.at("n_sigma").get<std::size_t>();
        spec.sigma_max = side.at("sigma_max").get<double>();
        spec.n_s = side.at("n_s").get<std::size_t>();
        spec.nodes_per_panel = side.at("nodes_per_panel").get<std::size_t>();
        spec.panel_ratio = side.at("panel_ratio").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(csv.string() + ".json: " + e.what());
    }
    RadialField u{RadialSpectralGrid(spec)};
    const auto& g = u.grid();
    auto rows = read_csv(csv, "k,sign,sigma,re,im", 5);
    if (rows.size() != g.size()) throw ConfigError(csv.string() + ": row count does not match the sidecar");
    for (const auto& r : rows) {
        std::size_t k = parse_size(r[0]);
        if (k > g.k_max() || (r[1] != "+" && r[1] != "-")) throw ConfigError(csv.string() + ": bad mode index");
        Sign sg = r[1] == "+" ? Sign::plus : Sign::minus;
        double sigma = parse_double(r[2]);
        double h = g.spacing();
        auto m = static_cast<std::size_t>(std::llround(std::abs(sigma) / h - 0.5));
        if (m >= g.n_sigma() || g.sigma(sg, m) != sigma) throw ConfigError(csv.string() + ": node mismatch");
        u.at(k, sg, m) = {parse_double(r[3]), parse_double(r[4])};
    }
    return u;
}

void write_series(const fs::path& csv, const std::vector<SeriesRow>& series, const ModulationTrack* track) {
    if (track && track->anchor.size() != series.size())
        throw ConfigError("write_series: track and series lengths differ");
    std::string out = "t,momentum,energy,l4,w_norm,uplus_norm,dt_norm,dist_orbit,x_s,x_theta,x_alpha,anchor_id\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& r = series[i];
        out += format_double(r.t) + ',' + format_double(r.momentum) + ',' + format_double(r.energy) + ',' +
               format_double(r.l4) + ',' + format_double(r.w_norm) + ',' + format_double(r.uplus_norm) + ',' +
               format_double(r.dt_norm) + ',' + format_double(r.dist_orbit);
        if (track) {
            const auto& x = track->anchor[i];
            out += ',' + format_double(x.s) + ',' + format_double(x.theta) + ',' + format_double(x.alpha) + ',' +
                   std::to_string(track->anchor_id[i]) + '\n';
        } else {
            out += ",nan,nan,nan,\n";
        }
    }
    write_text_atomic(csv, out);
}

void write_groundstates(const fs::path& csv, const GroundStateTable& table) {
    std::string out =
        "beta,residual,stabilizer,iterations,qbeta_norm_h1,dist_to_q,r_beta_norm,delta_qbeta_plus,wave_energy,"
        "truncation_sensitivity,truncation_dominated,x_s,x_theta,x_alpha\n";
    for (const auto& r : table.rows) {
        out += format_double(r.beta) + ',' + format_double(r.residual) + ',' + format_double(r.stabilizer) + ',' +
               std::to_string(r.iterations) + ',' + format_double(r.qbeta_norm_h1) + ',' + format_double(r.dist_to_q) +
               ',' + format_double(r.r_beta_norm) + ',' + format_double(r.delta_qbeta_plus) + ',' +
               format_double(r.wave_energy) + ',' + format_double(r.truncation_sensitivity) + ',' +
               (r.truncation_dominated ? "1" : "0") + ',' + format_double(r.x_star.s) + ',' +
               format_double(r.x_star.theta) + ',' + format_double(r.x_star.alpha) + '\n';
    }
    write_text_atomic(csv, out);
}

}  // namespace heisflow::io
