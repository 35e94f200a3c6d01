#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "heisflow/evolution.hpp"
#include "heisflow/groundstate.hpp"
#include "heisflow/modulation.hpp"

// Plain-text persistence. Numbers are written in shortest round-trip form, so
// read(write(x)) reproduces x bit for bit. Every write goes to a temporary
// file that is renamed into place.
namespace heisflow::io {

namespace fs = std::filesystem;

void write_text_atomic(const fs::path& path, const std::string& content);
std::string read_text(const fs::path& path);

std::string format_double(double x);
double parse_double(const std::string& s);

// CSV "sigma,re,im" plus <path>.json {sigma_min, sigma_max, n_points, rule, spacing}.
void write_hardy(const fs::path& csv, const HardyFunction& f);
HardyFunction read_hardy(const fs::path& csv);

// CSV "k,sign,sigma,re,im" plus <path>.json with the grid spec.
void write_radial(const fs::path& csv, const RadialField& u);
RadialField read_radial(const fs::path& csv);

// series.csv: t, momentum, energy, l4, w_norm, uplus_norm, dt_norm, dist_orbit,
// x_s, x_theta, x_alpha, anchor_id. The last four come from track when given.
void write_series(const fs::path& csv, const std::vector<SeriesRow>& series, const ModulationTrack* track = nullptr);

void write_groundstates(const fs::path& csv, const GroundStateTable& table);

}  // namespace heisflow::io
