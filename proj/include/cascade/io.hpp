#pragma once

#include "cascade/config.hpp"
#include "cascade/grid.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace cascade {

inline constexpr const char* kToolkitVersion = "0.1.0";

// All CSV emitters write the documented fixed schemas with %.17g formatting,
// so outputs round-trip bit-exactly and identical runs produce identical
// bytes.  Writers throw std::runtime_error on I/O failure.

void ensure_dir(const std::string& dir);

// Schema: t,a,x,value over the full (age, x) lattice of one slice.
void write_slice_csv(const std::string& path, const TensorGrid& g, const Field& f, double t);

// Same schema over every slice of a trajectory.
void write_trajectory_csv(const std::string& path, const TensorGrid& g, const Trajectory& traj);

// Generic small table: one header row, then numeric rows.
void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

void write_json(const std::string& path, const nlohmann::json& j);

nlohmann::json grid_json(const TensorGrid& g);

// Run manifest: command, config hash + source name, seed, grid, versions,
// and the list of files the command wrote.
nlohmann::json manifest_json(const ExperimentConfig& cfg, const std::string& command,
                             const std::vector<std::string>& outputs);

} // namespace cascade
