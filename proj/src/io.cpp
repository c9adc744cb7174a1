#include "cascade/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace cascade {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

void write_slice_rows(std::ofstream& out, const TensorGrid& g, const Field& f, double t) {
    const std::string ts = fmt(t);
    for (std::size_t j = 0; j <= g.Na; ++j) {
        const std::string as = fmt(g.a(j));
        for (std::size_t i = 0; i <= g.Nx; ++i)
            out << ts << ',' << as << ',' << fmt(g.xs[i]) << ',' << fmt(f.at(j, i)) << '\n';
    }
}

} // namespace

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

void write_slice_csv(const std::string& path, const TensorGrid& g, const Field& f, double t) {
    auto out = open_out(path);
    out << "t,a,x,value\n";
    write_slice_rows(out, g, f, t);
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

void write_trajectory_csv(const std::string& path, const TensorGrid& g, const Trajectory& traj) {
    auto out = open_out(path);
    out << "t,a,x,value\n";
    for (std::size_t s = 0; s < traj.slices.size(); ++s)
        write_slice_rows(out, g, traj.slices[s], g.t(traj.first_node + s));
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
    auto out = open_out(path);
    for (std::size_t c = 0; c < header.size(); ++c)
        out << (c ? "," : "") << header[c];
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::runtime_error("table row width mismatch in " + path);
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << fmt(row[c]);
        out << '\n';
    }
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

void write_json(const std::string& path, const nlohmann::json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

nlohmann::json grid_json(const TensorGrid& g) {
    return {{"T", g.T},   {"A", g.A},   {"Nt", g.Nt},          {"Na", g.Na},
            {"Nx", g.Nx}, {"dt", g.dt}, {"grading", g.grading}};
}

nlohmann::json manifest_json(const ExperimentConfig& cfg, const std::string& command,
                             const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = {{"source", cfg.source_name}, {"fnv1a", fnv1a_hex(cfg.source_text)}};
    j["seed"] = cfg.seed;
    j["grid"] = grid_json(cfg.grid);
    j["versions"] = {{"toolkit", kToolkitVersion},
                     {"compiler", __VERSION__},
                     {"csv_schema", 1}};
    j["outputs"] = outputs;
    return j;
}

} // namespace cascade
