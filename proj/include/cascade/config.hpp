#pragma once

#include "cascade/degeneracy.hpp"
#include "cascade/grid.hpp"
#include "cascade/hum.hpp"
#include "cascade/rates.hpp"
#include "cascade/weights.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cascade {

// Experiment configuration: one INI-style text file per run.
//
//   # comment
//   [grid]
//   T = 2.0
//   Nt = 80
//
// Sections and keys are case-sensitive.  Values are scalars, booleans
// (true/false), word lists, or number lists (whitespace or comma separated).
// Physical functions are chosen from closed-form presets with parameters or
// loaded from CSV tables -- the file never embeds code.  Every diagnostic
// carries file:line so a bad experiment fails with a pointed message.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ConfigFile {
  public:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool used = false;
    };

    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& name);

    const std::string& name() const { return name_; }
    const std::string& text() const { return text_; }

    bool has_section(const std::string& sec) const;
    bool has(const std::string& sec, const std::string& key) const;

    // Typed getters; the *_or forms fall back to a default when the key is
    // absent.  Parse failures throw ConfigError with "file:line:".
    std::string get_str(const std::string& sec, const std::string& key) const;
    std::string get_str_or(const std::string& sec, const std::string& key,
                           const std::string& fallback) const;
    double get_num(const std::string& sec, const std::string& key) const;
    double get_num_or(const std::string& sec, const std::string& key, double fallback) const;
    std::size_t get_count(const std::string& sec, const std::string& key) const;
    std::size_t get_count_or(const std::string& sec, const std::string& key,
                             std::size_t fallback) const;
    bool get_bool_or(const std::string& sec, const std::string& key, bool fallback) const;
    std::vector<double> get_num_list(const std::string& sec, const std::string& key) const;

    // Keys never read by any getter (catches typos); sorted "sec.key" names.
    std::vector<std::string> unused_keys() const;

    [[noreturn]] void fail(const std::string& sec, const std::string& key,
                           const std::string& msg) const;

  private:
    std::string name_;
    std::string text_;
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::map<std::string, int> section_lines_;
};

// Age-by-space scalar data built from a preset or a CSV table.  Used for
// initial slices ([initial.u], [initial.v]) and adjoint terminal slices
// ([terminal.z], [terminal.y]).
//
//   kind = zero | gaussian | bubbles | band_bump | band_random | table
//
//   gaussian:    amp * exp(-((a-a0)/wa)^2 - ((x-x0)/wx)^2) * 4x(1-x)
//   bubbles:     amp * sin(ma pi a / A) * sin(mx pi x)
//   band_bump:   amp * sin(pi (a-lo)/(A-lo))_+ * sin(pi x), lo from [hum] delta
//   band_random: seeded sum of band bubble modes (ma <= modes, mx <= modes)
//   table:       CSV rows "a,x,value" on exact grid nodes
struct FieldSpec {
    std::string kind = "zero";
    double amp = 1.0;
    double a0 = 0.3, x0 = 0.5, wa = 0.15, wx = 0.15;
    std::size_t ma = 1, mx = 1, modes = 8;
    std::string table;

    static FieldSpec from_config(const ConfigFile& f, const std::string& sec);
    Field build(const TensorGrid& g, double band_lo, std::uint64_t seed) const;
};

struct ExperimentConfig {
    // raw file (kept for the manifest hash)
    std::string source_name;
    std::string source_text;

    TensorGrid grid;
    KModel k1, k2;
    RatePack rates;

    FieldSpec initial_u, initial_v;
    FieldSpec terminal_z, terminal_y;

    // Carleman sweep
    std::vector<double> s_values{1.0, 2.0, 4.0, 8.0};
    double weight_R = 1.0;
    CarlemanWindow window;       // defaults to the full cylinder
    std::size_t ensemble = 20;   // adjoint ensemble size (carleman/observability)

    ControlSetup hum;
    bool hum_full_interval = true;  // prepend the free-flight segment

    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool strict = false;
    int threads = 0;  // 0: library default
    std::string dump = "terminal";  // terminal | full trajectory CSVs

    // Parses, validates, and builds every sub-object; unknown keys are
    // rejected so typos cannot silently fall back to defaults.
    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_file(const ConfigFile& f);
};

// FNV-1a 64-bit hash of the raw config text, hex encoded (manifest id).
std::string fnv1a_hex(const std::string& text);

} // namespace cascade
