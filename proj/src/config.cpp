#include "cascade/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

namespace cascade {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string where(const std::string& name, int line) {
    return name + ":" + std::to_string(line) + ": ";
}

double parse_double(const std::string& name, int line, const std::string& key,
                    const std::string& raw) {
    const std::string s = trim(raw);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
        throw ConfigError(where(name, line) + "key '" + key + "': not a finite number: '" +
                          raw + "'");
    return v;
}

std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

} // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& name) {
    ConfigFile f;
    f.name_ = name;
    f.text_ = text;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        const std::string s = trim(line);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError(where(name, lineno) + "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty())
                throw ConfigError(where(name, lineno) + "empty section name");
            f.section_lines_.emplace(section, lineno);
            f.sections_[section];
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where(name, lineno) + "expected 'key = value', got '" + s + "'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty())
            throw ConfigError(where(name, lineno) + "empty key");
        if (section.empty())
            throw ConfigError(where(name, lineno) + "key '" + key + "' before any [section]");
        auto [it, fresh] = f.sections_[section].emplace(key, Entry{value, lineno, false});
        if (!fresh)
            throw ConfigError(where(name, lineno) + "duplicate key '" + section + "." + key +
                              "' (first at line " + std::to_string(it->second.line) + ")");
    }
    return f;
}

bool ConfigFile::has_section(const std::string& sec) const {
    return sections_.count(sec) != 0;
}

bool ConfigFile::has(const std::string& sec, const std::string& key) const {
    auto s = sections_.find(sec);
    return s != sections_.end() && s->second.count(key) != 0;
}

void ConfigFile::fail(const std::string& sec, const std::string& key,
                      const std::string& msg) const {
    int line = 0;
    if (auto s = sections_.find(sec); s != sections_.end()) {
        if (auto k = s->second.find(key); k != s->second.end())
            line = k->second.line;
        else if (auto sl = section_lines_.find(sec); sl != section_lines_.end())
            line = sl->second;
    }
    throw ConfigError(where(name_, line) + "[" + sec + "] " + key + ": " + msg);
}

std::string ConfigFile::get_str(const std::string& sec, const std::string& key) const {
    auto s = sections_.find(sec);
    if (s == sections_.end())
        throw ConfigError(name_ + ": missing section [" + sec + "] (wanted key '" + key + "')");
    auto k = s->second.find(key);
    if (k == s->second.end()) {
        int line = section_lines_.count(sec) ? section_lines_.at(sec) : 0;
        throw ConfigError(where(name_, line) + "section [" + sec + "] is missing key '" + key +
                          "'");
    }
    k->second.used = true;
    return k->second.value;
}

std::string ConfigFile::get_str_or(const std::string& sec, const std::string& key,
                                   const std::string& fallback) const {
    return has(sec, key) ? get_str(sec, key) : fallback;
}

double ConfigFile::get_num(const std::string& sec, const std::string& key) const {
    const auto& e = sections_.at(sec).at(key);
    return parse_double(name_, e.line, sec + "." + key, get_str(sec, key));
}

double ConfigFile::get_num_or(const std::string& sec, const std::string& key,
                              double fallback) const {
    return has(sec, key) ? get_num(sec, key) : fallback;
}

std::size_t ConfigFile::get_count(const std::string& sec, const std::string& key) const {
    const double v = get_num(sec, key);
    const auto n = static_cast<long long>(std::llround(v));
    if (n < 0 || std::abs(v - double(n)) > 1e-9)
        fail(sec, key, "expected a nonnegative integer, got '" + get_str(sec, key) + "'");
    return static_cast<std::size_t>(n);
}

std::size_t ConfigFile::get_count_or(const std::string& sec, const std::string& key,
                                     std::size_t fallback) const {
    return has(sec, key) ? get_count(sec, key) : fallback;
}

bool ConfigFile::get_bool_or(const std::string& sec, const std::string& key,
                             bool fallback) const {
    if (!has(sec, key)) return fallback;
    std::string v = get_str(sec, key);
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    fail(sec, key, "expected a boolean, got '" + v + "'");
}

std::vector<double> ConfigFile::get_num_list(const std::string& sec,
                                             const std::string& key) const {
    const auto& e = sections_.at(sec).at(key);
    const auto words = split_words(get_str(sec, key));
    if (words.empty())
        fail(sec, key, "expected a nonempty number list");
    std::vector<double> out;
    out.reserve(words.size());
    for (const auto& w : words)
        out.push_back(parse_double(name_, e.line, sec + "." + key, w));
    return out;
}

std::vector<std::string> ConfigFile::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [sec, keys] : sections_)
        for (const auto& [key, entry] : keys)
            if (!entry.used) out.push_back(sec + "." + key);
    std::sort(out.begin(), out.end());
    return out;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// field presets

FieldSpec FieldSpec::from_config(const ConfigFile& f, const std::string& sec) {
    FieldSpec s;
    if (!f.has_section(sec)) return s;
    s.kind = f.get_str_or(sec, "kind", "zero");
    s.amp = f.get_num_or(sec, "amp", s.amp);
    s.a0 = f.get_num_or(sec, "a0", s.a0);
    s.x0 = f.get_num_or(sec, "x0", s.x0);
    s.wa = f.get_num_or(sec, "wa", s.wa);
    s.wx = f.get_num_or(sec, "wx", s.wx);
    s.ma = f.get_count_or(sec, "ma", s.ma);
    s.mx = f.get_count_or(sec, "mx", s.mx);
    s.modes = f.get_count_or(sec, "modes", s.modes);
    s.table = f.get_str_or(sec, "table", "");
    static const char* kinds[] = {"zero", "gaussian", "bubbles", "band_bump",
                                  "band_random", "table"};
    if (std::find_if(std::begin(kinds), std::end(kinds),
                     [&](const char* k) { return s.kind == k; }) == std::end(kinds))
        f.fail(sec, "kind", "unknown preset '" + s.kind + "'");
    if (s.kind == "table" && s.table.empty())
        f.fail(sec, "table", "kind = table requires a CSV path");
    return s;
}

namespace {

Field field_from_table(const TensorGrid& g, const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open field table: " + path);
    Field out(g);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        if (lineno == 1 && s.find_first_not_of("axvalue, \t") == std::string::npos)
            continue;  // header row
        const auto cols = split_words(s);
        if (cols.size() != 3)
            throw ConfigError(where(path, lineno) + "expected 'a,x,value'");
        const double a = parse_double(path, lineno, "a", cols[0]);
        const double x = parse_double(path, lineno, "x", cols[1]);
        const double v = parse_double(path, lineno, "value", cols[2]);
        const auto j = static_cast<std::size_t>(std::llround(a / g.da));
        if (j > g.Na || std::abs(a - g.a(j)) > 1e-9 * (1.0 + g.A))
            throw ConfigError(where(path, lineno) + "age " + cols[0] + " is not a grid node");
        const auto it = std::lower_bound(g.xs.begin(), g.xs.end(), x - 1e-9);
        const auto i = static_cast<std::size_t>(it - g.xs.begin());
        if (i > g.Nx || std::abs(g.xs[i] - x) > 1e-9)
            throw ConfigError(where(path, lineno) + "x " + cols[1] + " is not a grid node");
        out.at(j, i) = v;
    }
    return out;
}

} // namespace

Field FieldSpec::build(const TensorGrid& g, double band_lo, std::uint64_t seed) const {
    const double pi = 3.14159265358979323846;
    if (kind == "zero") return Field(g);
    if (kind == "table") return field_from_table(g, table);
    if (kind == "band_random") {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> coef(-1.0, 1.0);
        std::vector<double> c(modes * modes);
        for (double& v : c) v = coef(rng);
        Field out(g);
        const double lo = band_lo;
        // same boundary tolerance as band_mask, so a threshold that is not
        // exactly representable cannot leave rounding-sized values on the
        // first row past it
        const double eps = 1e-12 * (1.0 + g.A);
        for (std::size_t j = 0; j <= g.Na; ++j) {
            const double a = g.a(j);
            if (a <= lo + eps || j == g.Na) continue;
            const double sa = (a - lo) / (g.A - lo);
            for (std::size_t i = 1; i < g.Nx; ++i) {
                double v = 0.0;
                for (std::size_t p = 1; p <= modes; ++p)
                    for (std::size_t q = 1; q <= modes; ++q)
                        v += c[(p - 1) * modes + (q - 1)] * std::sin(double(p) * pi * sa) *
                             std::sin(double(q) * pi * g.xs[i]);
                out.at(j, i) = amp * v;
            }
        }
        return out;
    }
    return sample_field(g, [&](double a, double x) {
        if (kind == "gaussian") {
            const double ra = (a - a0) / wa;
            const double rx = (x - x0) / wx;
            return amp * std::exp(-ra * ra - rx * rx) * 4.0 * x * (1.0 - x);
        }
        if (kind == "bubbles")
            return amp * std::sin(double(ma) * pi * a / g.A) * std::sin(double(mx) * pi * x);
        // band_bump
        if (a <= band_lo) return 0.0;
        const double sa = (a - band_lo) / (g.A - band_lo);
        return amp * std::sin(pi * sa) * std::sin(pi * x);
    });
}

// ---------------------------------------------------------------------------
// experiment assembly

namespace {

KModel k_from_config(const ConfigFile& f, const std::string& sec, double fallback_exponent) {
    if (!f.has_section(sec)) return KModel::power_at_0(fallback_exponent);
    const std::string kind = f.get_str_or(sec, "kind", "power0");
    if (kind == "power0" || kind == "power1") {
        const double e = f.get_num_or(sec, "exponent", fallback_exponent);
        if (!(e > 0.0) || !(e < 2.0))
            f.fail(sec, "exponent", "degeneracy exponent must lie in (0, 2)");
        return kind == "power0" ? KModel::power_at_0(e) : KModel::power_at_1(e);
    }
    if (kind == "table") {
        const std::string path = f.get_str(sec, "table");
        const std::string side = f.get_str_or(sec, "side", "zero");
        if (side != "zero" && side != "one")
            f.fail(sec, "side", "expected 'zero' or 'one'");
        std::ifstream in(path);
        if (!in)
            f.fail(sec, "table", "cannot open CSV: " + path);
        std::vector<double> xs, ks;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string s = trim(line);
            if (s.empty() || s.front() == '#') continue;
            if (lineno == 1 && s.find_first_not_of("xk, \t") == std::string::npos) continue;
            const auto cols = split_words(s);
            if (cols.size() != 2)
                throw ConfigError(where(path, lineno) + "expected 'x,k'");
            xs.push_back(parse_double(path, lineno, "x", cols[0]));
            ks.push_back(parse_double(path, lineno, "k", cols[1]));
        }
        try {
            return KModel::tabulated(std::move(xs), std::move(ks),
                                     side == "zero" ? DegenerateSide::at0
                                                    : DegenerateSide::at1);
        } catch (const std::invalid_argument& e) {
            f.fail(sec, "table", e.what());
        }
    }
    f.fail(sec, "kind", "unknown coefficient kind '" + kind + "'");
}

} // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    return from_file(ConfigFile::parse_file(path));
}

ExperimentConfig ExperimentConfig::from_file(const ConfigFile& f) {
    ExperimentConfig c;
    c.source_name = f.name();
    c.source_text = f.text();

    // grid (defaults: the canonical desk-scale instance)
    const double T = f.get_num_or("grid", "T", 2.0);
    const double A = f.get_num_or("grid", "A", 1.0);
    const std::size_t Nt = f.get_count_or("grid", "Nt", 80);
    const std::size_t Na = f.get_count_or("grid", "Na", 40);
    const std::size_t Nx = f.get_count_or("grid", "Nx", 60);
    const double grading = f.get_num_or("grid", "grading", 1.0);
    try {
        c.grid = TensorGrid::make(T, A, Nt, Na, Nx, grading);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(f.name() + ": [grid] " + e.what());
    }

    c.k1 = k_from_config(f, "k1", 0.5);
    c.k2 = k_from_config(f, "k2", 0.7);

    // rates
    {
        const std::string kind = f.get_str_or("rates", "kind", "constant");
        const double mu11 = f.get_num_or("rates", "mu11", 0.1);
        const double mu22 = f.get_num_or("rates", "mu22", 0.1);
        const double mu21 = f.get_num_or("rates", "mu21", 1.0);
        const double abar1 = f.get_num_or("rates", "abar1", 0.5);
        const double abar2 = f.get_num_or("rates", "abar2", 0.5);
        const double b1 = f.get_num_or("rates", "beta1", 1.0);
        const double b2 = f.get_num_or("rates", "beta2", 1.0);
        c.rates = RatePack::constant_rates(mu11, mu22, mu21, abar1, abar2, A, b1, b2);
        if (kind == "separable_bump") {
            c.rates.mu21 = [mu21](double, double, double x) {
                return mu21 * 4.0 * x * (1.0 - x);
            };
        } else if (kind != "constant") {
            f.fail("rates", "kind", "unknown rates preset '" + kind + "'");
        }
        try {
            c.rates.validate(c.grid);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(f.name() + ": [rates] " + e.what());
        }
    }

    c.initial_u = FieldSpec::from_config(f, "initial.u");
    c.initial_v = FieldSpec::from_config(f, "initial.v");
    c.terminal_z = FieldSpec::from_config(f, "terminal.z");
    c.terminal_y = FieldSpec::from_config(f, "terminal.y");

    // carleman
    if (f.has("carleman", "s")) c.s_values = f.get_num_list("carleman", "s");
    for (double s : c.s_values)
        if (!(s > 0.0)) f.fail("carleman", "s", "sweep values must be positive");
    c.weight_R = f.get_num_or("carleman", "R", 1.0);
    c.window.t_lo = f.get_num_or("carleman", "t_lo", 0.0);
    c.window.t_hi = f.get_num_or("carleman", "t_hi", T);
    c.window.a_lo = f.get_num_or("carleman", "a_lo", 0.0);
    if (!(c.window.t_lo >= 0.0) || !(c.window.t_hi <= T) || !(c.window.t_lo < c.window.t_hi))
        f.fail("carleman", "t_lo", "window must satisfy 0 <= t_lo < t_hi <= T");
    if (!(c.window.a_lo >= 0.0) || !(c.window.a_lo < A))
        f.fail("carleman", "a_lo", "window age offset must lie in [0, A)");
    c.ensemble = f.get_count_or("carleman", "ensemble", 20);

    // hum
    {
        const double olo = f.get_num_or("hum", "omega_lo", 0.3);
        const double ohi = f.get_num_or("hum", "omega_hi", 0.7);
        if (!(olo > 0.0) || !(ohi < 1.0) || !(olo < ohi))
            f.fail("hum", "omega_lo", "control region must be a proper interior interval");
        c.hum.omega = AgeSpaceRegion::space(olo, ohi);
        c.hum.delta = f.get_num_or("hum", "delta", 0.6);
        const double gamma = std::max(c.rates.abar1, c.rates.abar2);
        if (!(c.hum.delta > gamma) || !(c.hum.delta < A))
            f.fail("hum", "delta",
                   "support threshold must exceed the fertility onsets and stay below A");
        c.hum.eps = f.get_num_or("hum", "eps", 1e-8);
        if (!(c.hum.eps > 0.0)) f.fail("hum", "eps", "penalization must be positive");
        c.hum.cg_tol = f.get_num_or("hum", "cg_tol", 1e-10);
        c.hum.cg_maxiter = f.get_count_or("hum", "cg_maxiter", 500);
        c.hum.joint_refine = f.get_bool_or("hum", "joint_refine", true);
        c.hum.require_equal_k = f.get_bool_or("hum", "require_equal_k", true);
        c.hum_full_interval = f.get_bool_or("hum", "full_interval", true);
    }

    // run
    c.out_dir = f.get_str_or("run", "out", "out");
    c.seed = static_cast<std::uint64_t>(f.get_count_or("run", "seed", 0));
    c.strict = f.get_bool_or("run", "strict", false);
    c.threads = static_cast<int>(f.get_count_or("run", "threads", 0));
    c.dump = f.get_str_or("run", "dump", "terminal");
    if (c.dump != "terminal" && c.dump != "full")
        f.fail("run", "dump", "expected 'terminal' or 'full'");

    const auto leftovers = f.unused_keys();
    if (!leftovers.empty()) {
        std::string msg = f.name() + ": unknown keys:";
        for (const auto& k : leftovers) msg += " " + k;
        throw ConfigError(msg);
    }
    return c;
}

} // namespace cascade
