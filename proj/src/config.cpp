#include "cellfront/config.hpp"

#include <fmt/format.h>

#include <cctype>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace cellfront {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0;
    size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError(fmt::format("config line {}: {}", line, msg));
}

double parse_double(const std::string& v, int line, const std::string& key) {
    const char* begin = v.c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        fail(line, fmt::format("value '{}' for key '{}' is not a number", v, key));
    return x;
}

long parse_long(const std::string& v, int line, const std::string& key) {
    const char* begin = v.c_str();
    char* end = nullptr;
    const long x = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0')
        fail(line, fmt::format("value '{}' for key '{}' is not an integer", v, key));
    return x;
}

int parse_int(const std::string& v, int line, const std::string& key) {
    const long x = parse_long(v, line, key);
    if (x < INT_MIN || x > INT_MAX)
        fail(line, fmt::format("value '{}' for key '{}' is out of range", v, key));
    return static_cast<int>(x);
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail(line, fmt::format("value '{}' for key '{}' is not a boolean", v, key));
}

} // namespace

GrowthLaw SimConfig::growth_law() const {
    const double rho_M = rho_M_over_rho_eq * rho_eq();
    return GrowthLaw{alpha, rho_M, eps_frac * rho_M};
}

double SimConfig::ibm_spacing() const {
    return spacing > 0.0 ? spacing : d_eq() / 1.2;
}

double SimConfig::s1_resolved() const {
    return s1_init > s0 ? s1_init : s0 + n_A * ibm_spacing();
}

double SimConfig::s2_resolved() const {
    const double s1 = s1_resolved();
    return s2_init > s1 ? s2_init : s1 + n_B * ibm_spacing();
}

void SimConfig::validate() const {
    jkr.validate();
    if (!(eta_A > 0.0) || !std::isfinite(eta_A) || !(eta_B > 0.0) ||
        !std::isfinite(eta_B))
        throw ConfigError("damping coefficients must be positive and finite");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw ConfigError("growth rate alpha must be nonnegative and finite");
    if (!(rho_M_over_rho_eq > 1.0))
        throw ConfigError("rho_M_over_rho_eq must exceed 1");
    if (!(eps_frac > 0.0))
        throw ConfigError("eps_frac must be positive");
    if (!((1.0 - 6.0 * eps_frac) * rho_M_over_rho_eq > 1.0))
        throw ConfigError(
            "growth ramp extends to or below the equilibrium density "
            "(decrease eps_frac or raise rho_M_over_rho_eq)");
    if (n_A < 1 || n_B < 1)
        throw ConfigError("cell counts n_A and n_B must be at least 1");
    if (!(spacing >= 0.0) || !std::isfinite(spacing))
        throw ConfigError("ibm spacing must be nonnegative and finite");
    if (N_A < 8 || N_B < 8)
        throw ConfigError("grid sizes N_A and N_B must be at least 8");
    if (!(rho_A_init_over_rho_eq >= 1.0) || !(rho_B_init_over_rho_eq >= 1.0))
        throw ConfigError("initial densities must be at least the equilibrium density");
    if (!(M > 0.0) || !std::isfinite(M))
        throw ConfigError("wave mass M must be positive and finite");
    if (!(z_min < 0.0) || !std::isfinite(z_min))
        throw ConfigError("z_min must be negative and finite");
    if (!(shot_rtol > 0.0) || !(shot_rtol < 1.0))
        throw ConfigError("shot_rtol must lie in (0, 1)");
    if (!(wave_tol > 0.0) || !(wave_tol < 1.0))
        throw ConfigError("wave_tol must lie in (0, 1)");
    integrator.validate();
    if (!(T > 0.0) || !std::isfinite(T))
        throw ConfigError("final time T must be positive and finite");
    if (!(snapshot_interval > 0.0) || !(snapshot_interval <= T))
        throw ConfigError("snapshot_interval must lie in (0, T]");
    const double s1 = s1_resolved();
    const double s2 = s2_resolved();
    if (!(s0 < s1 && s1 < s2))
        throw ConfigError("domain must satisfy s0 < s1 < s2 after resolution");
}

SimConfig parse_config(const std::string& text) {
    SimConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::set<std::string> seen;  // "section/key" duplicate detection
    int line = 0;

    auto apply = [&](const std::string& key, const std::string& val) {
        const std::string id = section + "/" + key;
        if (!seen.insert(id).second)
            fail(line, fmt::format("duplicate key '{}' in section [{}]", key, section));
        const auto d = [&] { return parse_double(val, line, key); };
        const auto i = [&] { return parse_int(val, line, key); };

        if (section == "jkr") {
            if (key == "R") cfg.jkr.R = d();
            else if (key == "E") cfg.jkr.E = d();
            else if (key == "nu") cfg.jkr.nu = d();
            else if (key == "gamma") cfg.jkr.gamma = d();
            else fail(line, fmt::format("unknown key '{}' in section [jkr]", key));
        } else if (section == "model") {
            if (key == "eta_A") cfg.eta_A = d();
            else if (key == "eta_B") cfg.eta_B = d();
            else if (key == "seed") cfg.seed = parse_long(val, line, key);
            else fail(line, fmt::format("unknown key '{}' in section [model]", key));
        } else if (section == "growth") {
            if (key == "alpha") cfg.alpha = d();
            else if (key == "rho_M_over_rho_eq") cfg.rho_M_over_rho_eq = d();
            else if (key == "eps_frac") cfg.eps_frac = d();
            else fail(line, fmt::format("unknown key '{}' in section [growth]", key));
        } else if (section == "domain") {
            if (key == "s0") cfg.s0 = d();
            else if (key == "s1_init") cfg.s1_init = d();
            else if (key == "s2_init") cfg.s2_init = d();
            else fail(line, fmt::format("unknown key '{}' in section [domain]", key));
        } else if (section == "ibm") {
            if (key == "n_A") cfg.n_A = i();
            else if (key == "n_B") cfg.n_B = i();
            else if (key == "spacing") cfg.spacing = d();
            else fail(line, fmt::format("unknown key '{}' in section [ibm]", key));
        } else if (section == "fbp") {
            if (key == "N_A") cfg.N_A = i();
            else if (key == "N_B") cfg.N_B = i();
            else if (key == "rho_A_init_over_rho_eq") cfg.rho_A_init_over_rho_eq = d();
            else if (key == "rho_B_init_over_rho_eq") cfg.rho_B_init_over_rho_eq = d();
            else fail(line, fmt::format("unknown key '{}' in section [fbp]", key));
        } else if (section == "twave") {
            if (key == "M") cfg.M = d();
            else if (key == "z_min") cfg.z_min = d();
            else if (key == "shot_rtol") cfg.shot_rtol = d();
            else if (key == "wave_tol") cfg.wave_tol = d();
            else fail(line, fmt::format("unknown key '{}' in section [twave]", key));
        } else if (section == "integrator") {
            if (key == "rtol") cfg.integrator.rtol = d();
            else if (key == "atol") cfg.integrator.atol = d();
            else if (key == "h0") cfg.integrator.h0 = d();
            else if (key == "hmax") cfg.integrator.hmax = d();
            else if (key == "max_steps") cfg.integrator.max_steps = parse_long(val, line, key);
            else if (key == "stiff") cfg.integrator.stiff = parse_bool(val, line, key);
            else fail(line, fmt::format("unknown key '{}' in section [integrator]", key));
        } else if (section == "schedule") {
            if (key == "T") cfg.T = d();
            else if (key == "snapshot_interval") cfg.snapshot_interval = d();
            else fail(line, fmt::format("unknown key '{}' in section [schedule]", key));
        } else {
            fail(line, fmt::format("unknown section [{}]", section));
        }
    };

    while (std::getline(in, raw)) {
        ++line;
        const size_t cut = raw.find_first_of("#;");
        std::string s = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                fail(line, "malformed section header (missing ']')");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) fail(line, "empty section name");
            continue;
        }
        const size_t eq = s.find('=');
        if (eq == std::string::npos)
            fail(line, fmt::format("expected 'key = value', got '{}'", s));
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (key.empty()) fail(line, "empty key");
        if (val.empty()) fail(line, fmt::format("empty value for key '{}'", key));
        if (section.empty())
            fail(line, fmt::format("key '{}' appears before any section", key));
        apply(key, val);
    }

    cfg.validate();
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError(fmt::format("cannot open config file '{}'", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw IoError(fmt::format("error reading config file '{}'", path));
    return parse_config(buf.str());
}

std::string serialize_config(const SimConfig& cfg) {
    std::string out;
    const auto d = [](double x) { return fmt::format("{:.17g}", x); };
    out += "[jkr]\n";
    out += fmt::format("R = {}\nE = {}\nnu = {}\ngamma = {}\n", d(cfg.jkr.R),
                       d(cfg.jkr.E), d(cfg.jkr.nu), d(cfg.jkr.gamma));
    out += "\n[model]\n";
    out += fmt::format("eta_A = {}\neta_B = {}\nseed = {}\n", d(cfg.eta_A),
                       d(cfg.eta_B), cfg.seed);
    out += "\n[growth]\n";
    out += fmt::format("alpha = {}\nrho_M_over_rho_eq = {}\neps_frac = {}\n",
                       d(cfg.alpha), d(cfg.rho_M_over_rho_eq), d(cfg.eps_frac));
    out += "\n[domain]\n";
    out += fmt::format("s0 = {}\ns1_init = {}\ns2_init = {}\n", d(cfg.s0),
                       d(cfg.s1_init), d(cfg.s2_init));
    out += "\n[ibm]\n";
    out += fmt::format("n_A = {}\nn_B = {}\nspacing = {}\n", cfg.n_A, cfg.n_B,
                       d(cfg.spacing));
    out += "\n[fbp]\n";
    out += fmt::format(
        "N_A = {}\nN_B = {}\nrho_A_init_over_rho_eq = {}\nrho_B_init_over_rho_eq = {}\n",
        cfg.N_A, cfg.N_B, d(cfg.rho_A_init_over_rho_eq),
        d(cfg.rho_B_init_over_rho_eq));
    out += "\n[twave]\n";
    out += fmt::format("M = {}\nz_min = {}\nshot_rtol = {}\nwave_tol = {}\n",
                       d(cfg.M), d(cfg.z_min), d(cfg.shot_rtol), d(cfg.wave_tol));
    out += "\n[integrator]\n";
    out += fmt::format(
        "rtol = {}\natol = {}\nh0 = {}\nhmax = {}\nmax_steps = {}\nstiff = {}\n",
        d(cfg.integrator.rtol), d(cfg.integrator.atol), d(cfg.integrator.h0),
        d(cfg.integrator.hmax), cfg.integrator.max_steps,
        cfg.integrator.stiff ? "true" : "false");
    out += "\n[schedule]\n";
    out += fmt::format("T = {}\nsnapshot_interval = {}\n", d(cfg.T),
                       d(cfg.snapshot_interval));
    return out;
}

} // namespace cellfront
