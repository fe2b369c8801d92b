#include "heco/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "heco/potential.hpp"

namespace heco {

namespace {

enum class Kind { Double, Int, String, U64 };

struct Desc {
    const char* section;
    const char* key;
    Kind kind;
    void* ptr;
};

std::vector<Desc> table(RunConfig& c) {
    return {
        {"run", "kind", Kind::String, &c.kind},
        {"run", "out_dir", Kind::String, &c.out_dir},
        {"run", "seed", Kind::U64, &c.seed},
        {"run", "threads", Kind::Int, &c.threads},
        {"incidence", "E_i_meV", Kind::Double, &c.E_i_meV},
        {"incidence", "theta_i_deg", Kind::Double, &c.theta_i_deg},
        {"potential", "variant", Kind::String, &c.variant},
        {"potential", "D_meV", Kind::Double, &c.D_meV},
        {"potential", "alpha_invA", Kind::Double, &c.alpha_invA},
        {"potential", "z_m_A", Kind::Double, &c.z_m_A},
        {"potential", "epsilon_meV", Kind::Double, &c.epsilon_meV},
        {"potential", "sigma_A", Kind::Double, &c.sigma_A},
        {"potential", "hardwall_a_A", Kind::Double, &c.hardwall_a_A},
        {"potential", "hardwall_z_r_A", Kind::Double, &c.hardwall_z_r_A},
        {"scan", "scan_min_A", Kind::Double, &c.scan_min_A},
        {"scan", "scan_max_A", Kind::Double, &c.scan_max_A},
        {"scan", "scan_samples", Kind::Int, &c.scan_samples},
        {"hardwall", "n_angles", Kind::Int, &c.n_angles},
        {"newtonian", "dt_ps", Kind::Double, &c.dt_ps},
        {"newtonian", "t_max_ps", Kind::Double, &c.t_max_ps},
        {"newtonian", "escape_z_A", Kind::Double, &c.escape_z_A},
        {"newtonian", "x_cut_A", Kind::Double, &c.x_cut_A},
        {"newtonian", "b_min_A", Kind::Double, &c.b_min_A},
        {"newtonian", "b_max_A", Kind::Double, &c.b_max_A},
        {"newtonian", "n_samples", Kind::Int, &c.n_samples},
        {"tdse", "nx", Kind::Int, &c.nx},
        {"tdse", "nz", Kind::Int, &c.nz},
        {"tdse", "x_min_A", Kind::Double, &c.x_min_A},
        {"tdse", "x_max_A", Kind::Double, &c.x_max_A},
        {"tdse", "z_min_A", Kind::Double, &c.z_min_A},
        {"tdse", "z_max_A", Kind::Double, &c.z_max_A},
        {"tdse", "tdse_dt_ps", Kind::Double, &c.tdse_dt_ps},
        {"tdse", "t_final_ps", Kind::Double, &c.t_final_ps},
        {"tdse", "v_cap_meV", Kind::Double, &c.v_cap_meV},
        {"tdse", "cell_x_lo_A", Kind::Double, &c.cell_x_lo_A},
        {"tdse", "cell_x_hi_A", Kind::Double, &c.cell_x_hi_A},
        {"tdse", "snapshot_every_ps", Kind::Double, &c.snapshot_every_ps},
        {"tdse", "stale_tolerance", Kind::Double, &c.stale_tolerance},
        {"initial_state", "n_gaussians", Kind::Int, &c.n_gaussians},
        {"initial_state", "spacing_A", Kind::Double, &c.spacing_A},
        {"initial_state", "sigma_x_A", Kind::Double, &c.sigma_x_A},
        {"initial_state", "sigma_z_A", Kind::Double, &c.sigma_z_A},
        {"initial_state", "center_z_A", Kind::Double, &c.center_z_A},
        {"bohmian", "seeds_per_line", Kind::Int, &c.seeds_per_line},
        {"bohmian", "half_width_A", Kind::Double, &c.half_width_A},
        {"bohmian", "node_threshold", Kind::Double, &c.node_threshold},
        {"bohmian", "n_ensemble", Kind::Int, &c.n_ensemble},
    };
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& RunConfig::known_kinds() {
    static const std::vector<std::string> kinds = {
        "potential-scan",   "bound-states",        "fermat-trace", "fermat-separatrices",
        "hardwall-intensity", "newton-deflection", "newton-energy-diagram",
        "newton-rainbows",  "tdse-propagate",      "tdse-intensity",
        "bohm-trajectories", "bohm-vortices"};
    return kinds;
}

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig cfg;
    auto descs = table(cfg);
    std::vector<std::string> errors;
    bool e_i_seen = false, kind_seen = false;

    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
            continue;
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        const Desc* d = nullptr;
        for (const auto& e : descs)
            if (section == e.section && key == e.key) { d = &e; break; }
        if (!d) {
            errors.push_back("unknown key [" + section + "] " + key);
            continue;
        }
        try {
            std::size_t used = 0;
            switch (d->kind) {
                case Kind::Double:
                    *static_cast<double*>(d->ptr) = std::stod(value, &used);
                    break;
                case Kind::Int:
                    *static_cast<int*>(d->ptr) = std::stoi(value, &used);
                    break;
                case Kind::U64:
                    *static_cast<std::uint64_t*>(d->ptr) = std::stoull(value, &used);
                    break;
                case Kind::String:
                    *static_cast<std::string*>(d->ptr) = value;
                    used = value.size();
                    break;
            }
            if (used != value.size())
                throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            errors.push_back("bad value for [" + section + "] " + key + ": '" + value + "'");
            continue;
        }
        if (section == "incidence" && key == "E_i_meV") e_i_seen = true;
        if (section == "run" && key == "kind") kind_seen = true;
    }
    if (!errors.empty()) throw ConfigError("config parse failed", errors);
    cfg.validate(e_i_seen, kind_seen);
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string RunConfig::serialize() const {
    RunConfig& self = const_cast<RunConfig&>(*this);
    auto descs = table(self);
    std::string out;
    std::string section;
    char buf[64];
    for (const auto& d : descs) {
        if (section != d.section) {
            if (!out.empty()) out += "\n";
            section = d.section;
            out += "[" + section + "]\n";
        }
        out += d.key;
        out += " = ";
        switch (d.kind) {
            case Kind::Double:
                std::snprintf(buf, sizeof(buf), "%.17g", *static_cast<double*>(d.ptr));
                out += buf;
                break;
            case Kind::Int:
                out += std::to_string(*static_cast<int*>(d.ptr));
                break;
            case Kind::U64:
                out += std::to_string(*static_cast<std::uint64_t*>(d.ptr));
                break;
            case Kind::String:
                out += *static_cast<std::string*>(d.ptr);
                break;
        }
        out += "\n";
    }
    return out;
}

void RunConfig::validate(bool e_i_seen, bool kind_seen) const {
    std::vector<std::string> errors;
    if (!kind_seen || kind.empty()) errors.push_back("missing required key [run] kind");
    else if (std::find(known_kinds().begin(), known_kinds().end(), kind) ==
             known_kinds().end())
        errors.push_back("unknown run kind '" + kind + "'");
    if (!e_i_seen) errors.push_back("missing required key [incidence] E_i_meV");
    else if (E_i_meV <= 0) errors.push_back("[incidence] E_i_meV must be positive");
    if (std::fabs(theta_i_deg) >= 90.0)
        errors.push_back("[incidence] theta_i_deg must lie in (-90, 90)");
    try {
        variant_from_string(variant);
    } catch (const std::exception&) {
        errors.push_back("[potential] variant must be one of full, repulsive-adsorbate, "
                         "flat-surface-only, hard-wall");
    }
    if (D_meV <= 0 || alpha_invA <= 0) errors.push_back("[potential] D and alpha must be positive");
    if (epsilon_meV <= 0 || sigma_A <= 0)
        errors.push_back("[potential] epsilon and sigma must be positive");
    if (hardwall_a_A <= 0 || hardwall_z_r_A < 0 || hardwall_z_r_A >= hardwall_a_A)
        errors.push_back("[potential] hard wall needs 0 <= z_r < a");
    if (dt_ps <= 0 || t_max_ps <= 0) errors.push_back("[newtonian] dt and t_max must be positive");
    if (n_samples < 2) errors.push_back("[newtonian] n_samples must be >= 2");
    if (tdse_dt_ps <= 0 || t_final_ps <= 0)
        errors.push_back("[tdse] tdse_dt_ps and t_final_ps must be positive");
    if (cell_x_hi_A <= cell_x_lo_A) errors.push_back("[tdse] empty analysis cell");
    if (n_gaussians < 1) errors.push_back("[initial_state] n_gaussians must be >= 1");
    if (seeds_per_line < 1) errors.push_back("[bohmian] seeds_per_line must be >= 1");
    if (!errors.empty()) throw ConfigError("config validation failed", errors);
}

}  // namespace heco
