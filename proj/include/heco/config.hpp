#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace heco {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg, std::vector<std::string> details = {})
        : std::runtime_error(msg), violations(std::move(details)) {}
    std::vector<std::string> violations;
};

// Declarative run description: plain-text key = value with [section] headers
// and unit-suffixed keys. Unknown keys are rejected; serialization round-trips
// losslessly. Physical defaults are the model defaults used everywhere else.
struct RunConfig {
    // [run]
    std::string kind;  // required
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int threads = 0;

    // [incidence]
    double E_i_meV = 10.0;  // required in files
    double theta_i_deg = 0.0;

    // [potential]
    std::string variant = "full";
    double D_meV = 4.0, alpha_invA = 1.13, z_m_A = 1.22;
    double epsilon_meV = 2.37, sigma_A = 3.1306562;
    double hardwall_a_A = 2.86, hardwall_z_r_A = 0.28;

    // [scan] (potential-scan, fermat-trace)
    double scan_min_A = -10.6, scan_max_A = 10.6;
    int scan_samples = 201;

    // [hardwall]
    int n_angles = 2001;

    // [newtonian]
    double dt_ps = 1e-4, t_max_ps = 50.0;
    double escape_z_A = 10.27, x_cut_A = 10.6;
    double b_min_A = -10.6, b_max_A = 10.6;
    int n_samples = 2001;

    // [tdse]
    int nx = 512, nz = 256;
    double x_min_A = -38.4, x_max_A = 38.4, z_min_A = -2.3, z_max_A = 34.5;
    double tdse_dt_ps = 4e-4, t_final_ps = 4.6;
    double v_cap_meV = 300.0;
    double cell_x_lo_A = -26.25, cell_x_hi_A = 26.25;
    double snapshot_every_ps = 0.0;  // 0 = final only
    double stale_tolerance = 0.15;

    // [initial_state]
    int n_gaussians = 250;
    double spacing_A = 0.21, sigma_x_A = 0.84, sigma_z_A = 2.65, center_z_A = 10.27;

    // [bohmian]
    int seeds_per_line = 41;
    double half_width_A = 10.0;
    double node_threshold = 1e-8;
    int n_ensemble = 0;  // when > 0, Born-sampled ensemble instead of seed lines

    static const std::vector<std::string>& known_kinds();

    static RunConfig parse(const std::string& text);
    static RunConfig parse_file(const std::string& path);
    std::string serialize() const;
    // full consistency check; throws ConfigError listing every violation
    void validate(bool e_i_seen, bool kind_seen) const;
};

}  // namespace heco
