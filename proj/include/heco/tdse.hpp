#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "heco/hardwall_diffraction.hpp"
#include "heco/potential.hpp"
#include "heco/units.hpp"

namespace heco {

struct PropagationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StaleExtractionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Grid2D {
    double x_min = -38.4, x_max = 38.4;
    double z_min = -2.3, z_max = 34.5;
    int nx = 512, nz = 256;  // powers of two (FFT)

    double dx() const { return (x_max - x_min) / nx; }
    double dz() const { return (z_max - z_min) / nz; }
    double x(int i) const { return x_min + i * dx(); }
    double z(int j) const { return z_min + j * dz(); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * nz + j; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * nz; }
    // FFT wavenumber of mode m on an n-point axis of spacing d
    static double mode_k(int m, int n, double d);
    void validate(double lambda_dB) const;  // power-of-two counts, spacing <= lambda/8
    bool operator==(const Grid2D&) const = default;
};

// complex amplitude on the grid, row-major with z fastest
struct WaveField {
    Grid2D grid;
    std::vector<std::complex<double>> amp;
    double t = 0.0;

    double norm() const;  // integral of |psi|^2 dx dz
};

// quasi-plane-wave beam: comb of identical Gaussians sharing one carrier wave
struct InitialStateSpec {
    int n_gaussians = 250;
    double spacing = 0.21;   // A, between Gaussian centers along x
    double sigma_x = 0.84;   // A
    double sigma_z = 2.65;   // A
    double center_z = 10.27; // A
    double center_x = 0.0;   // A, comb midpoint
    double E_i = 10.0;       // meV
    double theta_i = 0.0;    // rad
};

struct SMatrixEntry {
    double k_dx = 0.0;    // 1/A, on the cell reciprocal lattice
    std::complex<double> amplitude;  // |amplitude|^2 = channel probability
    double delta_k = 0.0; // 1/A
    // upward (k_z > 0) mode coefficients backing the amplitude; kept so that
    // plane-wave removal can subtract coherently mode by mode
    std::vector<std::complex<double>> modes;
};

struct SMatrixRow {
    double k = 0.0;     // 1/A, total wavenumber
    double k_ix = 0.0;  // 1/A, incident parallel component
    double cell_length = 53.0;  // A
    double t = 0.0;     // ps, extraction time
    std::vector<SMatrixEntry> entries;

    double total_probability() const;  // sum of |amplitude|^2
};

// Three-level explicit scheme psi(t+dt) = psi(t-dt) - (2 i dt / hbar) H psi(t)
// with the kinetic term applied spectrally (FFT) and the potential pointwise,
// capped at v_cap (inert for the energies of interest, bounds the spectrum so
// the stability condition dt < hbar / E_max stays practical).
class Propagator {
  public:
    Propagator(const WaveField& initial, const InteractionModel& model, double dt,
               const PhysicalConstants& c, double v_cap = 300.0);
    ~Propagator();
    Propagator(const Propagator&) = delete;
    Propagator& operator=(const Propagator&) = delete;

    void step();
    // on_step, when given, sees the field after every step
    void run(int n_steps, const std::function<void(const WaveField&)>& on_step = {});

    const WaveField& field() const;
    double dt() const;
    double norm() const;
    double energy_expectation() const;
    double potential_at(int i, int j) const;  // capped grid potential, meV

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

WaveField build_initial_state(const InitialStateSpec& spec, const Grid2D& grid,
                              const PhysicalConstants& c);

// Projects the upward-moving (k_z > 0) part of the field onto the plane-wave
// channels of the analysis cell; |amplitude|^2 sums the channel's upward mode
// power so that total_probability matches the outgoing norm (Parseval).
// Throws StaleExtractionError when more than stale_tolerance of the norm still
// sits in the interaction region (z below interaction_z, x inside the cell) --
// quantum-trapped population makes a small residual unavoidable.
SMatrixRow extract_smatrix(const WaveField& psi, double E_i, double theta_i,
                           std::pair<double, double> cell, const PhysicalConstants& c,
                           double interaction_z = 5.0, double stale_tolerance = 0.15);

// Entrywise coherent subtraction of a flat-surface companion run.
SMatrixRow remove_plane_wave_contribution(const SMatrixRow& S_full, const SMatrixRow& S_flat);

// dR/dtheta_d proportional to k_dz |S|^2, peak-normalized, vs delta_k.
DiffractionSpectrum reflection_coefficient(const SMatrixRow& S, double E_i,
                                           const PhysicalConstants& c);

// 128-byte-header binary snapshot (magic "WFLD"), little-endian IEEE-754.
void save_snapshot(const WaveField& psi, const std::string& path);
WaveField load_snapshot(const std::string& path);

}  // namespace heco
