#ifndef BIPHOTON_CONFIG_HPP
#define BIPHOTON_CONFIG_HPP

// Flat `section.key = value` configuration. Every key has a default; unknown
// keys are rejected. Validation reports the offending key path together with
// the violated constraint.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biphoton/biphoton_state.hpp"
#include "biphoton/detector_sim.hpp"
#include "biphoton/fringe_fit.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/propagation.hpp"
#include "biphoton/slits.hpp"

namespace biphoton {

struct GridConfig {
    // 1.6 mm over 1024 samples puts the stock slit edges (175 and 325 um
    // from the axis) exactly on cell boundaries, so the sampled aperture
    // integrates the rect exactly and grid refinement converges cleanly;
    // the 1.56 um spacing keeps the transform's phase sampling fine across
    // the detector window.
    int slit_n = 1024;
    double slit_extent = 1.6e-3;
    int det_n = 512;
    double det_extent = 2e-3;
};

struct SweepConfig {
    std::vector<double> w0_list;
    double regime_high = 0.8; // V_m above this: regime I
    double regime_low = 0.2;  // V_m below this: regime III
    bool monte_carlo = false; // frame-based route instead of the noiseless JPD
};

struct OutputConfig {
    std::string directory = "out";
    bool write_csv = true;
    bool write_bpf2 = true;
};

struct ExperimentConfig {
    CrystalParams crystal;
    // When > 0, overrides the crystal-derived b. The bundled configs pin the
    // birth-zone size directly because it is the lever that positions the
    // coherence-loss transition in N.
    double birth_zone_b = 0.0;
    PumpParams pump;
    OpticalTrain optics;
    SlitParams slits;
    GridConfig grids;
    AcquisitionParams acquisition;
    FitOptions fit;
    SweepConfig sweep;
    OutputConfig output;

    double crystal_b() const {
        return birth_zone_b > 0.0 ? birth_zone_b : crystal.crystal_b();
    }
    double birth_zone_n() const { return pump.waist_w0 / crystal_b(); }

    BiphotonState make_state(double waist_w0) const {
        return BiphotonState(waist_w0, crystal_b(), optics.signal_wavelength);
    }
    Grid1D slit_grid() const { return Grid1D::make(grids.slit_n, grids.slit_extent); }
    Grid1D detector_grid() const { return Grid1D::make(grids.det_n, grids.det_extent); }
    FringeGeometry fit_geometry() const {
        FringeGeometry g;
        g.opening_a = slits.opening;
        g.separation_d = slits.separation();
        g.focal_f = optics.f;
        g.wavelength = optics.signal_wavelength;
        return g;
    }

    void validate() const; // throws ConfigError with the offending key path

    // Deterministic serialization of every key; identical configs hash alike.
    std::string canonical_text() const;
    uint64_t config_hash() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

} // namespace biphoton

#endif
