#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chiralmm/protocol.hpp"

namespace chiralmm {

/// Everything a single simulation run needs besides the swept parameter.
struct SimSetup {
    Mesh mesh;
    MaterialParams material;
    VcmaProfile vcma;
    ProtocolTiming timing;
    StepController ctrl;
    ClassifierThresholds thresholds;
    RelaxCriteria relax_stop;
    std::uint64_t seed = 0;
    int workers = 0;  // 0 = hardware concurrency
};

struct SweepAxis {
    std::string name;  // one of Ku0, D, Vb, beta, J
    double min = 0.0;
    double max = 0.0;
    int count = 2;
    bool log_scale = false;

    void validate() const;
    std::vector<double> values() const;
};

struct PhasePoint {
    double Ku0 = 0.0;
    double D = 0.0;
    TextureClass cls;
    bool converged = false;
};

struct DmiWindowPoint {
    double D = 0.0;
    bool switched_pos = false;   // +V writes succeed from both initial states
    bool switched_neg = false;
    bool deterministic = false;  // all four runs correct
    double recovery = 0.0;       // s, slowest recovery among the four runs; NaN if never
};

struct GradientPoint {
    double value = 0.0;     // the swept Vb or beta
    double gradient = 0.0;  // realized mean |dK/dx|, J/m^4
    double recovery = 0.0;  // s; NaN if never recovered
    bool switched = false;
    bool deterministic = true;
};

/// Deterministic per-point stream: mixes the sweep seed with the point index.
std::uint64_t point_seed(std::uint64_t sweep_seed, std::uint64_t index);

/// Uniform state tilted by tilt_deg toward +x.
VectorField tilted_uniform_state(const Mesh& mesh, int polarity, double tilt_deg = 5.0);
/// Per-cell unit vectors drawn from the seeded stream.
VectorField random_state(const Mesh& mesh, std::uint64_t seed);

/// Relax from both a tilted-uniform and a seeded-random start at every
/// (Ku0, D) grid point and classify the lower-energy equilibrium.
std::vector<PhasePoint> phase_diagram(const SimSetup& setup, const std::vector<double>& ku_values,
                                      const std::vector<double>& d_values);

/// Four write runs per DMI value: {+V, -V} x {start Up, start Down}.
std::vector<DmiWindowPoint> dmi_window(const SimSetup& setup, const std::vector<double>& d_values);

/// Write(+V) per point over Vb (axis "Vb") or the VCMA coefficient
/// (axis "beta"); reports the realized mean anisotropy gradient.
std::vector<GradientPoint> gradient_curve(const SimSetup& setup, const std::string& axis_name,
                                          const std::vector<double>& values);

}  // namespace chiralmm
