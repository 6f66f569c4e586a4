#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chiralmm/protocol.hpp"
#include "chiralmm/sweeps.hpp"

namespace chiralmm {

enum class SweepProtocol { Relax, WritePos, WriteNeg, WriteBoth };

struct SweepSpec {
    SweepProtocol protocol = SweepProtocol::Relax;
    std::vector<SweepAxis> axes;
    int workers = 0;
};

/// A box in cell indices, or the whole layer.
struct MaskSpec {
    bool all = true;
    int x0 = 0, x1 = 0, y0 = 0, y1 = 0;

    RegionMask build(const Mesh& mesh) const;
};

struct RunConfig {
    Mesh mesh;
    MaterialParams material;
    VcmaProfile vcma;  // gate mask resolved from gate_spec at load time
    MaskSpec gate_spec;
    MaskSpec pillar_spec;
    ProtocolTiming protocol;
    StepController integrator;
    ClassifierThresholds classifier;
    RelaxCriteria relax;
    SweepSpec sweep;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    void validate() const;
    SimSetup setup() const;
    RegionMask pillar() const { return pillar_spec.build(mesh); }
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Parses and validates a config file; every omitted key takes its
/// documented default, unknown keys are rejected with their field path.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);
std::string config_to_json(const RunConfig& cfg);
void save_config(const RunConfig& cfg, const std::string& path);

// CSV emission; all headers name units and files are byte-reproducible for
// identical inputs.
void write_trace_csv(const Trace& trace, const std::string& path);
void write_phase_csv(const std::vector<PhasePoint>& rows, const std::string& path);
void write_dmi_csv(const std::vector<DmiWindowPoint>& rows, const std::string& path);
void write_gradient_csv(const std::vector<GradientPoint>& rows, const std::string& path);

}  // namespace chiralmm
