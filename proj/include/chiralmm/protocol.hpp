#pragma once

#include <optional>
#include <vector>

#include "chiralmm/dynamics.hpp"
#include "chiralmm/texture.hpp"

namespace chiralmm {

struct TraceSample {
    double t = 0.0;   // s
    Vec3 m_mean;      // layer-averaged magnetization
    double J = 0.0;   // A/m^2
    double Vb = 0.0;  // V
};

using Trace = std::vector<TraceSample>;

struct WriteResult {
    Trace trace;
    TextureClass final_class;
    bool switched = false;
    bool deterministic = true;  // false when no symmetry-breaking gradient was applied
    std::optional<double> recovery_time;  // s, from SOT release
    SimState final_state;
    double t_release = 0.0;  // s, start of the current-off segment
};

struct ProtocolTiming {
    double t1 = 2e-9;           // s, SOT current only
    double t2 = 1e-9;           // s, SOT current + gate voltage
    double t3 = 5e-9;           // s, voltage held, current off
    double J = 1.5e12;          // A/m^2 (150 MA/cm^2)
    // Current flows along +y so the spin polarization sigma = z x j points
    // along -x: the SOT-stabilized cycloid then modulates along x, the same
    // axis as the gated anisotropy ramp, which is what lets the gradient pick
    // the final polarity. (A current along +x makes the texture x-uniform and
    // the write keeps the starting polarity instead of following the voltage.)
    Vec3 j_dir = kYAxis;
    double V = 0.165;           // V, magnitude; sign comes from the polarity argument
    double sample_interval = 1e-12;  // s
    // Final uniform polarity selected by a positive gate voltage. With the
    // default gating profile (g increasing along +x, positive V lowering the
    // gated anisotropy) and D > 0 this mapping was established by simulation:
    // +V -> UniformUp and -V -> UniformDown from either starting state.
    int up_polarity_voltage_sign = +1;
};

DriveSchedule make_write_schedule(const ProtocolTiming& timing, int voltage_sign);

/// Runs the three-step write from a relaxed initial state. voltage_sign
/// selects +V or -V in segments 2 and 3.
WriteResult write(const SimState& initial, int voltage_sign, const FieldModel& model,
                  const VcmaProfile& vcma, const ProtocolTiming& timing,
                  const StepController& ctrl = {}, const ClassifierThresholds& th = {});

/// Runs an arbitrary piecewise-constant schedule, sampling the mean
/// magnetization every sample_interval seconds.
Trace run_schedule(SimState& state, const FieldModel& model, const VcmaProfile& vcma,
                   const DriveSchedule& schedule, const StepController& ctrl,
                   double sample_interval);

/// First t - t_release at which |<m_z>| >= threshold and stays there for the
/// remainder of the trace; t_release is the last J!=0 -> J=0 transition.
/// nullopt when the threshold is never held to the end.
std::optional<double> recovery_time(const Trace& trace, double threshold = 0.9);

enum class Readout { P, AP };

class IndeterminateReadout : public std::runtime_error {
public:
    explicit IndeterminateReadout(double mz)
        : std::runtime_error("readout: |<m_z>| over the pillar is below 0.5 (" +
                             std::to_string(mz) + ")") {}
};

/// Sign of <m_z> over the pillar versus a +z reference layer.
Readout readout(const SimState& state, const RegionMask& pillar);

}  // namespace chiralmm
