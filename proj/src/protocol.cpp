#include "chiralmm/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace chiralmm {

DriveSchedule make_write_schedule(const ProtocolTiming& timing, int voltage_sign) {
    const double vb = voltage_sign * timing.V;
    DriveSchedule sched;
    sched.segments = {
        {timing.t1, timing.J, timing.j_dir, 0.0},
        {timing.t2, timing.J, timing.j_dir, vb},
        {timing.t3, 0.0, timing.j_dir, vb},
    };
    sched.validate();
    return sched;
}

Trace run_schedule(SimState& state, const FieldModel& model, const VcmaProfile& vcma,
                   const DriveSchedule& schedule, const StepController& ctrl,
                   double sample_interval) {
    if (sample_interval <= 0.0) throw std::invalid_argument("sample_interval must be > 0");
    const Mesh& mesh = model.mesh();
    const MaterialParams& p = model.params();

    Trace trace;
    const auto record = [&](double J, double Vb) {
        trace.push_back({state.t, mean_vector(state.m), J, Vb});
    };

    record(schedule.segments.empty() ? 0.0 : schedule.segments.front().J,
           schedule.segments.empty() ? 0.0 : schedule.segments.front().Vb);

    for (const DriveSegment& seg : schedule.segments) {
        state.k_map = anisotropy_map(mesh, p, vcma, seg.Vb).k;
        state.drive = SotDrive(seg.J, seg.j_dir, p, mesh.dz);
        const double t_end = state.t + seg.duration;
        double t_next = state.t + sample_interval;
        IntegratorCarry carry;  // caches are invalid across segment boundaries
        while (state.t < t_end) {
            const double target = std::min(t_next, t_end);
            run_until(state, model, ctrl, target, nullptr, &carry);
            record(seg.J, seg.Vb);
            if (state.t >= t_next) t_next += sample_interval;
        }
    }
    return trace;
}

WriteResult write(const SimState& initial, int voltage_sign, const FieldModel& model,
                  const VcmaProfile& vcma, const ProtocolTiming& timing,
                  const StepController& ctrl, const ClassifierThresholds& th) {
    if (voltage_sign != +1 && voltage_sign != -1)
        throw std::invalid_argument("write: voltage_sign must be +1 or -1");

    WriteResult res;
    SimState state = initial;
    state.t = 0.0;

    const DriveSchedule sched = make_write_schedule(timing, voltage_sign);
    res.t_release = timing.t1 + timing.t2;
    res.trace = run_schedule(state, model, vcma, sched, ctrl, timing.sample_interval);
    res.final_state = std::move(state);
    res.final_class = classify(res.final_state.m, th);
    res.recovery_time = recovery_time(res.trace, th.uniform_u);

    if (timing.V == 0.0) {
        // no anisotropy gradient: nothing breaks the up/down symmetry
        res.deterministic = false;
        res.switched = false;
        return res;
    }
    const int target = voltage_sign * timing.up_polarity_voltage_sign;
    res.switched = res.final_class.is_uniform() && res.final_class.polarity() == target;
    return res;
}

std::optional<double> recovery_time(const Trace& trace, double threshold) {
    if (trace.empty()) throw std::invalid_argument("recovery_time: empty trace");
    // locate the release: last transition J != 0 -> J == 0
    std::size_t release = trace.size();
    for (std::size_t i = 1; i < trace.size(); ++i)
        if (trace[i - 1].J != 0.0 && trace[i].J == 0.0) release = i;
    if (release == trace.size()) {
        if (trace.front().J != 0.0)
            throw std::invalid_argument("recovery_time: trace has no current-off segment");
        release = 0;  // whole trace is current-free
    }
    if (trace.back().J != 0.0)
        throw std::invalid_argument("recovery_time: trace does not end current-free");

    const double t_release = trace[release].t;
    // last sample below threshold; recovery is the next sample after it
    std::size_t first_held = release;
    for (std::size_t i = trace.size(); i-- > release;) {
        if (std::abs(trace[i].m_mean.z) < threshold) {
            first_held = i + 1;
            break;
        }
    }
    if (first_held >= trace.size()) return std::nullopt;
    return trace[first_held].t - t_release;
}

Readout readout(const SimState& state, const RegionMask& pillar) {
    const Vec3 mean = mean_vector(state.m, pillar);
    if (std::abs(mean.z) < 0.5) throw IndeterminateReadout(mean.z);
    return mean.z > 0.0 ? Readout::P : Readout::AP;
}

}  // namespace chiralmm
