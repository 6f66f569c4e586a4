#pragma once

#include <functional>
#include <stdexcept>

#include "chiralmm/effective_field.hpp"
#include "chiralmm/materials.hpp"
#include "chiralmm/mesh.hpp"

namespace chiralmm {

/// Spin-orbit torque drive derived from an in-plane charge current.
struct SotDrive {
    double J = 0.0;           // A/m^2
    Vec3 j_dir = kXAxis;      // current flow direction, in-plane unit vector
    Vec3 sigma = kYAxis;      // spin polarization direction, z x j_dir
    double beta_j = 0.0;      // torque scale, tesla

    SotDrive() = default;
    /// t_fl is the free-layer thickness (the mesh dz).
    SotDrive(double J_, const Vec3& j_dir_, const MaterialParams& p, double t_fl);

    static SotDrive off() { return SotDrive{}; }
};

struct SimState {
    double t = 0.0;
    VectorField m;
    SotDrive drive;
    ScalarField k_map;
};

struct StepController {
    double tol = 1e-5;        // embedded-error tolerance on |dm| (max norm)
    double max_dm = 0.01;     // cap on per-cell |dm| per step
    double dt_init = 1e-14;   // s
    double dt_min = 1e-18;    // s; underflow below this is a stiffness error
    double dt_max = 1e-11;    // s
};

struct RelaxCriteria {
    double torque_tol = 1e-4;  // T, on max |m x B_eff|
    double max_time = 50e-9;   // s
};

struct RelaxResult {
    SimState state;
    bool converged = false;
    double max_torque = 0.0;   // T, at exit
};

class StiffnessError : public std::runtime_error {
public:
    explicit StiffnessError(const std::string& what) : std::runtime_error(what) {}
};

/// Landau-Lifshitz form of the LLG equation plus SOT, per cell:
///   dm/dt = -gamma/(1+a^2) [ m x B + a m x (m x B)
///                            + c_dl m x (m x s) + c_fl m x s ]
/// with c_dl = sot_dl_scale * beta_j and c_fl = sot_fl_scale * xi*beta_j/2:
/// a damping-like torque along -m x (m x s) and a field-like torque along
/// -m x s, both sharing the 1/(1+a^2) Landau-Lifshitz prefactor. The scale
/// factors select between published normalizations of the xi convention.
VectorField llg_rhs(const SimState& state, const FieldModel& model);

/// Damping-only descent direction: -gamma*a/(1+a^2) m x (m x B_eff).
VectorField relax_rhs(const SimState& state, const FieldModel& model);

/// One adaptive RK45 (Dormand-Prince) step; advances state.t, renormalizes
/// m, updates dt in place. When enforce_dissipation is set (zero-drive
/// runs), steps that raise the total energy beyond 1e-12 relative are
/// rejected and retried with a smaller dt.
void step(SimState& state, const FieldModel& model, const StepController& ctrl,
          double& dt, bool enforce_dissipation = false);

/// Persistent integrator scratch: step size plus the first-same-as-last
/// derivative and energy of the last accepted state. Passing one carry
/// through back-to-back run_until calls avoids restarting the step size at
/// dt_init and re-evaluating the cached quantities at every call boundary.
/// The caches are only valid while the drive and k_map are unchanged; use a
/// fresh carry after modifying either.
struct IntegratorCarry {
    double dt = 0.0;           // 0 means "start from ctrl.dt_init"
    VectorField fsal;
    bool fsal_valid = false;
    double energy = 0.0;       // total energy of the accepted state
    bool energy_valid = false;
};

/// Integrates to t_end, calling sample(state) after every accepted step.
void run_until(SimState& state, const FieldModel& model, const StepController& ctrl,
               double t_end, const std::function<void(const SimState&)>& sample = nullptr,
               IntegratorCarry* carry = nullptr);

/// Torque-minimizing relaxation (precession suppressed). Requires J = 0.
RelaxResult relax(SimState state, const FieldModel& model, const StepController& ctrl,
                  const RelaxCriteria& stop = {});

double max_torque(const VectorField& m, const VectorField& b_eff);

}  // namespace chiralmm
