#include "chiralmm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace chiralmm {

SotDrive::SotDrive(double J_, const Vec3& j_dir_, const MaterialParams& p, double t_fl)
    : J(J_), j_dir(j_dir_) {
    if (J != 0.0) {
        if (std::abs(j_dir.z) > 1e-12 || std::abs(j_dir.norm() - 1.0) > 1e-9)
            throw std::invalid_argument("SotDrive: j_dir must be an in-plane unit vector");
        sigma = kZAxis.cross(j_dir);
        beta_j = constants::hbar * std::abs(J) * p.pol /
                 (2.0 * constants::elementary_charge * p.Ms * t_fl);
        if (J < 0.0) sigma = -sigma;
    } else {
        sigma = kZAxis.cross(j_dir);
        beta_j = 0.0;
    }
}

namespace {

// When b_out is non-null it receives the effective field evaluated for the
// right-hand side, so callers needing both (e.g. the dissipation check in
// the stepper) pay for one field assembly instead of two.
VectorField llg_rhs_impl(const SimState& state, const FieldModel& model, VectorField* b_out) {
    const MaterialParams& p = model.params();
    VectorField b = model.total_field(state.m, state.k_map);
    const double a = p.alpha;
    const double pref = -p.gamma / (1.0 + a * a);

    // damping-like magnitude beta_j, field-like magnitude xi*beta_j/2, both
    // sharing the 1/(1+alpha^2) Landau-Lifshitz prefactor
    const double beta_j = state.drive.beta_j;
    const double c_dl = p.sot_dl_scale * beta_j;
    const double c_fl = p.sot_fl_scale * beta_j * p.sot_xi / 2.0;
    const Vec3 sigma = state.drive.sigma;

    VectorField out(state.m.mesh);
    for (std::size_t i = 0; i < state.m.size(); ++i) {
        const Vec3& m = state.m[i];
        const Vec3 mxb = m.cross(b[i]);
        Vec3 torque = mxb + a * m.cross(mxb);
        if (beta_j != 0.0) {
            const Vec3 mxs = m.cross(sigma);
            torque += c_dl * m.cross(mxs) + c_fl * mxs;
        }
        out[i] = pref * torque;
    }
    if (b_out) *b_out = std::move(b);
    return out;
}

VectorField relax_rhs_impl(const SimState& state, const FieldModel& model, VectorField* b_out) {
    const MaterialParams& p = model.params();
    VectorField b = model.total_field(state.m, state.k_map);
    const double a = p.alpha;
    const double pref = -p.gamma * a / (1.0 + a * a);
    VectorField out(state.m.mesh);
    for (std::size_t i = 0; i < state.m.size(); ++i) {
        const Vec3& m = state.m[i];
        out[i] = pref * m.cross(m.cross(b[i]));
    }
    if (b_out) *b_out = std::move(b);
    return out;
}

// Total energy from the assembled field: every term except anisotropy is
// degree-2 homogeneous in m, so E_term = -(Ms V / 2) sum_i m_i . B_term_i
// for unit-norm m; the anisotropy convention k (1 - (m.u)^2) adds the
// m-independent V sum_i k_i on top of its quadratic part.
double energy_from_field(const VectorField& m, const VectorField& b, const ScalarField& k,
                         const MaterialParams& p) {
    double mdotb = 0.0;
    double ksum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        mdotb += m[i].dot(b[i]);
        ksum += k[i];
    }
    return m.mesh.cell_volume() * (ksum - 0.5 * p.Ms * mdotb);
}

}  // namespace

VectorField llg_rhs(const SimState& state, const FieldModel& model) {
    return llg_rhs_impl(state, model, nullptr);
}

VectorField relax_rhs(const SimState& state, const FieldModel& model) {
    return relax_rhs_impl(state, model, nullptr);
}

double max_torque(const VectorField& m, const VectorField& b_eff) {
    double mt = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        mt = std::max(mt, m[i].cross(b_eff[i]).norm());
    return mt;
}

// temporary instrumentation (dev only)
long g_steps = 0, g_attempts = 0, g_rhs = 0, g_clamped = 0;
long g_rej_err = 0, g_rej_dm = 0, g_rej_de = 0;

namespace {

// Dormand-Prince 5(4) coefficients
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

using RhsFn = VectorField (*)(const SimState&, const FieldModel&, VectorField*);

// When fsal is non-null it may carry f(state) from the previous accepted
// step (Dormand-Prince is First-Same-As-Last: the solution is renormalized
// before the k7 evaluation, so k7 is exactly the derivative of the accepted
// state); on exit it carries f(new state). e_cache/e_valid do the same for
// the dissipation check's energy of the accepted state.
void step_generic(SimState& state, const FieldModel& model, const StepController& ctrl,
                  double& dt, RhsFn rhs, bool enforce_dissipation, VectorField* fsal = nullptr,
                  bool* fsal_valid = nullptr, double* e_cache = nullptr,
                  bool* e_valid = nullptr) {
    const std::size_t n = state.m.size();
    SimState work = state;
    double dbg_err = 0.0, dbg_dm = 0.0, dbg_de = 0.0;

    VectorField k1;
    VectorField b_state;
    bool have_b_state = false;
    if (fsal && fsal_valid && *fsal_valid) {
        k1 = std::move(*fsal);
        *fsal_valid = false;
    } else {
        k1 = rhs(state, model, enforce_dissipation ? &b_state : nullptr);
        have_b_state = enforce_dissipation;
    }

    double e_old = 0.0;
    if (enforce_dissipation) {
        if (e_cache && e_valid && *e_valid) {
            e_old = *e_cache;
        } else {
            if (!have_b_state) b_state = model.total_field(state.m, state.k_map);
            e_old = energy_from_field(state.m, b_state, state.k_map, model.params());
        }
    }

    // hard cap so max per-cell |dm| stays under ctrl.max_dm
    double vmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) vmax = std::max(vmax, k1[i].norm());
    if (vmax > 0.0) dt = std::min(dt, ctrl.max_dm / vmax);
    dt = std::min(dt, ctrl.dt_max);

    for (int attempt = 0; attempt < 200; ++attempt) {
        if (dt < ctrl.dt_min) {
            char msg[160];
            std::snprintf(msg, sizeof(msg),
                          "dt underflow (%.3e s < %.3e s) at t = %.6e s (last err=%.3e dm=%.3e de=%.3e)",
                          dt, ctrl.dt_min, state.t, dbg_err, dbg_dm, dbg_de);
            throw StiffnessError(msg);
        }

        ++g_attempts;
        auto stage = [&](auto combine) {
            ++g_rhs;
            for (std::size_t i = 0; i < n; ++i) work.m[i] = state.m[i] + dt * combine(i);
            return rhs(work, model, nullptr);
        };

        const VectorField k2 = stage([&](std::size_t i) { return a21 * k1[i]; });
        const VectorField k3 = stage([&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; });
        const VectorField k4 =
            stage([&](std::size_t i) { return a41 * k1[i] + a42 * k2[i] + a43 * k3[i]; });
        const VectorField k5 = stage(
            [&](std::size_t i) { return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]; });
        const VectorField k6 = stage([&](std::size_t i) {
            return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i];
        });

        // 5th-order solution, renormalized, then k7 = f(y5) for the embedded
        // estimate (and for reuse as the next step's k1)
        for (std::size_t i = 0; i < n; ++i)
            work.m[i] = state.m[i] +
                        dt * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        normalize(work.m);
        VectorField b_work;
        VectorField k7 = rhs(work, model, enforce_dissipation ? &b_work : nullptr);

        double err = 0.0;
        double dm_max = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 ev = dt * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                  e6 * k6[i] + e7 * k7[i]);
            err = std::max(err, ev.norm());
            dm_max = std::max(dm_max, (work.m[i] - state.m[i]).norm());
        }

        bool accept = err <= ctrl.tol && dm_max <= ctrl.max_dm;
        if (err > ctrl.tol) ++g_rej_err;
        if (dm_max > ctrl.max_dm) ++g_rej_dm;
        double e_new = 0.0;
        if (accept && enforce_dissipation) {
            e_new = energy_from_field(work.m, b_work, state.k_map, model.params());
            if (e_new > e_old + 1e-12 * std::abs(e_old)) { accept = false; ++g_rej_de; }
            dbg_de = e_new - e_old;
        }
        dbg_err = err; dbg_dm = dm_max;

        if (accept) {
            ++g_steps;
            state.m = work.m;
            state.t += dt;
            if (fsal && fsal_valid) {
                *fsal = std::move(k7);
                *fsal_valid = true;
            }
            if (enforce_dissipation && e_cache && e_valid) {
                *e_cache = e_new;
                *e_valid = true;
            }
            double factor = (err > 0.0) ? 0.9 * std::pow(ctrl.tol / err, 0.2) : 5.0;
            factor = std::clamp(factor, 0.2, 5.0);
            dt = std::min(dt * factor, ctrl.dt_max);
            return;
        }

        double factor = 0.5;
        if (err > ctrl.tol) factor = std::clamp(0.9 * std::pow(ctrl.tol / err, 0.2), 0.1, 0.9);
        if (dm_max > ctrl.max_dm) factor = std::min(factor, 0.9 * ctrl.max_dm / dm_max);
        dt *= factor;
    }
    throw StiffnessError("step rejected too many times at t = " + std::to_string(state.t) + " s");
}

}  // namespace

void step(SimState& state, const FieldModel& model, const StepController& ctrl, double& dt,
          bool enforce_dissipation) {
    step_generic(state, model, ctrl, dt, &llg_rhs_impl, enforce_dissipation);
}

void run_until(SimState& state, const FieldModel& model, const StepController& ctrl, double t_end,
               const std::function<void(const SimState&)>& sample, IntegratorCarry* carry) {
    IntegratorCarry local;
    IntegratorCarry& c = carry ? *carry : local;
    if (c.dt <= 0.0) c.dt = ctrl.dt_init;
    const bool dissipative = state.drive.beta_j == 0.0;
    while (state.t < t_end) {
        const double remaining = t_end - state.t;
        if (remaining <= ctrl.dt_min) {  // below integrator resolution
            state.t = t_end;
            break;
        }
        // A step clamped to land on t_end says nothing about the
        // error-controlled step size (its error is artificially small and the
        // controller would inflate dt past the stability limit), so it leaves
        // the carried estimate untouched.
        const bool clamped = remaining < c.dt;
        if (clamped) ++g_clamped;
        double dt_try = clamped ? remaining : c.dt;
        step_generic(state, model, ctrl, dt_try, &llg_rhs_impl, dissipative, &c.fsal,
                     &c.fsal_valid, &c.energy, &c.energy_valid);
        if (!clamped) c.dt = dt_try;
        if (sample) sample(state);
    }
}

RelaxResult relax(SimState state, const FieldModel& model, const StepController& ctrl,
                  const RelaxCriteria& stop) {
    if (state.drive.beta_j != 0.0 || state.drive.J != 0.0)
        throw std::invalid_argument("relax: drive current must be zero");

    RelaxResult res;
    const double t0 = state.t;
    double dt = ctrl.dt_init;
    const double a = model.params().alpha;
    // |relax_rhs| = (gamma*a/(1+a^2)) |m x (m x B)| = (gamma*a/(1+a^2)) |m x B|
    // for unit m, so the descent direction doubles as the torque monitor
    const double torque_per_rhs = (1.0 + a * a) / (model.params().gamma * a);
    VectorField fsal;
    bool fsal_valid = false;
    double e_cache = 0.0;
    bool e_valid = false;
    while (true) {
        if (!fsal_valid) {
            fsal = relax_rhs(state, model);
            fsal_valid = true;
        }
        double rhs_max = 0.0;
        for (const Vec3& v : fsal.data) rhs_max = std::max(rhs_max, v.norm());
        res.max_torque = rhs_max * torque_per_rhs;
        if (res.max_torque < stop.torque_tol) {
            res.converged = true;
            break;
        }
        if (state.t - t0 >= stop.max_time) break;  // non-convergence: Indeterminate
        try {
            step_generic(state, model, ctrl, dt, &relax_rhs_impl, true, &fsal, &fsal_valid,
                         &e_cache, &e_valid);
        } catch (const StiffnessError&) {
            break;
        }
    }
    res.state = std::move(state);
    return res;
}

}  // namespace chiralmm
