#include "chiralmm/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

namespace chiralmm {

void SweepAxis::validate() const {
    static const char* allowed[] = {"Ku0", "D", "Vb", "beta", "J"};
    if (std::find(std::begin(allowed), std::end(allowed), name) == std::end(allowed))
        throw std::invalid_argument("sweep axis name must be one of Ku0, D, Vb, beta, J");
    if (count < 2) throw std::invalid_argument("sweep axis count must be >= 2");
    if (!(min < max)) throw std::invalid_argument("sweep axis requires min < max");
    if (log_scale && (min <= 0.0 || max <= 0.0))
        throw std::invalid_argument("log-scale sweep axis requires positive bounds");
}

std::vector<double> SweepAxis::values() const {
    validate();
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / (count - 1);
        out[i] = log_scale ? min * std::pow(max / min, f) : min + f * (max - min);
    }
    return out;
}

std::uint64_t point_seed(std::uint64_t sweep_seed, std::uint64_t index) {
    // splitmix64 over the combined word
    std::uint64_t z = sweep_seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

VectorField tilted_uniform_state(const Mesh& mesh, int polarity, double tilt_deg) {
    const double th = tilt_deg * M_PI / 180.0;
    const Vec3 m{std::sin(th), 0.0, polarity * std::cos(th)};
    return VectorField(mesh, m);
}

VectorField random_state(const Mesh& mesh, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    VectorField m(mesh);
    for (Vec3& v : m.data) {
        do {
            v = Vec3{gauss(rng), gauss(rng), gauss(rng)};
        } while (v.norm() < 1e-6);
        v = v.normalized();
    }
    return m;
}

namespace {

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 4;
}

/// Runs fn(i) for i in [0, n) on a bounded pool; results are written by
/// index, so the output order never depends on scheduling.
template <typename Fn>
void parallel_points(std::size_t n, int workers, Fn&& fn) {
    workers = std::min<std::size_t>(resolve_workers(workers), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

RelaxResult relax_from(const VectorField& m0, const FieldModel& model, const ScalarField& k_map,
                       const SimSetup& setup) {
    SimState st;
    st.m = m0;
    st.k_map = k_map;
    st.drive = SotDrive::off();
    return relax(std::move(st), model, setup.ctrl, setup.relax_stop);
}

/// Relaxed uniform state of the requested polarity at zero drive.
SimState relaxed_uniform(const FieldModel& model, const SimSetup& setup, int polarity) {
    const ScalarField k = anisotropy_map(setup.mesh, model.params(), setup.vcma, 0.0).k;
    VectorField m0(setup.mesh, Vec3{0.0, 0.0, static_cast<double>(polarity)});
    RelaxResult r = relax_from(m0, model, k, setup);
    return std::move(r.state);
}

}  // namespace

std::vector<PhasePoint> phase_diagram(const SimSetup& setup, const std::vector<double>& ku_values,
                                      const std::vector<double>& d_values) {
    struct GridPoint {
        double ku, d;
    };
    std::vector<GridPoint> grid;
    for (double ku : ku_values)
        for (double d : d_values) grid.push_back({ku, d});

    std::vector<PhasePoint> out(grid.size());
    parallel_points(grid.size(), setup.workers, [&](std::size_t i) {
        MaterialParams p = setup.material;
        p.Ku0 = grid[i].ku;
        p.D = grid[i].d;
        const FieldModel model(setup.mesh, p);
        const ScalarField k = anisotropy_map(setup.mesh, p, setup.vcma, 0.0).k;

        const RelaxResult tilted = relax_from(tilted_uniform_state(setup.mesh, +1), model, k, setup);
        const RelaxResult random =
            relax_from(random_state(setup.mesh, point_seed(setup.seed, i)), model, k, setup);

        PhasePoint& pt = out[i];
        pt.Ku0 = grid[i].ku;
        pt.D = grid[i].d;
        pt.converged = tilted.converged || random.converged;
        if (!pt.converged) {
            pt.cls.kind = TextureKind::Indeterminate;
            return;
        }
        const double e_tilted = tilted.converged ? model.total_energy(tilted.state.m, k).total
                                                 : std::numeric_limits<double>::infinity();
        const double e_random = random.converged ? model.total_energy(random.state.m, k).total
                                                 : std::numeric_limits<double>::infinity();
        const SimState& winner = e_tilted <= e_random ? tilted.state : random.state;
        pt.cls = classify(winner.m, setup.thresholds);
    });
    return out;  // grid order is already sorted by (Ku0, D)
}

std::vector<DmiWindowPoint> dmi_window(const SimSetup& setup, const std::vector<double>& d_values) {
    std::vector<DmiWindowPoint> out(d_values.size());
    parallel_points(d_values.size(), setup.workers, [&](std::size_t i) {
        MaterialParams p = setup.material;
        p.D = d_values[i];
        const FieldModel model(setup.mesh, p);
        const SimState up = relaxed_uniform(model, setup, +1);
        const SimState down = relaxed_uniform(model, setup, -1);

        DmiWindowPoint& pt = out[i];
        pt.D = d_values[i];
        pt.recovery = std::numeric_limits<double>::quiet_NaN();
        bool any_recovery = false;
        bool ok[2] = {true, true};
        for (int s = 0; s < 2; ++s) {  // s=0: +V, s=1: -V
            const int vsign = s == 0 ? +1 : -1;
            for (const SimState* start : {&up, &down}) {
                const WriteResult r =
                    write(*start, vsign, model, setup.vcma, setup.timing, setup.ctrl, setup.thresholds);
                ok[s] = ok[s] && r.switched;
                if (r.recovery_time) {
                    pt.recovery = any_recovery ? std::max(pt.recovery, *r.recovery_time)
                                               : *r.recovery_time;
                    any_recovery = true;
                }
            }
        }
        pt.switched_pos = ok[0];
        pt.switched_neg = ok[1];
        pt.deterministic = ok[0] && ok[1];
    });
    return out;
}

std::vector<GradientPoint> gradient_curve(const SimSetup& setup, const std::string& axis_name,
                                          const std::vector<double>& values) {
    if (axis_name != "Vb" && axis_name != "beta")
        throw std::invalid_argument("gradient_curve: axis must be Vb or beta");

    std::vector<GradientPoint> out(values.size());
    parallel_points(values.size(), setup.workers, [&](std::size_t i) {
        VcmaProfile vcma = setup.vcma;
        ProtocolTiming timing = setup.timing;
        if (axis_name == "Vb")
            timing.V = values[i];
        else
            vcma.beta = values[i];

        const FieldModel model(setup.mesh, setup.material);
        // start opposite to the +V target so a correct write actually flips
        const int start_pol = -timing.up_polarity_voltage_sign;
        const SimState start = relaxed_uniform(model, setup, start_pol);
        const WriteResult r = write(start, +1, model, vcma, timing, setup.ctrl, setup.thresholds);

        GradientPoint& pt = out[i];
        pt.value = values[i];
        pt.gradient = gradient_magnitude(anisotropy_map(setup.mesh, setup.material, vcma, timing.V).k);
        pt.recovery = r.recovery_time.value_or(std::numeric_limits<double>::quiet_NaN());
        pt.switched = r.switched;
        pt.deterministic = r.deterministic;
    });
    std::stable_sort(out.begin(), out.end(),
                     [](const GradientPoint& a, const GradientPoint& b) { return a.gradient < b.gradient; });
    return out;
}

}  // namespace chiralmm
