#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "chiralmm/config.hpp"
#include "chiralmm/ovf.hpp"

namespace fs = std::filesystem;
using namespace chiralmm;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "path to the JSON run configuration");
    cmd->add_option("--out", opts.out_dir, "output directory (overrides config output_dir)");
}

RunConfig load(const CommonOpts& opts) {
    RunConfig cfg = opts.config_path.empty() ? parse_config("{}") : load_config(opts.config_path);
    if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
    return cfg;
}

/// Echo the fully resolved configuration next to the results.
void prepare_out(const RunConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    save_config(cfg, cfg.output_dir + "/resolved_config.json");
}

SimState relaxed_start(const RunConfig& cfg, const FieldModel& model, int polarity) {
    const SimSetup setup = cfg.setup();
    SimState st;
    st.m = VectorField(cfg.mesh, Vec3{0.0, 0.0, static_cast<double>(polarity)});
    st.k_map = anisotropy_map(cfg.mesh, cfg.material, cfg.vcma, 0.0).k;
    st.drive = SotDrive::off();
    RelaxResult r = relax(std::move(st), model, setup.ctrl, setup.relax_stop);
    return std::move(r.state);
}

int cmd_validate(const CommonOpts& opts) {
    const RunConfig cfg = load(opts);
    (void)cfg;
    std::cout << "config ok\n";
    return 0;
}

int cmd_relax(const CommonOpts& opts, double tilt_deg) {
    RunConfig cfg = load(opts);
    prepare_out(cfg);
    const FieldModel model(cfg.mesh, cfg.material);
    const SimSetup setup = cfg.setup();

    SimState st;
    st.m = tilted_uniform_state(cfg.mesh, +1, tilt_deg);
    st.k_map = anisotropy_map(cfg.mesh, cfg.material, cfg.vcma, 0.0).k;
    st.drive = SotDrive::off();
    const RelaxResult r = relax(std::move(st), model, setup.ctrl, setup.relax_stop);
    const TextureClass cls = classify(r.state.m, cfg.classifier);

    write_ovf(r.state.m, cfg.output_dir + "/relaxed.ovf", r.state.t, cfg.material.Ms);
    std::printf("relaxed: class=%s u=%.6f Q=%.4f converged=%d max_torque=%.3e T\n",
                to_string(cls.kind).c_str(), cls.uniformity, cls.topological_charge,
                r.converged ? 1 : 0, r.max_torque);
    return r.converged ? 0 : 1;
}

int cmd_write(const CommonOpts& opts, const std::string& polarity, const std::string& start) {
    RunConfig cfg = load(opts);
    prepare_out(cfg);
    const int vsign = polarity == "+" ? +1 : -1;
    const FieldModel model(cfg.mesh, cfg.material);

    int start_pol;
    if (start == "up") start_pol = +1;
    else if (start == "down") start_pol = -1;
    else start_pol = -vsign * cfg.protocol.up_polarity_voltage_sign;  // default: state that must flip

    const SimState initial = relaxed_start(cfg, model, start_pol);
    const WriteResult r =
        write(initial, vsign, model, cfg.vcma, cfg.protocol, cfg.integrator, cfg.classifier);

    write_trace_csv(r.trace, cfg.output_dir + "/write_trace.csv");
    write_ovf(r.final_state.m, cfg.output_dir + "/write_final.ovf", r.final_state.t, cfg.material.Ms);
    const std::string recovery =
        r.recovery_time ? std::to_string(*r.recovery_time) + " s" : std::string("none");
    std::printf("write: polarity=%sV start=%s final=%s switched=%d recovery=%s\n",
                polarity.c_str(), start_pol > 0 ? "up" : "down",
                to_string(r.final_class.kind).c_str(), r.switched ? 1 : 0, recovery.c_str());
    return 0;
}

const SweepAxis* find_axis(const RunConfig& cfg, const std::string& name) {
    for (const SweepAxis& a : cfg.sweep.axes)
        if (a.name == name) return &a;
    return nullptr;
}

int cmd_phase_diagram(const CommonOpts& opts) {
    RunConfig cfg = load(opts);
    prepare_out(cfg);
    const SweepAxis* ku = find_axis(cfg, "Ku0");
    const SweepAxis* d = find_axis(cfg, "D");
    if (!ku || !d) throw ConfigError("phase-diagram needs sweep axes named Ku0 and D");
    const auto rows = phase_diagram(cfg.setup(), ku->values(), d->values());
    write_phase_csv(rows, cfg.output_dir + "/phase_diagram.csv");
    std::printf("phase-diagram: %zu points -> %s/phase_diagram.csv\n", rows.size(),
                cfg.output_dir.c_str());
    return 0;
}

int cmd_dmi_window(const CommonOpts& opts) {
    RunConfig cfg = load(opts);
    prepare_out(cfg);
    const SweepAxis* d = find_axis(cfg, "D");
    if (!d) throw ConfigError("dmi-window needs a sweep axis named D");
    const auto rows = dmi_window(cfg.setup(), d->values());
    write_dmi_csv(rows, cfg.output_dir + "/dmi_window.csv");
    std::printf("dmi-window: %zu points -> %s/dmi_window.csv\n", rows.size(), cfg.output_dir.c_str());
    return 0;
}

int cmd_gradient_curve(const CommonOpts& opts) {
    RunConfig cfg = load(opts);
    prepare_out(cfg);
    const SweepAxis* axis = find_axis(cfg, "Vb");
    if (!axis) axis = find_axis(cfg, "beta");
    if (!axis) throw ConfigError("gradient-curve needs a sweep axis named Vb or beta");
    const auto rows = gradient_curve(cfg.setup(), axis->name, axis->values());
    write_gradient_csv(rows, cfg.output_dir + "/gradient_curve.csv");
    std::printf("gradient-curve: %zu points -> %s/gradient_curve.csv\n", rows.size(),
                cfg.output_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-difference simulator for field-free SOT switching of a thin-film "
                 "free layer with interfacial DMI and a gated anisotropy gradient"};
    app.require_subcommand(1);

    CommonOpts opts;
    double tilt_deg = 5.0;
    std::string polarity = "+";
    std::string start = "auto";

    CLI::App* c_validate = app.add_subcommand("validate-config", "parse and validate a config file");
    add_common(c_validate, opts);

    CLI::App* c_relax = app.add_subcommand("relax", "relax a tilted uniform state to equilibrium");
    add_common(c_relax, opts);
    c_relax->add_option("--tilt", tilt_deg, "initial tilt from +z in degrees");

    CLI::App* c_write = app.add_subcommand("write", "run the three-step write protocol");
    add_common(c_write, opts);
    c_write->add_option("--polarity", polarity, "gate voltage sign, + or -")
        ->check(CLI::IsMember({"+", "-"}));
    c_write->add_option("--start", start, "initial uniform polarity: up, down or auto")
        ->check(CLI::IsMember({"up", "down", "auto"}));

    CLI::App* c_phase = app.add_subcommand("phase-diagram", "equilibrium classes over (Ku0, D)");
    add_common(c_phase, opts);
    CLI::App* c_dmi = app.add_subcommand("dmi-window", "switching determinism over D");
    add_common(c_dmi, opts);
    CLI::App* c_grad = app.add_subcommand("gradient-curve", "recovery time vs anisotropy gradient");
    add_common(c_grad, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems exit 2, --help exits 0
    }

    try {
        if (c_validate->parsed()) return cmd_validate(opts);
        if (c_relax->parsed()) return cmd_relax(opts, tilt_deg);
        if (c_write->parsed()) return cmd_write(opts, polarity, start);
        if (c_phase->parsed()) return cmd_phase_diagram(opts);
        if (c_dmi->parsed()) return cmd_dmi_window(opts);
        if (c_grad->parsed()) return cmd_gradient_curve(opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
