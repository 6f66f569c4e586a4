#include "chiralmm/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace chiralmm {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + path + it.key() + "'");
}

double get_num(const json& obj, const char* key, double fallback, const std::string& path) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError("'" + path + key + "' must be a number");
    return v.get<double>();
}

int get_int(const json& obj, const char* key, int fallback, const std::string& path) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError("'" + path + key + "' must be an integer");
    return v.get<int>();
}

Vec3 get_vec3(const json& obj, const char* key, const Vec3& fallback, const std::string& path) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 3)
        throw ConfigError("'" + path + key + "' must be an array of 3 numbers");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

MaskSpec parse_mask(const json& obj, const std::string& path) {
    check_keys(obj, {"all", "x0", "x1", "y0", "y1"}, path);
    MaskSpec spec;
    if (obj.contains("all")) {
        if (!obj.at("all").is_boolean()) throw ConfigError("'" + path + "all' must be a boolean");
        spec.all = obj.at("all").get<bool>();
        if (!spec.all && !obj.contains("x0"))
            throw ConfigError("'" + path + "' needs a box when all = false");
    }
    if (obj.contains("x0")) {
        spec.all = false;
        spec.x0 = get_int(obj, "x0", 0, path);
        spec.x1 = get_int(obj, "x1", spec.x0, path);
        spec.y0 = get_int(obj, "y0", 0, path);
        spec.y1 = get_int(obj, "y1", spec.y0, path);
    }
    return spec;
}

json mask_to_json(const MaskSpec& spec) {
    json j;
    if (spec.all) {
        j["all"] = true;
    } else {
        j["x0"] = spec.x0;
        j["x1"] = spec.x1;
        j["y0"] = spec.y0;
        j["y1"] = spec.y1;
    }
    return j;
}

SweepAxis parse_axis(const json& obj, const std::string& path) {
    check_keys(obj, {"name", "min", "max", "count", "scale"}, path);
    SweepAxis axis;
    if (!obj.contains("name")) throw ConfigError("'" + path + "name' is required");
    axis.name = obj.at("name").get<std::string>();
    axis.min = get_num(obj, "min", 0.0, path);
    axis.max = get_num(obj, "max", 0.0, path);
    axis.count = get_int(obj, "count", 2, path);
    if (obj.contains("scale")) {
        const std::string s = obj.at("scale").get<std::string>();
        if (s == "log") axis.log_scale = true;
        else if (s != "linear") throw ConfigError("'" + path + "scale' must be linear or log");
    }
    try {
        axis.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
    return axis;
}

}  // namespace

RegionMask MaskSpec::build(const Mesh& mesh) const {
    if (all) return RegionMask::all(mesh);
    if (x0 > x1 || y0 > y1 || x0 < 0 || y0 < 0 || x1 >= mesh.nx || y1 >= mesh.ny)
        throw ConfigError("mask box out of mesh bounds");
    return RegionMask::box(mesh, x0, x1, y0, y1);
}

void RunConfig::validate() const {
    try {
        mesh.validate();
        material.validate();
        vcma.validate();
        for (const SweepAxis& a : sweep.axes) a.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());  // uniform error surface for config loading
    }
    if (material.pol < 0.0) throw ConfigError("material.pol must be >= 0");
    if (protocol.t1 <= 0 || protocol.t2 <= 0 || protocol.t3 <= 0)
        throw ConfigError("protocol segment durations must be > 0");
    if (protocol.sample_interval <= 0) throw ConfigError("protocol.sample_interval must be > 0");
    if (integrator.tol <= 0 || integrator.max_dm <= 0 || integrator.dt_min <= 0)
        throw ConfigError("integrator tolerances must be > 0");
    if (classifier.uniform_u <= 0 || classifier.uniform_u > 1)
        throw ConfigError("classifier.uniform_u must be in (0, 1]");
    if (relax.torque_tol <= 0 || relax.max_time <= 0)
        throw ConfigError("relax criteria must be > 0");
    gate_spec.build(mesh);    // bounds check
    pillar_spec.build(mesh);  // bounds check
}

SimSetup RunConfig::setup() const {
    SimSetup s;
    s.mesh = mesh;
    s.material = material;
    s.vcma = vcma;
    s.timing = protocol;
    s.ctrl = integrator;
    s.thresholds = classifier;
    s.relax_stop = relax;
    s.seed = seed;
    s.workers = sweep.workers;
    return s;
}

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    check_keys(root,
               {"mesh", "material", "vcma", "protocol", "integrator", "classifier", "relax",
                "sweep", "pillar", "seed", "output_dir"},
               "");

    RunConfig cfg;
    if (root.contains("mesh")) {
        const json& m = root.at("mesh");
        check_keys(m, {"nx", "ny", "nz", "dx", "dy", "dz"}, "mesh.");
        cfg.mesh.nx = get_int(m, "nx", cfg.mesh.nx, "mesh.");
        cfg.mesh.ny = get_int(m, "ny", cfg.mesh.ny, "mesh.");
        cfg.mesh.nz = get_int(m, "nz", cfg.mesh.nz, "mesh.");
        cfg.mesh.dx = get_num(m, "dx", cfg.mesh.dx, "mesh.");
        cfg.mesh.dy = get_num(m, "dy", cfg.mesh.dy, "mesh.");
        cfg.mesh.dz = get_num(m, "dz", cfg.mesh.dz, "mesh.");
    }
    if (root.contains("material")) {
        const json& m = root.at("material");
        check_keys(m,
                   {"Ms", "Aex", "Ku0", "easy_axis", "D", "alpha", "pol", "sot_xi",
                    "sot_dl_scale", "sot_fl_scale", "gamma", "demag"},
                   "material.");
        MaterialParams& p = cfg.material;
        p.Ms = get_num(m, "Ms", p.Ms, "material.");
        p.Aex = get_num(m, "Aex", p.Aex, "material.");
        p.Ku0 = get_num(m, "Ku0", p.Ku0, "material.");
        p.easy_axis = get_vec3(m, "easy_axis", p.easy_axis, "material.");
        p.D = get_num(m, "D", p.D, "material.");
        p.alpha = get_num(m, "alpha", p.alpha, "material.");
        p.pol = get_num(m, "pol", p.pol, "material.");
        p.sot_xi = get_num(m, "sot_xi", p.sot_xi, "material.");
        p.sot_dl_scale = get_num(m, "sot_dl_scale", p.sot_dl_scale, "material.");
        p.sot_fl_scale = get_num(m, "sot_fl_scale", p.sot_fl_scale, "material.");
        p.gamma = get_num(m, "gamma", p.gamma, "material.");
        if (m.contains("demag")) {
            const std::string d = m.at("demag").get<std::string>();
            if (d == "none") p.demag = DemagMode::None;
            else if (d == "thin_film") p.demag = DemagMode::ThinFilm;
            else if (d == "full") p.demag = DemagMode::Full;
            else throw ConfigError("'material.demag' must be none, thin_film or full");
        }
    }
    if (root.contains("vcma")) {
        const json& m = root.at("vcma");
        check_keys(m, {"beta", "t_ox", "shape", "gate"}, "vcma.");
        cfg.vcma.beta = get_num(m, "beta", cfg.vcma.beta, "vcma.");
        cfg.vcma.t_ox = get_num(m, "t_ox", cfg.vcma.t_ox, "vcma.");
        if (m.contains("shape")) {
            const std::string s = m.at("shape").get<std::string>();
            if (s == "linear") cfg.vcma.shape = VcmaShape::Linear;
            else if (s == "step") cfg.vcma.shape = VcmaShape::Step;
            else throw ConfigError("'vcma.shape' must be linear or step");
        }
        if (m.contains("gate")) cfg.gate_spec = parse_mask(m.at("gate"), "vcma.gate.");
    }
    if (root.contains("protocol")) {
        const json& m = root.at("protocol");
        check_keys(m, {"t1", "t2", "t3", "J", "j_dir", "V", "sample_interval",
                       "up_polarity_voltage_sign"},
                   "protocol.");
        ProtocolTiming& t = cfg.protocol;
        t.t1 = get_num(m, "t1", t.t1, "protocol.");
        t.t2 = get_num(m, "t2", t.t2, "protocol.");
        t.t3 = get_num(m, "t3", t.t3, "protocol.");
        t.J = get_num(m, "J", t.J, "protocol.");
        t.j_dir = get_vec3(m, "j_dir", t.j_dir, "protocol.");
        t.V = get_num(m, "V", t.V, "protocol.");
        t.sample_interval = get_num(m, "sample_interval", t.sample_interval, "protocol.");
        t.up_polarity_voltage_sign =
            get_int(m, "up_polarity_voltage_sign", t.up_polarity_voltage_sign, "protocol.");
        if (t.up_polarity_voltage_sign != 1 && t.up_polarity_voltage_sign != -1)
            throw ConfigError("'protocol.up_polarity_voltage_sign' must be +1 or -1");
    }
    if (root.contains("integrator")) {
        const json& m = root.at("integrator");
        check_keys(m, {"tol", "max_dm", "dt_init", "dt_min", "dt_max"}, "integrator.");
        StepController& c = cfg.integrator;
        c.tol = get_num(m, "tol", c.tol, "integrator.");
        c.max_dm = get_num(m, "max_dm", c.max_dm, "integrator.");
        c.dt_init = get_num(m, "dt_init", c.dt_init, "integrator.");
        c.dt_min = get_num(m, "dt_min", c.dt_min, "integrator.");
        c.dt_max = get_num(m, "dt_max", c.dt_max, "integrator.");
    }
    if (root.contains("classifier")) {
        const json& m = root.at("classifier");
        check_keys(m, {"uniform_u", "skyrmion_q", "band_margin"}, "classifier.");
        cfg.classifier.uniform_u = get_num(m, "uniform_u", cfg.classifier.uniform_u, "classifier.");
        cfg.classifier.skyrmion_q = get_num(m, "skyrmion_q", cfg.classifier.skyrmion_q, "classifier.");
        cfg.classifier.band_margin = get_int(m, "band_margin", cfg.classifier.band_margin, "classifier.");
    }
    if (root.contains("relax")) {
        const json& m = root.at("relax");
        check_keys(m, {"torque_tol", "max_time"}, "relax.");
        cfg.relax.torque_tol = get_num(m, "torque_tol", cfg.relax.torque_tol, "relax.");
        cfg.relax.max_time = get_num(m, "max_time", cfg.relax.max_time, "relax.");
    }
    if (root.contains("sweep")) {
        const json& m = root.at("sweep");
        check_keys(m, {"protocol", "axes", "workers"}, "sweep.");
        if (m.contains("protocol")) {
            const std::string s = m.at("protocol").get<std::string>();
            if (s == "relax") cfg.sweep.protocol = SweepProtocol::Relax;
            else if (s == "write+") cfg.sweep.protocol = SweepProtocol::WritePos;
            else if (s == "write-") cfg.sweep.protocol = SweepProtocol::WriteNeg;
            else if (s == "write_both") cfg.sweep.protocol = SweepProtocol::WriteBoth;
            else throw ConfigError("'sweep.protocol' must be relax, write+, write- or write_both");
        }
        if (m.contains("axes")) {
            const json& axes = m.at("axes");
            if (!axes.is_array()) throw ConfigError("'sweep.axes' must be an array");
            for (std::size_t i = 0; i < axes.size(); ++i)
                cfg.sweep.axes.push_back(
                    parse_axis(axes[i], "sweep.axes[" + std::to_string(i) + "]."));
        }
        cfg.sweep.workers = get_int(m, "workers", 0, "sweep.");
    }
    if (root.contains("pillar")) cfg.pillar_spec = parse_mask(root.at("pillar"), "pillar.");
    if (root.contains("seed")) cfg.seed = root.at("seed").get<std::uint64_t>();
    if (root.contains("output_dir")) cfg.output_dir = root.at("output_dir").get<std::string>();

    cfg.validate();
    cfg.vcma.gate = cfg.gate_spec.all ? RegionMask() : cfg.gate_spec.build(cfg.mesh);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& cfg) {
    json root;
    root["mesh"] = {{"nx", cfg.mesh.nx}, {"ny", cfg.mesh.ny}, {"nz", cfg.mesh.nz},
                    {"dx", cfg.mesh.dx}, {"dy", cfg.mesh.dy}, {"dz", cfg.mesh.dz}};
    const MaterialParams& p = cfg.material;
    root["material"] = {
        {"Ms", p.Ms},
        {"Aex", p.Aex},
        {"Ku0", p.Ku0},
        {"easy_axis", {p.easy_axis.x, p.easy_axis.y, p.easy_axis.z}},
        {"D", p.D},
        {"alpha", p.alpha},
        {"pol", p.pol},
        {"sot_xi", p.sot_xi},
        {"sot_dl_scale", p.sot_dl_scale},
        {"sot_fl_scale", p.sot_fl_scale},
        {"gamma", p.gamma},
        {"demag", p.demag == DemagMode::None       ? "none"
                  : p.demag == DemagMode::ThinFilm ? "thin_film"
                                                   : "full"},
    };
    root["vcma"] = {{"beta", cfg.vcma.beta},
                    {"t_ox", cfg.vcma.t_ox},
                    {"shape", cfg.vcma.shape == VcmaShape::Linear ? "linear" : "step"},
                    {"gate", mask_to_json(cfg.gate_spec)}};
    const ProtocolTiming& t = cfg.protocol;
    root["protocol"] = {{"t1", t.t1},
                        {"t2", t.t2},
                        {"t3", t.t3},
                        {"J", t.J},
                        {"j_dir", {t.j_dir.x, t.j_dir.y, t.j_dir.z}},
                        {"V", t.V},
                        {"sample_interval", t.sample_interval},
                        {"up_polarity_voltage_sign", t.up_polarity_voltage_sign}};
    root["integrator"] = {{"tol", cfg.integrator.tol},
                          {"max_dm", cfg.integrator.max_dm},
                          {"dt_init", cfg.integrator.dt_init},
                          {"dt_min", cfg.integrator.dt_min},
                          {"dt_max", cfg.integrator.dt_max}};
    root["classifier"] = {{"uniform_u", cfg.classifier.uniform_u},
                          {"skyrmion_q", cfg.classifier.skyrmion_q},
                          {"band_margin", cfg.classifier.band_margin}};
    root["relax"] = {{"torque_tol", cfg.relax.torque_tol}, {"max_time", cfg.relax.max_time}};
    json sweep;
    sweep["protocol"] = cfg.sweep.protocol == SweepProtocol::Relax      ? "relax"
                        : cfg.sweep.protocol == SweepProtocol::WritePos ? "write+"
                        : cfg.sweep.protocol == SweepProtocol::WriteNeg ? "write-"
                                                                        : "write_both";
    sweep["axes"] = json::array();
    for (const SweepAxis& a : cfg.sweep.axes)
        sweep["axes"].push_back({{"name", a.name},
                                 {"min", a.min},
                                 {"max", a.max},
                                 {"count", a.count},
                                 {"scale", a.log_scale ? "log" : "linear"}});
    sweep["workers"] = cfg.sweep.workers;
    root["sweep"] = sweep;
    root["pillar"] = mask_to_json(cfg.pillar_spec);
    root["seed"] = cfg.seed;
    root["output_dir"] = cfg.output_dir;
    return root.dump(2) + "\n";
}

void save_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file: " + path);
    out << config_to_json(cfg);
}

// ---------------------------------------------------------------------------
// CSV emission

namespace {

std::string csv_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

}  // namespace

void write_trace_csv(const Trace& trace, const std::string& path) {
    std::ofstream out = open_csv(path);
    out << "t_s,mx,my,mz,J_A_per_m2,V_V\n";
    for (const TraceSample& s : trace)
        out << csv_num(s.t) << "," << csv_num(s.m_mean.x) << "," << csv_num(s.m_mean.y) << ","
            << csv_num(s.m_mean.z) << "," << csv_num(s.J) << "," << csv_num(s.Vb) << "\n";
}

void write_phase_csv(const std::vector<PhasePoint>& rows, const std::string& path) {
    std::ofstream out = open_csv(path);
    out << "Ku0_J_per_m3,D_J_per_m2,class,uniformity,topological_charge,bands_x,bands_y,converged\n";
    for (const PhasePoint& r : rows)
        out << csv_num(r.Ku0) << "," << csv_num(r.D) << "," << to_string(r.cls.kind) << ","
            << csv_num(r.cls.uniformity) << "," << csv_num(r.cls.topological_charge) << ","
            << r.cls.bands_x << "," << r.cls.bands_y << "," << (r.converged ? 1 : 0) << "\n";
}

void write_dmi_csv(const std::vector<DmiWindowPoint>& rows, const std::string& path) {
    std::ofstream out = open_csv(path);
    out << "D_J_per_m2,switched_posV,switched_negV,deterministic,recovery_time_s\n";
    for (const DmiWindowPoint& r : rows)
        out << csv_num(r.D) << "," << (r.switched_pos ? 1 : 0) << "," << (r.switched_neg ? 1 : 0)
            << "," << (r.deterministic ? 1 : 0) << "," << csv_num(r.recovery) << "\n";
}

void write_gradient_csv(const std::vector<GradientPoint>& rows, const std::string& path) {
    std::ofstream out = open_csv(path);
    out << "mean_gradient_J_per_m4,recovery_time_s,swept_value,switched,deterministic\n";
    for (const GradientPoint& r : rows)
        out << csv_num(r.gradient) << "," << csv_num(r.recovery) << "," << csv_num(r.value) << ","
            << (r.switched ? 1 : 0) << "," << (r.deterministic ? 1 : 0) << "\n";
}

}  // namespace chiralmm
