#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chiralmm/config.hpp"
#include "chiralmm/dynamics.hpp"
#include "chiralmm/effective_field.hpp"
#include "chiralmm/materials.hpp"
#include "chiralmm/mesh.hpp"
#include "chiralmm/ovf.hpp"
#include "chiralmm/protocol.hpp"
#include "chiralmm/sweeps.hpp"
#include "chiralmm/texture.hpp"

namespace py = pybind11;
using namespace chiralmm;

namespace {

/// (ny, nx, 3) float64 array view of a vector field (copies).
py::array_t<double> field_to_array(const VectorField& f) {
    const Mesh& mesh = f.mesh;
    py::array_t<double> out({mesh.ny, mesh.nx, 3});
    auto a = out.mutable_unchecked<3>();
    for (int iy = 0; iy < mesh.ny; ++iy)
        for (int ix = 0; ix < mesh.nx; ++ix) {
            const Vec3& v = f[mesh.index(ix, iy)];
            a(iy, ix, 0) = v.x;
            a(iy, ix, 1) = v.y;
            a(iy, ix, 2) = v.z;
        }
    return out;
}

VectorField array_to_field(const Mesh& mesh, py::array_t<double, py::array::c_style> arr) {
    if (arr.ndim() != 3 || arr.shape(0) != mesh.ny || arr.shape(1) != mesh.nx || arr.shape(2) != 3)
        throw std::invalid_argument("expected an (ny, nx, 3) array matching the mesh");
    VectorField f(mesh);
    auto a = arr.unchecked<3>();
    for (int iy = 0; iy < mesh.ny; ++iy)
        for (int ix = 0; ix < mesh.nx; ++ix)
            f[mesh.index(ix, iy)] = Vec3{a(iy, ix, 0), a(iy, ix, 1), a(iy, ix, 2)};
    return f;
}

py::array_t<double> scalar_to_array(const ScalarField& k) {
    const Mesh& mesh = k.mesh;
    py::array_t<double> out({mesh.ny, mesh.nx});
    auto a = out.mutable_unchecked<2>();
    for (int iy = 0; iy < mesh.ny; ++iy)
        for (int ix = 0; ix < mesh.nx; ++ix) a(iy, ix) = k[mesh.index(ix, iy)];
    return out;
}

py::dict class_to_dict(const TextureClass& c) {
    py::dict d;
    d["kind"] = to_string(c.kind);
    d["uniformity"] = c.uniformity;
    d["topological_charge"] = c.topological_charge;
    d["bands_x"] = c.bands_x;
    d["bands_y"] = c.bands_y;
    d["polarity"] = c.polarity();
    return d;
}

py::list trace_to_list(const Trace& tr) {
    py::list out;
    for (const TraceSample& s : tr) {
        py::dict d;
        d["t"] = s.t;
        d["m"] = py::make_tuple(s.m_mean.x, s.m_mean.y, s.m_mean.z);
        d["J"] = s.J;
        d["V"] = s.Vb;
        out.append(d);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Finite-difference micromagnetics of SOT/VCMA switching in a chiral free layer";

    py::class_<Mesh>(m, "Mesh")
        .def(py::init<>())
        .def(py::init<int, int, int, double, double, double>(), py::arg("nx"), py::arg("ny"),
             py::arg("nz"), py::arg("dx"), py::arg("dy"), py::arg("dz"))
        .def_readonly("nx", &Mesh::nx)
        .def_readonly("ny", &Mesh::ny)
        .def_readonly("nz", &Mesh::nz)
        .def_readonly("dx", &Mesh::dx)
        .def_readonly("dy", &Mesh::dy)
        .def_readonly("dz", &Mesh::dz)
        .def("cell_count", &Mesh::cell_count);

    py::class_<RunConfig>(m, "RunConfig")
        .def_readonly("mesh", &RunConfig::mesh)
        .def_readonly("seed", &RunConfig::seed)
        .def("to_json", [](const RunConfig& c) { return config_to_json(c); });

    m.def("parse_config", &parse_config, py::arg("json_text"),
          "Parse a JSON config string; omitted keys take their defaults.");
    m.def("load_config", &load_config, py::arg("path"));

    m.def(
        "relax",
        [](const RunConfig& cfg, int polarity, double tilt_deg) {
            const FieldModel model(cfg.mesh, cfg.material);
            SimState st;
            st.m = tilted_uniform_state(cfg.mesh, polarity, tilt_deg);
            st.k_map = anisotropy_map(cfg.mesh, cfg.material, cfg.vcma, 0.0).k;
            RelaxResult r = relax(std::move(st), model, cfg.integrator, cfg.relax);
            py::dict out;
            out["converged"] = r.converged;
            out["max_torque"] = r.max_torque;
            out["t"] = r.state.t;
            out["m"] = field_to_array(r.state.m);
            out["class"] = class_to_dict(classify(r.state.m, cfg.classifier));
            return out;
        },
        py::arg("config"), py::arg("polarity") = 1, py::arg("tilt_deg") = 5.0,
        "Zero-drive relaxation from a tilted uniform state.");

    m.def(
        "write",
        [](const RunConfig& cfg, int voltage_sign, int start_polarity) {
            const FieldModel model(cfg.mesh, cfg.material);
            SimState st;
            st.m = VectorField(cfg.mesh, Vec3{0, 0, static_cast<double>(start_polarity)});
            st.k_map = anisotropy_map(cfg.mesh, cfg.material, cfg.vcma, 0.0).k;
            RelaxResult r = relax(std::move(st), model, cfg.integrator, cfg.relax);
            WriteResult w = write(r.state, voltage_sign, model, cfg.vcma, cfg.protocol,
                                  cfg.integrator, cfg.classifier);
            py::dict out;
            out["switched"] = w.switched;
            out["deterministic"] = w.deterministic;
            out["final_class"] = class_to_dict(w.final_class);
            out["recovery_time"] =
                w.recovery_time ? py::object(py::float_(*w.recovery_time)) : py::none();
            out["t_release"] = w.t_release;
            out["m"] = field_to_array(w.final_state.m);
            out["trace"] = trace_to_list(w.trace);
            return out;
        },
        py::arg("config"), py::arg("voltage_sign"), py::arg("start_polarity") = -1,
        "Three-step write protocol from a relaxed uniform start.");

    m.def(
        "effective_field",
        [](const RunConfig& cfg, py::array_t<double, py::array::c_style> m_arr, double Vb) {
            const FieldModel model(cfg.mesh, cfg.material);
            const VectorField mf = array_to_field(cfg.mesh, m_arr);
            const ScalarField k = anisotropy_map(cfg.mesh, cfg.material, cfg.vcma, Vb).k;
            FieldTerms t = model.field_terms(mf, k);
            py::dict out;
            out["exchange"] = field_to_array(t.exchange);
            out["dmi"] = field_to_array(t.dmi);
            out["anisotropy"] = field_to_array(t.anisotropy);
            out["demag"] = field_to_array(t.demag);
            out["total"] = field_to_array(t.total);
            return out;
        },
        py::arg("config"), py::arg("m"), py::arg("Vb") = 0.0,
        "Per-term effective induction (tesla) for an (ny, nx, 3) magnetization array.");

    m.def(
        "total_energy",
        [](const RunConfig& cfg, py::array_t<double, py::array::c_style> m_arr, double Vb) {
            const FieldModel model(cfg.mesh, cfg.material);
            const VectorField mf = array_to_field(cfg.mesh, m_arr);
            const ScalarField k = anisotropy_map(cfg.mesh, cfg.material, cfg.vcma, Vb).k;
            EnergyTerms e = model.total_energy(mf, k);
            py::dict out;
            out["exchange"] = e.exchange;
            out["dmi"] = e.dmi;
            out["anisotropy"] = e.anisotropy;
            out["demag"] = e.demag;
            out["total"] = e.total;
            return out;
        },
        py::arg("config"), py::arg("m"), py::arg("Vb") = 0.0);

    m.def(
        "anisotropy_map",
        [](const RunConfig& cfg, double Vb) {
            AnisotropyMapResult r = anisotropy_map(cfg.mesh, cfg.material, cfg.vcma, Vb);
            py::dict out;
            out["k"] = scalar_to_array(r.k);
            out["clamped"] = r.clamped;
            out["mean_gradient"] = gradient_magnitude(r.k);
            return out;
        },
        py::arg("config"), py::arg("Vb"),
        "Per-cell anisotropy (J/m^3) under the gate voltage, plus the mean |dK/dx|.");

    m.def(
        "classify",
        [](const RunConfig& cfg, py::array_t<double, py::array::c_style> m_arr) {
            return class_to_dict(classify(array_to_field(cfg.mesh, m_arr), cfg.classifier));
        },
        py::arg("config"), py::arg("m"));

    m.def(
        "skyrmion_number",
        [](const RunConfig& cfg, py::array_t<double, py::array::c_style> m_arr) {
            return skyrmion_number(array_to_field(cfg.mesh, m_arr));
        },
        py::arg("config"), py::arg("m"));

    m.def(
        "phase_diagram",
        [](const RunConfig& cfg, std::vector<double> ku, std::vector<double> d) {
            std::vector<PhasePoint> rows = phase_diagram(cfg.setup(), ku, d);
            py::list out;
            for (const PhasePoint& r : rows) {
                py::dict row;
                row["Ku0"] = r.Ku0;
                row["D"] = r.D;
                row["converged"] = r.converged;
                row["class"] = class_to_dict(r.cls);
                out.append(row);
            }
            return out;
        },
        py::arg("config"), py::arg("ku_values"), py::arg("d_values"));

    m.def(
        "dmi_window",
        [](const RunConfig& cfg, std::vector<double> d_values) {
            std::vector<DmiWindowPoint> rows = dmi_window(cfg.setup(), d_values);
            py::list out;
            for (const DmiWindowPoint& r : rows) {
                py::dict row;
                row["D"] = r.D;
                row["switched_pos"] = r.switched_pos;
                row["switched_neg"] = r.switched_neg;
                row["deterministic"] = r.deterministic;
                row["recovery"] = r.recovery;
                out.append(row);
            }
            return out;
        },
        py::arg("config"), py::arg("d_values"));

    m.def(
        "gradient_curve",
        [](const RunConfig& cfg, const std::string& axis, std::vector<double> values) {
            std::vector<GradientPoint> rows = gradient_curve(cfg.setup(), axis, values);
            py::list out;
            for (const GradientPoint& r : rows) {
                py::dict row;
                row["value"] = r.value;
                row["gradient"] = r.gradient;
                row["recovery"] = r.recovery;
                row["switched"] = r.switched;
                row["deterministic"] = r.deterministic;
                out.append(row);
            }
            return out;
        },
        py::arg("config"), py::arg("axis"), py::arg("values"));

    m.def(
        "write_ovf",
        [](const RunConfig& cfg, py::array_t<double, py::array::c_style> m_arr,
           const std::string& path, double t, double Ms) {
            write_ovf(array_to_field(cfg.mesh, m_arr), path, t, Ms);
        },
        py::arg("config"), py::arg("m"), py::arg("path"), py::arg("t") = 0.0,
        py::arg("Ms") = 0.0);

    m.def("read_ovf", [](const std::string& path) {
        OvfSnapshot s = read_ovf(path);
        py::dict out;
        out["m"] = field_to_array(s.field);
        out["t"] = s.t;
        out["Ms"] = s.Ms;
        out["nx"] = s.field.mesh.nx;
        out["ny"] = s.field.mesh.ny;
        return out;
    });

    py::register_exception<ConfigError>(m, "ConfigError");
}
