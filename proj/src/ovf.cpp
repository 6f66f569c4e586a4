#include "chiralmm/ovf.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chiralmm {

namespace {

std::string fmt_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_ovf(const VectorField& field, const std::string& path, double t, double Ms) {
    const Mesh& mesh = field.mesh;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_ovf: cannot open " + path);

    out << "# OOMMF OVF 2.0\n";
    out << "# Segment count: 1\n";
    out << "# Begin: Segment\n";
    out << "# Begin: Header\n";
    out << "# Title: magnetization\n";
    out << "# Desc: t = " << fmt_g17(t) << " s\n";
    out << "# Desc: Ms = " << fmt_g17(Ms) << " A/m\n";
    out << "# Desc: ordering: row-major, x fastest\n";
    out << "# meshtype: rectangular\n";
    out << "# meshunit: m\n";
    out << "# xmin: 0\n# ymin: 0\n# zmin: 0\n";
    out << "# xmax: " << fmt_g17(mesh.nx * mesh.dx) << "\n";
    out << "# ymax: " << fmt_g17(mesh.ny * mesh.dy) << "\n";
    out << "# zmax: " << fmt_g17(mesh.nz * mesh.dz) << "\n";
    out << "# xbase: " << fmt_g17(mesh.dx / 2) << "\n";
    out << "# ybase: " << fmt_g17(mesh.dy / 2) << "\n";
    out << "# zbase: " << fmt_g17(mesh.dz / 2) << "\n";
    out << "# xstepsize: " << fmt_g17(mesh.dx) << "\n";
    out << "# ystepsize: " << fmt_g17(mesh.dy) << "\n";
    out << "# zstepsize: " << fmt_g17(mesh.dz) << "\n";
    out << "# xnodes: " << mesh.nx << "\n";
    out << "# ynodes: " << mesh.ny << "\n";
    out << "# znodes: " << mesh.nz << "\n";
    out << "# valuedim: 3\n";
    out << "# valueunits: 1 1 1\n";
    out << "# valuelabels: m_x m_y m_z\n";
    out << "# End: Header\n";
    out << "# Begin: Data Text\n";
    for (const Vec3& v : field.data)
        out << fmt_g17(v.x) << " " << fmt_g17(v.y) << " " << fmt_g17(v.z) << "\n";
    out << "# End: Data Text\n";
    out << "# End: Segment\n";
    if (!out) throw std::runtime_error("write_ovf: write failed for " + path);
}

OvfSnapshot read_ovf(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_ovf: cannot open " + path);

    OvfSnapshot snap;
    int nx = 0, ny = 0, nz = 0;
    double dx = 0.0, dy = 0.0, dz = 0.0;
    std::string line;
    bool in_data = false;
    std::vector<Vec3> data;

    auto header_value = [](const std::string& l, const std::string& key, std::string& out_val) {
        const std::string tag = "# " + key + ":";
        if (l.rfind(tag, 0) == 0) {
            out_val = l.substr(tag.size());
            return true;
        }
        return false;
    };

    while (std::getline(in, line)) {
        if (!in_data) {
            std::string val;
            if (header_value(line, "xnodes", val)) nx = std::stoi(val);
            else if (header_value(line, "ynodes", val)) ny = std::stoi(val);
            else if (header_value(line, "znodes", val)) nz = std::stoi(val);
            else if (header_value(line, "xstepsize", val)) dx = std::stod(val);
            else if (header_value(line, "ystepsize", val)) dy = std::stod(val);
            else if (header_value(line, "zstepsize", val)) dz = std::stod(val);
            else if (line.rfind("# Desc: t =", 0) == 0) snap.t = std::stod(line.substr(11));
            else if (line.rfind("# Desc: Ms =", 0) == 0) snap.Ms = std::stod(line.substr(12));
            else if (line.rfind("# Begin: Data Text", 0) == 0) in_data = true;
            else if (line.rfind("# Begin: Data", 0) == 0)
                throw std::runtime_error("read_ovf: only text data supported");
        } else {
            if (line.rfind("# End", 0) == 0) break;
            std::istringstream ss(line);
            Vec3 v;
            if (!(ss >> v.x >> v.y >> v.z))
                throw std::runtime_error("read_ovf: malformed data row: " + line);
            data.push_back(v);
        }
    }
    if (nx < 1 || ny < 1 || nz < 1 || dx <= 0 || dy <= 0 || dz <= 0)
        throw std::runtime_error("read_ovf: incomplete header in " + path);
    const Mesh mesh(nx, ny, nz, dx, dy, dz);
    if (data.size() != mesh.cell_count())
        throw std::runtime_error("read_ovf: data row count does not match node counts");
    snap.field = VectorField(mesh);
    snap.field.data = std::move(data);
    return snap;
}

}  // namespace chiralmm
