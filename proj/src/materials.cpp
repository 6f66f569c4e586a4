#include "chiralmm/materials.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace chiralmm {

void MaterialParams::validate() const {
    if (Ms <= 0.0) throw std::invalid_argument("material.Ms must be > 0");
    if (Aex <= 0.0) throw std::invalid_argument("material.Aex must be > 0");
    if (gamma <= 0.0) throw std::invalid_argument("material.gamma must be > 0");
    if (Ku0 < 0.0) throw std::invalid_argument("material.Ku0 must be >= 0");
    if (alpha <= 0.0) throw std::invalid_argument("material.alpha must be > 0");
    if (std::abs(easy_axis.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("material.easy_axis must be unit-norm");
}

void VcmaProfile::validate() const {
    if (t_ox <= 0.0) throw std::invalid_argument("vcma.t_ox must be > 0");
}

namespace {

struct GateExtent {
    int x0 = 0;
    int x1 = 0;
    bool whole_layer = false;
};

GateExtent gate_extent(const Mesh& mesh, const RegionMask& gate) {
    GateExtent e;
    if (gate.member.empty()) {
        e.x0 = 0;
        e.x1 = mesh.nx - 1;
        e.whole_layer = true;
        return e;
    }
    if (!(gate.mesh == mesh)) throw std::invalid_argument("vcma.gate mesh mismatch");
    int x0 = std::numeric_limits<int>::max();
    int x1 = std::numeric_limits<int>::min();
    for (std::size_t i = 0; i < gate.member.size(); ++i) {
        if (gate.contains(i)) {
            const int ix = mesh.ix_of(i);
            x0 = std::min(x0, ix);
            x1 = std::max(x1, ix);
        }
    }
    if (x1 < x0) throw std::invalid_argument("vcma.gate must contain at least one cell");
    e.x0 = x0;
    e.x1 = x1;
    return e;
}

double profile_value(const Mesh& mesh, const RegionMask& gate, VcmaShape shape,
                     const GateExtent& e, std::size_t i) {
    const bool inside = e.whole_layer || gate.contains(i);
    if (!inside) return 0.0;
    if (shape == VcmaShape::Step) return 1.0;
    if (e.x1 == e.x0) return 1.0;
    const int ix = mesh.ix_of(i);
    return static_cast<double>(ix - e.x0) / static_cast<double>(e.x1 - e.x0);
}

}  // namespace

double VcmaProfile::g(const Mesh& mesh, std::size_t i) const {
    return profile_value(mesh, gate, shape, gate_extent(mesh, gate), i);
}

void DriveSchedule::validate() const {
    for (const DriveSegment& s : segments) {
        if (s.duration <= 0.0) throw std::invalid_argument("drive segment duration must be > 0");
        if (s.J != 0.0) {
            if (std::abs(s.j_dir.z) > 1e-12)
                throw std::invalid_argument("drive current direction must be in-plane");
            if (std::abs(s.j_dir.norm() - 1.0) > 1e-9)
                throw std::invalid_argument("drive current direction must be unit-norm");
        }
    }
}

double DriveSchedule::total_duration() const {
    double t = 0.0;
    for (const DriveSegment& s : segments) t += s.duration;
    return t;
}

AnisotropyMapResult anisotropy_map(const Mesh& mesh, const MaterialParams& p,
                                   const VcmaProfile& v, double Vb) {
    p.validate();
    v.validate();
    const GateExtent e = gate_extent(mesh, v.gate);
    const double dk = v.beta * Vb / v.t_ox;

    AnisotropyMapResult out;
    out.k = ScalarField(mesh, p.Ku0);
    for (std::size_t i = 0; i < out.k.size(); ++i) {
        const double ku = p.Ku0 - dk * profile_value(mesh, v.gate, v.shape, e, i);
        if (ku < 0.0) {
            out.clamped = true;  // strong-voltage regime
            out.k[i] = 0.0;
        } else {
            out.k[i] = ku;
        }
    }
    return out;
}

double gradient_magnitude(const ScalarField& k) {
    const Mesh& mesh = k.mesh;
    if (mesh.nx < 2) throw std::invalid_argument("gradient_magnitude: nx must be >= 2");
    double sum = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const int ix = mesh.ix_of(i);
        const int iy = mesh.iy_of(i);
        const int iz = mesh.iz_of(i);
        double dkdx;
        if (ix == 0) {
            dkdx = (k[mesh.index(1, iy, iz)] - k[i]) / mesh.dx;
        } else if (ix == mesh.nx - 1) {
            dkdx = (k[i] - k[mesh.index(ix - 1, iy, iz)]) / mesh.dx;
        } else {
            dkdx = (k[mesh.index(ix + 1, iy, iz)] - k[mesh.index(ix - 1, iy, iz)]) / (2.0 * mesh.dx);
        }
        sum += std::abs(dkdx);
    }
    return sum / static_cast<double>(k.size());
}

}  // namespace chiralmm
