#include "chiralmm/texture.hpp"

#include <cmath>
#include <stdexcept>

namespace chiralmm {

std::string to_string(TextureKind k) {
    switch (k) {
        case TextureKind::UniformUp: return "UniformUp";
        case TextureKind::UniformDown: return "UniformDown";
        case TextureKind::VerticalStripe: return "VerticalStripe";
        case TextureKind::CircularStripe: return "CircularStripe";
        default: return "Indeterminate";
    }
}

namespace {

Vec3 diff_x(const VectorField& m, int ix, int iy) {
    const Mesh& mesh = m.mesh;
    if (mesh.nx < 2) return {0.0, 0.0, 0.0};
    if (ix == 0) return (m.at(1, iy) - m.at(0, iy)) / mesh.dx;
    if (ix == mesh.nx - 1) return (m.at(ix, iy) - m.at(ix - 1, iy)) / mesh.dx;
    return (m.at(ix + 1, iy) - m.at(ix - 1, iy)) / (2.0 * mesh.dx);
}

Vec3 diff_y(const VectorField& m, int ix, int iy) {
    const Mesh& mesh = m.mesh;
    if (mesh.ny < 2) return {0.0, 0.0, 0.0};
    if (iy == 0) return (m.at(ix, 1) - m.at(ix, 0)) / mesh.dy;
    if (iy == mesh.ny - 1) return (m.at(ix, iy) - m.at(ix, iy - 1)) / mesh.dy;
    return (m.at(ix, iy + 1) - m.at(ix, iy - 1)) / (2.0 * mesh.dy);
}

int sign_changes_along_x(const VectorField& m, int iy) {
    int changes = 0;
    double prev = m.at(0, iy).z;
    for (int ix = 1; ix < m.mesh.nx; ++ix) {
        const double cur = m.at(ix, iy).z;
        if (prev * cur < 0.0) ++changes;
        if (cur != 0.0) prev = cur;
    }
    return changes;
}

int sign_changes_along_y(const VectorField& m, int ix) {
    int changes = 0;
    double prev = m.at(ix, 0).z;
    for (int iy = 1; iy < m.mesh.ny; ++iy) {
        const double cur = m.at(ix, iy).z;
        if (prev * cur < 0.0) ++changes;
        if (cur != 0.0) prev = cur;
    }
    return changes;
}

}  // namespace

double skyrmion_number(const VectorField& m) {
    const Mesh& mesh = m.mesh;
    if (mesh.nz != 1) throw std::invalid_argument("skyrmion_number: requires nz = 1");
    double q = 0.0;
    for (int iy = 0; iy < mesh.ny; ++iy)
        for (int ix = 0; ix < mesh.nx; ++ix)
            q += m.at(ix, iy).dot(diff_x(m, ix, iy).cross(diff_y(m, ix, iy)));
    return q * mesh.dx * mesh.dy / (4.0 * M_PI);
}

TextureClass classify(const VectorField& m, const ClassifierThresholds& th) {
    TextureClass out;
    const Vec3 mean = mean_vector(m);
    out.uniformity = std::abs(mean.z);
    out.topological_charge = skyrmion_number(m);
    for (int iy = 0; iy < m.mesh.ny; ++iy)
        out.bands_x = std::max(out.bands_x, sign_changes_along_x(m, iy));
    for (int ix = 0; ix < m.mesh.nx; ++ix)
        out.bands_y = std::max(out.bands_y, sign_changes_along_y(m, ix));

    if (out.uniformity >= th.uniform_u) {
        out.kind = mean.z >= 0.0 ? TextureKind::UniformUp : TextureKind::UniformDown;
        return out;
    }

    const bool low_q = std::abs(out.topological_charge) < th.skyrmion_q;
    const int diff = std::abs(out.bands_x - out.bands_y);
    if (diff >= th.band_margin && low_q) {
        out.kind = TextureKind::VerticalStripe;
        return out;
    }
    const bool banded_both = out.bands_x >= 1 && out.bands_y >= 1 && diff < th.band_margin;
    if (banded_both || !low_q) {
        out.kind = TextureKind::CircularStripe;
        return out;
    }
    out.kind = TextureKind::Indeterminate;
    return out;
}

}  // namespace chiralmm
