#include "chiralmm/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace chiralmm {

std::vector<Neighbor> neighbors(const Mesh& mesh, std::size_t i) {
    if (i >= mesh.cell_count()) throw std::out_of_range("neighbors: cell index out of range");
    const int ix = mesh.ix_of(i);
    const int iy = mesh.iy_of(i);
    const int iz = mesh.iz_of(i);

    std::vector<Neighbor> out;
    out.reserve(6);
    if (ix > 0) out.push_back({mesh.index(ix - 1, iy, iz), Axis::X, -1});
    if (ix < mesh.nx - 1) out.push_back({mesh.index(ix + 1, iy, iz), Axis::X, +1});
    if (iy > 0) out.push_back({mesh.index(ix, iy - 1, iz), Axis::Y, -1});
    if (iy < mesh.ny - 1) out.push_back({mesh.index(ix, iy + 1, iz), Axis::Y, +1});
    if (iz > 0) out.push_back({mesh.index(ix, iy, iz - 1), Axis::Z, -1});
    if (iz < mesh.nz - 1) out.push_back({mesh.index(ix, iy, iz + 1), Axis::Z, +1});
    return out;
}

RegionMask RegionMask::box(const Mesh& m, int x0, int x1, int y0, int y1) {
    RegionMask mask(m, false);
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, m.nx - 1);
    y1 = std::min(y1, m.ny - 1);
    for (int iy = y0; iy <= y1; ++iy)
        for (int ix = x0; ix <= x1; ++ix)
            mask.member[m.index(ix, iy)] = 1;
    return mask;
}

std::size_t RegionMask::count() const {
    std::size_t n = 0;
    for (char c : member) n += (c != 0);
    return n;
}

Vec3 mean_vector(const VectorField& f, const RegionMask& mask) {
    if (!(f.mesh == mask.mesh)) throw std::invalid_argument("mean_vector: mesh mismatch");
    Vec3 sum{0.0, 0.0, 0.0};
    std::size_t n = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (mask.contains(i)) {
            sum += f[i];
            ++n;
        }
    }
    if (n == 0) throw std::invalid_argument("mean_vector: empty mask");
    return sum / static_cast<double>(n);
}

Vec3 mean_vector(const VectorField& f) {
    Vec3 sum{0.0, 0.0, 0.0};
    for (const Vec3& v : f.data) sum += v;
    if (f.size() == 0) throw std::invalid_argument("mean_vector: empty field");
    return sum / static_cast<double>(f.size());
}

bool is_unit_norm(const VectorField& m, double tol) {
    for (const Vec3& v : m.data)
        if (std::abs(v.norm() - 1.0) > tol) return false;
    return true;
}

void require_unit_norm(const VectorField& m, double tol) {
    if (!is_unit_norm(m, tol))
        throw std::invalid_argument("magnetization field violates the unit-norm invariant");
}

void normalize(VectorField& m) {
    for (Vec3& v : m.data) v = v.normalized();
}

}  // namespace chiralmm
