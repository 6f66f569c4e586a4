#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "chiralmm/vec3.hpp"

namespace chiralmm {

/// Regular grid over a single-layer thin film. Cells are indexed row-major,
/// x fastest: idx = ix + nx*(iy + ny*iz).
struct Mesh {
    int nx = 20;
    int ny = 20;
    int nz = 1;
    double dx = 1e-9;
    double dy = 1e-9;
    double dz = 1e-9;

    Mesh() = default;
    Mesh(int nx_, int ny_, int nz_, double dx_, double dy_, double dz_)
        : nx(nx_), ny(ny_), nz(nz_), dx(dx_), dy(dy_), dz(dz_) {
        validate();
    }

    void validate() const {
        if (nx < 1 || ny < 1) throw std::invalid_argument("mesh: nx and ny must be >= 1");
        if (nz != 1) throw std::invalid_argument("mesh: only single-layer films supported (nz must be 1)");
        if (dx <= 0.0 || dy <= 0.0 || dz <= 0.0)
            throw std::invalid_argument("mesh: cell edges must be strictly positive");
    }

    std::size_t cell_count() const { return static_cast<std::size_t>(nx) * ny * nz; }
    double cell_volume() const { return dx * dy * dz; }

    std::size_t index(int ix, int iy, int iz = 0) const {
        return static_cast<std::size_t>(ix) + static_cast<std::size_t>(nx) * (iy + static_cast<std::size_t>(ny) * iz);
    }
    int ix_of(std::size_t i) const { return static_cast<int>(i % nx); }
    int iy_of(std::size_t i) const { return static_cast<int>((i / nx) % ny); }
    int iz_of(std::size_t i) const { return static_cast<int>(i / (static_cast<std::size_t>(nx) * ny)); }

    bool operator==(const Mesh& o) const {
        return nx == o.nx && ny == o.ny && nz == o.nz && dx == o.dx && dy == o.dy && dz == o.dz;
    }
};

enum class Axis { X = 0, Y = 1, Z = 2 };

struct Neighbor {
    std::size_t index;
    Axis axis;
    int direction;  // -1 or +1 along the axis
};

/// In-bounds 6-neighborhood of cell i (4 in-plane entries for nz = 1).
std::vector<Neighbor> neighbors(const Mesh& mesh, std::size_t i);

struct VectorField {
    Mesh mesh;
    std::vector<Vec3> data;

    VectorField() = default;
    explicit VectorField(const Mesh& m, const Vec3& fill = {0.0, 0.0, 0.0})
        : mesh(m), data(m.cell_count(), fill) {}

    std::size_t size() const { return data.size(); }
    Vec3& operator[](std::size_t i) { return data[i]; }
    const Vec3& operator[](std::size_t i) const { return data[i]; }
    Vec3& at(int ix, int iy, int iz = 0) { return data[mesh.index(ix, iy, iz)]; }
    const Vec3& at(int ix, int iy, int iz = 0) const { return data[mesh.index(ix, iy, iz)]; }
};

struct ScalarField {
    Mesh mesh;
    std::vector<double> data;

    ScalarField() = default;
    explicit ScalarField(const Mesh& m, double fill = 0.0) : mesh(m), data(m.cell_count(), fill) {}

    std::size_t size() const { return data.size(); }
    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }
};

struct RegionMask {
    Mesh mesh;
    std::vector<char> member;

    RegionMask() = default;
    explicit RegionMask(const Mesh& m, bool fill = false)
        : mesh(m), member(m.cell_count(), fill ? 1 : 0) {}

    static RegionMask all(const Mesh& m) { return RegionMask(m, true); }
    /// Inclusive cell-index box [x0,x1]x[y0,y1].
    static RegionMask box(const Mesh& m, int x0, int x1, int y0, int y1);

    bool contains(std::size_t i) const { return member[i] != 0; }
    std::size_t count() const;
    bool empty() const { return count() == 0; }
};

/// Arithmetic mean of per-cell vectors over masked cells; deterministic
/// summation order (ascending cell index).
Vec3 mean_vector(const VectorField& f, const RegionMask& mask);
Vec3 mean_vector(const VectorField& f);

/// Asserts ||m_i| - 1| <= tol on every cell.
bool is_unit_norm(const VectorField& m, double tol = 1e-9);
void require_unit_norm(const VectorField& m, double tol = 1e-9);

void normalize(VectorField& m);

}  // namespace chiralmm
