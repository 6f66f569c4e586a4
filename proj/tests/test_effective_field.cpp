#include <doctest.h>

#include <cmath>
#include <random>

#include "chiralmm/effective_field.hpp"

using namespace chiralmm;

namespace {

VectorField random_unit_field(const Mesh& mesh, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    VectorField f(mesh);
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = Vec3{dist(rng), dist(rng), dist(rng)}.normalized();
    return f;
}

/// Central finite difference of an energy functional with respect to one
/// magnetization component; B = -(1/(Ms*V_cell)) dE/dm.
template <typename EnergyFn>
double fd_field_component(const VectorField& m, std::size_t cell, int comp, double Ms,
                          double vol, EnergyFn&& energy) {
    const double h = 1e-6;
    VectorField plus = m, minus = m;
    auto bump = [&](VectorField& f, double d) {
        if (comp == 0) f[cell].x += d;
        else if (comp == 1) f[cell].y += d;
        else f[cell].z += d;
    };
    bump(plus, h);
    bump(minus, -h);
    return -(energy(plus) - energy(minus)) / (2.0 * h) / (Ms * vol);
}

template <typename FieldFn, typename EnergyFn>
void check_field_is_energy_gradient(const Mesh& mesh, int n_states, double Ms,
                                    FieldFn&& field, EnergyFn&& energy, double rel_tol) {
    const double vol = mesh.cell_volume();
    for (int s = 0; s < n_states; ++s) {
        const VectorField m = random_unit_field(mesh, 100 + s);
        const VectorField b = field(m);
        double max_b = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i)
            max_b = std::max({max_b, std::abs(b[i].x), std::abs(b[i].y), std::abs(b[i].z)});
        REQUIRE(max_b > 0.0);
        for (std::size_t i = 0; i < m.size(); ++i) {
            for (int c = 0; c < 3; ++c) {
                const double fd = fd_field_component(m, i, c, Ms, vol, energy);
                const double an = (c == 0) ? b[i].x : (c == 1) ? b[i].y : b[i].z;
                CHECK(std::abs(an - fd) <= rel_tol * max_b);
            }
        }
    }
}

}  // namespace

TEST_CASE("uniform magnetization has zero exchange field") {
    Mesh mesh(5, 4, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;
    VectorField m(mesh, Vec3{0.6, 0.0, 0.8});
    VectorField b = exchange_field(m, p);
    for (std::size_t i = 0; i < b.size(); ++i) {
        CHECK(b[i].x == doctest::Approx(0.0));
        CHECK(b[i].z == doctest::Approx(0.0));
    }
    CHECK(exchange_energy(m, p) == doctest::Approx(0.0));
}

TEST_CASE("two-cell exchange field arithmetic oracle") {
    Mesh mesh(2, 1, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;  // Aex = 1.6e-11, Ms = 1.1e6
    VectorField m(mesh);
    m[0] = kZAxis;
    m[1] = kXAxis;
    VectorField b = exchange_field(m, p);
    const double pref = 2.0 * p.Aex / (p.Ms * 1e-18);  // ~29.09 T
    CHECK(pref == doctest::Approx(29.09).epsilon(1e-3));
    CHECK(b[1].x == doctest::Approx(-pref));
    CHECK(b[1].z == doctest::Approx(pref));
    CHECK(b[0].x == doctest::Approx(pref));
    CHECK(b[0].z == doctest::Approx(-pref));
}

TEST_CASE("exchange field is the exact gradient of the exchange energy") {
    Mesh mesh(4, 4, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;
    check_field_is_energy_gradient(
        mesh, 3, p.Ms, [&](const VectorField& m) { return exchange_field(m, p); },
        [&](const VectorField& m) { return exchange_energy(m, p); }, 1e-4);
}

TEST_CASE("uniform out-of-plane magnetization has zero interior DMI field") {
    Mesh mesh(6, 6, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;
    VectorField m(mesh, kZAxis);
    VectorField b = dmi_field(m, p);
    // interior cells only; edge cells carry the chiral boundary contribution
    for (int iy = 2; iy < 4; ++iy)
        for (int ix = 2; ix < 4; ++ix) {
            const Vec3& v = b[mesh.index(ix, iy)];
            CHECK(std::abs(v.x) < 1e-12);
            CHECK(std::abs(v.y) < 1e-12);
            CHECK(std::abs(v.z) < 1e-12);
        }
}

TEST_CASE("DMI field is the exact gradient of the DMI energy") {
    Mesh mesh(4, 4, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;
    check_field_is_energy_gradient(
        mesh, 3, p.Ms, [&](const VectorField& m) { return dmi_field(m, p); },
        [&](const VectorField& m) { return dmi_energy(m, p); }, 1e-4);
}

TEST_CASE("DMI interior field matches the continuum stencil") {
    // smooth test texture: m rotates in the xz plane with position
    Mesh mesh(9, 9, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;
    VectorField m(mesh);
    const double q = 2.0 * M_PI / (18e-9);
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double x = mesh.ix_of(i) * mesh.dx;
        m[i] = Vec3{std::sin(q * x), 0.0, std::cos(q * x)};
    }
    VectorField b = dmi_field(m, p);
    const double pref = 2.0 * p.D / p.Ms;
    const std::size_t c = mesh.index(4, 4);
    // B_x = (2D/Ms) d(m_z)/dx with the same central difference
    const double dmz = (m[c + 1].z - m[c - 1].z) / (2.0 * mesh.dx);
    const double dmx = (m[c + 1].x - m[c - 1].x) / (2.0 * mesh.dx);
    CHECK(b[c].x == doctest::Approx(pref * dmz).epsilon(1e-9));
    CHECK(b[c].z == doctest::Approx(-pref * dmx).epsilon(1e-9));
    CHECK(b[c].y == doctest::Approx(0.0));
}

TEST_CASE("anisotropy field arithmetic oracles") {
    Mesh mesh(3, 3, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;
    ScalarField k(mesh, 8e5);
    VectorField up(mesh, kZAxis);
    CHECK(anisotropy_field(up, k, p)[4].z == doctest::Approx(2.0 * 8e5 / 1.1e6));
    CHECK(anisotropy_field(up, k, p)[4].z == doctest::Approx(1.4545).epsilon(1e-4));

    VectorField in_plane(mesh, kXAxis);
    CHECK(anisotropy_field(in_plane, k, p)[4].norm() == doctest::Approx(0.0));

    VectorField down(mesh, -kZAxis);
    CHECK(anisotropy_field(down, k, p)[4].z == doctest::Approx(-1.4545).epsilon(1e-4));
}

TEST_CASE("anisotropy field is the exact gradient of the anisotropy energy") {
    Mesh mesh(4, 4, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;
    ScalarField k(mesh);
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = 8e5 * (1.0 + 0.1 * mesh.ix_of(i));
    check_field_is_energy_gradient(
        mesh, 3, p.Ms, [&](const VectorField& m) { return anisotropy_field(m, k, p); },
        [&](const VectorField& m) { return anisotropy_energy(m, k, p); }, 1e-4);
}

TEST_CASE("energy oracles for uniform states") {
    Mesh mesh(20, 20, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;
    ScalarField k(mesh, 8e5);
    VectorField up(mesh, kZAxis);
    CHECK(exchange_energy(up, p) == doctest::Approx(0.0));
    CHECK(anisotropy_energy(up, k, p) == doctest::Approx(0.0));

    VectorField x(mesh, kXAxis);
    CHECK(anisotropy_energy(x, k, p) == doctest::Approx(8e5 * 400 * 1e-27));  // 3.2e-19 J
}

TEST_CASE("total field is the exact gradient of the total energy") {
    Mesh mesh(4, 4, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;  // full demag on by default
    FieldModel model(mesh, p);
    ScalarField k(mesh, 8e5);
    check_field_is_energy_gradient(
        mesh, 2, p.Ms, [&](const VectorField& m) { return model.total_field(m, k); },
        [&](const VectorField& m) { return model.total_energy(m, k).total; }, 1e-4);
}

TEST_CASE("field_terms sum to the total field") {
    Mesh mesh(5, 5, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;
    FieldModel model(mesh, p);
    ScalarField k(mesh, 8e5);
    const VectorField m = random_unit_field(mesh, 42);
    FieldTerms t = model.field_terms(m, k);
    VectorField total = model.total_field(m, k);
    for (std::size_t i = 0; i < m.size(); ++i) {
        const Vec3 sum = t.exchange[i] + t.dmi[i] + t.anisotropy[i] + t.demag[i];
        CHECK(sum.x == doctest::Approx(t.total[i].x).epsilon(1e-12));
        CHECK(t.total[i].x == doctest::Approx(total[i].x).epsilon(1e-12));
        CHECK(t.total[i].y == doctest::Approx(total[i].y).epsilon(1e-12));
        CHECK(t.total[i].z == doctest::Approx(total[i].z).epsilon(1e-12));
    }
}

TEST_CASE("Newell self-term of a cube is the sphere-like 1/3 split") {
    Mesh mesh(4, 4, 1, 1e-9, 1e-9, 1e-9);
    DemagKernel kern(mesh);
    CHECK(kern.nxx(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(kern.nyy(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(kern.nzz(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(kern.nxy(0, 0) == doctest::Approx(0.0));
    // trace identity holds for every displacement at zero z-offset pairs
    for (int d = 1; d <= 3; ++d)
        CHECK(kern.nxx(d, 0) + kern.nyy(d, 0) + kern.nzz(d, 0) ==
              doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("Newell far cells approach the point-dipole tensor") {
    Mesh mesh(8, 8, 1, 1e-9, 1e-9, 1e-9);
    DemagKernel kern(mesh);
    const double V = 1e-27;
    const double r = 6e-9;
    const double dip = V / (4.0 * M_PI * r * r * r);
    CHECK(kern.nxx(6, 0) == doctest::Approx(-2.0 * dip).epsilon(2e-2));
    CHECK(kern.nyy(6, 0) == doctest::Approx(dip).epsilon(2e-2));
    CHECK(kern.nzz(6, 0) == doctest::Approx(dip).epsilon(2e-2));
}

TEST_CASE("Newell tensor symmetries") {
    Mesh mesh(6, 6, 1, 1e-9, 1e-9, 1e-9);
    DemagKernel kern(mesh);
    CHECK(kern.nxx(3, 1) == doctest::Approx(kern.nxx(-3, 1)).epsilon(1e-12));
    CHECK(kern.nxx(3, 1) == doctest::Approx(kern.nxx(3, -1)).epsilon(1e-12));
    CHECK(kern.nxy(2, 1) == doctest::Approx(-kern.nxy(-2, 1)).epsilon(1e-12));
    CHECK(kern.nxy(2, 1) == doctest::Approx(-kern.nxy(2, -1)).epsilon(1e-12));
    // Nxy is the same under x<->y swap of the displacement
    CHECK(kern.nxy(2, 1) == doctest::Approx(kern.nxy(1, 2)).epsilon(1e-10));
}

TEST_CASE("demag convolution matches a brute-force tensor sum") {
    Mesh mesh(5, 4, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;
    DemagKernel kern(mesh);
    const VectorField m = random_unit_field(mesh, 9);
    const VectorField b = kern.field(m, p.Ms);
    for (std::size_t i = 0; i < m.size(); ++i) {
        Vec3 h{0, 0, 0};
        for (std::size_t j = 0; j < m.size(); ++j) {
            const int dx = mesh.ix_of(i) - mesh.ix_of(j);
            const int dy = mesh.iy_of(i) - mesh.iy_of(j);
            h.x += kern.nxx(dx, dy) * m[j].x + kern.nxy(dx, dy) * m[j].y;
            h.y += kern.nxy(dx, dy) * m[j].x + kern.nyy(dx, dy) * m[j].y;
            h.z += kern.nzz(dx, dy) * m[j].z;
        }
        const Vec3 expect = h * (-constants::mu0 * p.Ms);
        CHECK(b[i].x == doctest::Approx(expect.x).epsilon(1e-10));
        CHECK(b[i].y == doctest::Approx(expect.y).epsilon(1e-10));
        CHECK(b[i].z == doctest::Approx(expect.z).epsilon(1e-10));
    }
}

TEST_CASE("demag field is the exact gradient of the demag energy") {
    Mesh mesh(4, 4, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;
    DemagKernel kern(mesh);
    check_field_is_energy_gradient(
        mesh, 2, p.Ms, [&](const VectorField& m) { return kern.field(m, p.Ms); },
        [&](const VectorField& m) { return kern.energy(m, p.Ms); }, 1e-4);
}

TEST_CASE("thin-film mode applies only the out-of-plane penalty") {
    Mesh mesh(4, 4, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;
    p.demag = DemagMode::ThinFilm;
    FieldModel model(mesh, p);
    ScalarField k(mesh, 0.0);
    p.D = 0.0;
    VectorField up(mesh, kZAxis);
    FieldTerms t = model.field_terms(up, k);
    for (std::size_t i = 0; i < up.size(); ++i) {
        CHECK(t.demag[i].z == doctest::Approx(-constants::mu0 * p.Ms));
        CHECK(t.demag[i].x == doctest::Approx(0.0));
    }
}

TEST_CASE("demag off leaves no magnetostatic term") {
    Mesh mesh(4, 4, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;
    p.demag = DemagMode::None;
    FieldModel model(mesh, p);
    ScalarField k(mesh, 8e5);
    VectorField up(mesh, kZAxis);
    FieldTerms t = model.field_terms(up, k);
    for (std::size_t i = 0; i < up.size(); ++i) CHECK(t.demag[i].norm() == 0.0);
    CHECK(model.total_energy(up, k).demag == 0.0);
}
