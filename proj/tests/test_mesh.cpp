#include <doctest.h>

#include <cmath>
#include <random>

#include "chiralmm/mesh.hpp"

using namespace chiralmm;

TEST_CASE("indexing is row-major with x fastest") {
    Mesh mesh(4, 3, 1, 1e-9, 1e-9, 1e-9);
    CHECK(mesh.cell_count() == 12);
    CHECK(mesh.index(0, 0) == 0);
    CHECK(mesh.index(1, 0) == 1);
    CHECK(mesh.index(0, 1) == 4);
    for (std::size_t i = 0; i < mesh.cell_count(); ++i) {
        CHECK(mesh.index(mesh.ix_of(i), mesh.iy_of(i), mesh.iz_of(i)) == i);
    }
}

TEST_CASE("mesh validation rejects bad dimensions") {
    CHECK_THROWS_AS(Mesh(0, 3, 1, 1e-9, 1e-9, 1e-9), std::invalid_argument);
    CHECK_THROWS_AS(Mesh(3, 3, 2, 1e-9, 1e-9, 1e-9), std::invalid_argument);
    CHECK_THROWS_AS(Mesh(3, 3, 1, -1e-9, 1e-9, 1e-9), std::invalid_argument);
}

TEST_CASE("neighbor counts on a 3x3 plane") {
    Mesh mesh(3, 3, 1, 1e-9, 1e-9, 1e-9);
    CHECK(neighbors(mesh, mesh.index(1, 1)).size() == 4);  // interior
    CHECK(neighbors(mesh, mesh.index(0, 0)).size() == 2);  // corner
    CHECK(neighbors(mesh, mesh.index(1, 0)).size() == 3);  // edge
}

TEST_CASE("degenerate 1x1 mesh has no neighbors") {
    Mesh mesh(1, 1, 1, 1e-9, 1e-9, 1e-9);
    CHECK(neighbors(mesh, 0).empty());
}

TEST_CASE("neighbor links are symmetric and in bounds") {
    Mesh mesh(4, 3, 1, 1e-9, 1e-9, 1e-9);
    for (std::size_t i = 0; i < mesh.cell_count(); ++i) {
        for (const Neighbor& nb : neighbors(mesh, i)) {
            CHECK(nb.index < mesh.cell_count());
            bool back = false;
            for (const Neighbor& nb2 : neighbors(mesh, nb.index))
                if (nb2.index == i) back = true;
            CHECK(back);
        }
    }
}

TEST_CASE("mean_vector trivial cases") {
    Mesh mesh(4, 4, 1, 1e-9, 1e-9, 1e-9);
    VectorField up(mesh, Vec3{0, 0, 1});
    Vec3 m = mean_vector(up);
    CHECK(m.x == doctest::Approx(0.0));
    CHECK(m.z == doctest::Approx(1.0));

    VectorField half(mesh, Vec3{0, 0, 1});
    for (std::size_t i = 0; i < half.size() / 2; ++i) half[i].z = -1.0;
    Vec3 h = mean_vector(half);
    CHECK(h.z == doctest::Approx(0.0));
}

TEST_CASE("mean_vector matches a direct summation oracle on a random field") {
    Mesh mesh(4, 4, 1, 1e-9, 1e-9, 1e-9);
    VectorField f(mesh);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vec3 sum{0, 0, 0};
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = Vec3{dist(rng), dist(rng), dist(rng)};
        sum += f[i];
    }
    const Vec3 expect = sum * (1.0 / static_cast<double>(f.size()));
    const Vec3 got = mean_vector(f);
    CHECK(got.x == doctest::Approx(expect.x).epsilon(1e-12));
    CHECK(got.y == doctest::Approx(expect.y).epsilon(1e-12));
    CHECK(got.z == doctest::Approx(expect.z).epsilon(1e-12));
}

TEST_CASE("masked mean ignores cells outside the mask") {
    Mesh mesh(4, 4, 1, 1e-9, 1e-9, 1e-9);
    VectorField f(mesh, Vec3{0, 0, -1});
    RegionMask box = RegionMask::box(mesh, 1, 2, 1, 2);
    CHECK(box.count() == 4);
    for (std::size_t i = 0; i < f.size(); ++i)
        if (box.contains(i)) f[i] = Vec3{0, 0, 1};
    CHECK(mean_vector(f, box).z == doctest::Approx(1.0));
    CHECK(mean_vector(f, RegionMask::all(mesh)).z == doctest::Approx(-0.5));
}

TEST_CASE("normalize and unit-norm checks") {
    Mesh mesh(2, 2, 1, 1e-9, 1e-9, 1e-9);
    VectorField f(mesh, Vec3{3, 0, 4});
    CHECK_FALSE(is_unit_norm(f));
    normalize(f);
    CHECK(is_unit_norm(f));
    CHECK(f[0].x == doctest::Approx(0.6));
    CHECK(f[0].z == doctest::Approx(0.8));
    CHECK_THROWS(require_unit_norm(VectorField(mesh, Vec3{0, 0, 2})));
}
