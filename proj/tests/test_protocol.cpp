#include <doctest.h>

#include <cmath>

#include "chiralmm/protocol.hpp"

using namespace chiralmm;

TEST_CASE("write schedule has the three pinned segments") {
    ProtocolTiming t;
    DriveSchedule s = make_write_schedule(t, +1);
    REQUIRE(s.segments.size() == 3);
    CHECK_NOTHROW(s.validate());

    CHECK(s.segments[0].duration == doctest::Approx(t.t1));
    CHECK(s.segments[0].J == doctest::Approx(t.J));
    CHECK(s.segments[0].Vb == 0.0);

    CHECK(s.segments[1].duration == doctest::Approx(t.t2));
    CHECK(s.segments[1].J == doctest::Approx(t.J));
    CHECK(s.segments[1].Vb == doctest::Approx(t.V));

    CHECK(s.segments[2].duration == doctest::Approx(t.t3));
    CHECK(s.segments[2].J == 0.0);
    CHECK(s.segments[2].Vb == doctest::Approx(t.V));

    DriveSchedule n = make_write_schedule(t, -1);
    CHECK(n.segments[1].Vb == doctest::Approx(-t.V));
    CHECK(n.segments[2].Vb == doctest::Approx(-t.V));
}

namespace {

Trace synthetic_trace(const std::vector<std::pair<double, double>>& t_mz, double J_until) {
    Trace tr;
    for (auto [t, mz] : t_mz) {
        TraceSample s;
        s.t = t;
        s.m_mean = Vec3{0, 0, mz};
        s.J = t <= J_until ? 1.5e12 : 0.0;
        tr.push_back(s);
    }
    return tr;
}

}  // namespace

TEST_CASE("recovery_time of an already-uniform state is within one sample") {
    Trace tr = synthetic_trace({{0.0, 0.95}, {1e-12, 0.95}, {2e-12, 0.96}, {3e-12, 0.97}}, 0.0);
    auto r = recovery_time(tr);
    REQUIRE(r.has_value());
    CHECK(*r <= 1e-12 + 1e-18);
}

TEST_CASE("recovery_time reads a monotone crossing at 1.2 ns") {
    Trace tr;
    const double release = 0.2e-9;
    for (int i = 0; i <= 2000; ++i) {
        const double t = i * 1e-12;
        TraceSample s;
        s.t = t;
        s.J = t <= release ? 1.5e12 : 0.0;
        // crosses 0.9 exactly at release + 1.2 ns
        s.m_mean = Vec3{0, 0, 0.9 * (t - release) / 1.2e-9};
        tr.push_back(s);
    }
    auto r = recovery_time(tr);
    REQUIRE(r.has_value());
    CHECK(*r == doctest::Approx(1.2e-9).epsilon(1e-2));
}

TEST_CASE("recovery_time reports the final crossing when the trace dips back") {
    const double release = 0.0;
    Trace tr = synthetic_trace(
        {
            {0.0, 0.1},
            {0.1e-9, 0.2},
            {0.2e-9, 0.95},  // first crossing
            {0.3e-9, 0.5},   // dips below: "remains" clause violated
            {0.4e-9, 0.92},  // final crossing
            {0.5e-9, 0.95},
            {0.6e-9, 0.99},
        },
        release);
    auto r = recovery_time(tr);
    REQUIRE(r.has_value());
    CHECK(*r == doctest::Approx(0.4e-9));
}

TEST_CASE("recovery_time is empty when the threshold is never held") {
    Trace tr = synthetic_trace({{0.1e-9, 0.2}, {0.2e-9, 0.5}, {0.3e-9, 0.3}}, 0.0);
    CHECK_FALSE(recovery_time(tr).has_value());
}

TEST_CASE("readout maps polarity against the +z reference layer") {
    Mesh mesh(6, 6, 1, 1e-9, 1e-9, 1e-9);
    RegionMask pillar = RegionMask::all(mesh);

    SimState up;
    up.m = VectorField(mesh, kZAxis);
    CHECK(readout(up, pillar) == Readout::P);

    SimState down;
    down.m = VectorField(mesh, -kZAxis);
    CHECK(readout(down, pillar) == Readout::AP);

    SimState half;
    half.m = VectorField(mesh, kZAxis);
    for (std::size_t i = 0; i < half.m.size() / 2; ++i) half.m[i].z = -1.0;
    CHECK_THROWS_AS(readout(half, pillar), IndeterminateReadout);
}

TEST_CASE("run_schedule samples on the requested interval") {
    Mesh mesh(2, 2, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;
    p.demag = DemagMode::None;
    FieldModel model(mesh, p);
    VcmaProfile vcma;
    SimState st;
    st.m = VectorField(mesh, kZAxis);
    st.k_map = ScalarField(mesh, p.Ku0);

    DriveSchedule sched;
    sched.segments = {{10e-12, 0.0, kXAxis, 0.0}};
    Trace tr = run_schedule(st, model, vcma, sched, StepController{}, 1e-12);
    REQUIRE(!tr.empty());
    CHECK(tr.back().t == doctest::Approx(10e-12));
    // samples arrive no sparser than the interval (within one adaptive step)
    for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr[i].t > tr[i - 1].t);
    CHECK(tr.size() >= 10);
}

TEST_CASE("zero-voltage write is flagged non-deterministic") {
    Mesh mesh(6, 6, 1, 1e-9, 1e-9, 1e-9);
    MaterialParams p;
    p.demag = DemagMode::None;  // keep the tiny mesh stable and fast
    FieldModel model(mesh, p);
    VcmaProfile vcma;
    ProtocolTiming t;
    t.t1 = 20e-12;
    t.t2 = 10e-12;
    t.t3 = 20e-12;
    t.V = 0.0;
    SimState st;
    st.m = VectorField(mesh, -kZAxis);
    st.k_map = ScalarField(mesh, p.Ku0);
    WriteResult w = write(st, +1, model, vcma, t, StepController{});
    CHECK_FALSE(w.deterministic);
    CHECK(w.t_release == doctest::Approx(30e-12));
    CHECK(!w.trace.empty());
}
