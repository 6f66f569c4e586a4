#include "chiralmm/effective_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef CHIRALMM_HAVE_FFTW
#include <fftw3.h>

#include <complex>
#include <mutex>
#endif

namespace chiralmm {

namespace {

double axis_step(const Mesh& mesh, Axis a) {
    switch (a) {
        case Axis::X: return mesh.dx;
        case Axis::Y: return mesh.dy;
        default: return mesh.dz;
    }
}

/// First-difference operator along an axis: central inside, one-sided at
/// the edges, zero when the axis has a single cell. Writes into out.
void apply_diff_into(const Mesh& mesh, Axis a, const double* f, double* out) {
    const double delta = axis_step(mesh, a);
    const int n = (a == Axis::X) ? mesh.nx : (a == Axis::Y) ? mesh.ny : mesh.nz;
    const std::size_t total = mesh.cell_count();
    if (n < 2) {
        std::fill(out, out + total, 0.0);
        return;
    }
    const std::size_t stride = (a == Axis::X)   ? 1
                               : (a == Axis::Y) ? static_cast<std::size_t>(mesh.nx)
                                                : static_cast<std::size_t>(mesh.nx) * mesh.ny;
    // lines: contiguous index runs orthogonal to the axis
    const std::size_t lines = total / n;
    const double h1 = 1.0 / delta, h2 = 0.5 / delta;
    for (std::size_t line = 0; line < lines; ++line) {
        // for Axis::X lines are rows (base = line*nx, stride 1);
        // for Axis::Y each x-column of a z-slab is a line (base = ix, stride nx)
        const std::size_t base = (a == Axis::X) ? line * static_cast<std::size_t>(n) : line;
        const double* fb = f + base;
        double* ob = out + base;
        ob[0] = (fb[stride] - fb[0]) * h1;
        for (int p = 1; p < n - 1; ++p)
            ob[p * stride] = (fb[(p + 1) * stride] - fb[(p - 1) * stride]) * h2;
        ob[static_cast<std::size_t>(n - 1) * stride] =
            (fb[static_cast<std::size_t>(n - 1) * stride] - fb[static_cast<std::size_t>(n - 2) * stride]) * h1;
    }
}

/// Transpose of apply_diff_into: (D^T a)_k = sum_i D_ik a_i. Writes into out.
void apply_diff_adjoint_into(const Mesh& mesh, Axis a, const double* f, double* out) {
    const double delta = axis_step(mesh, a);
    const int n = (a == Axis::X) ? mesh.nx : (a == Axis::Y) ? mesh.ny : mesh.nz;
    const std::size_t total = mesh.cell_count();
    std::fill(out, out + total, 0.0);
    if (n < 2) return;
    const std::size_t stride = (a == Axis::X)   ? 1
                               : (a == Axis::Y) ? static_cast<std::size_t>(mesh.nx)
                                                : static_cast<std::size_t>(mesh.nx) * mesh.ny;
    const std::size_t lines = total / n;
    const double h1 = 1.0 / delta, h2 = 0.5 / delta;
    for (std::size_t line = 0; line < lines; ++line) {
        const std::size_t base = (a == Axis::X) ? line * static_cast<std::size_t>(n) : line;
        const double* fb = f + base;
        double* ob = out + base;
        ob[stride] += fb[0] * h1;
        ob[0] -= fb[0] * h1;
        for (int p = 1; p < n - 1; ++p) {
            ob[(p + 1) * stride] += fb[p * stride] * h2;
            ob[(p - 1) * stride] -= fb[p * stride] * h2;
        }
        const std::size_t last = static_cast<std::size_t>(n - 1) * stride;
        ob[last] += fb[last] * h1;
        ob[last - stride] -= fb[last] * h1;
    }
}

/// Per-thread scratch for the field kernels; avoids per-call allocation on
/// the integrator hot path.
struct Scratch {
    std::vector<double> mx, my, mz, a, b, c, d;
    void resize(std::size_t n) {
        mx.resize(n);
        my.resize(n);
        mz.resize(n);
        a.resize(n);
        b.resize(n);
        c.resize(n);
        d.resize(n);
    }
};

Scratch& scratch() {
    thread_local Scratch s;
    return s;
}

void split_components(const VectorField& m, Scratch& s) {
    s.resize(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        s.mx[i] = m[i].x;
        s.my[i] = m[i].y;
        s.mz[i] = m[i].z;
    }
}

/// Accumulates the exchange field (pref * discrete Laplacian of m) into out.
void accumulate_exchange(const VectorField& m, const MaterialParams& p, VectorField& out) {
    const Mesh& mesh = m.mesh;
    const double pref = 2.0 * p.Aex / p.Ms;
    const double cx = pref / (mesh.dx * mesh.dx);
    const double cy = pref / (mesh.dy * mesh.dy);
    const int nx = mesh.nx, ny = mesh.ny;
    for (int iy = 0; iy < ny; ++iy) {
        const std::size_t row = static_cast<std::size_t>(iy) * nx;
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t i = row + ix;
            Vec3 acc{0.0, 0.0, 0.0};
            if (ix > 0) acc += (m[i - 1] - m[i]) * cx;
            if (ix < nx - 1) acc += (m[i + 1] - m[i]) * cx;
            if (iy > 0) acc += (m[i - nx] - m[i]) * cy;
            if (iy < ny - 1) acc += (m[i + nx] - m[i]) * cy;
            out[i] += acc;
        }
    }
}

/// Accumulates the interfacial DMI field into out (no-op when D = 0).
void accumulate_dmi(const VectorField& m, const MaterialParams& p, VectorField& out) {
    if (p.D == 0.0) return;
    const Mesh& mesh = m.mesh;
    Scratch& s = scratch();
    split_components(m, s);
    const double pref = p.D / p.Ms;
    const std::size_t n = m.size();

    apply_diff_into(mesh, Axis::X, s.mz.data(), s.a.data());           // Dx mz
    apply_diff_adjoint_into(mesh, Axis::X, s.mz.data(), s.b.data());   // DxT mz
    for (std::size_t i = 0; i < n; ++i) out[i].x += pref * (s.a[i] - s.b[i]);

    apply_diff_into(mesh, Axis::Y, s.mz.data(), s.a.data());           // Dy mz
    apply_diff_adjoint_into(mesh, Axis::Y, s.mz.data(), s.b.data());   // DyT mz
    for (std::size_t i = 0; i < n; ++i) out[i].y += pref * (s.a[i] - s.b[i]);

    apply_diff_into(mesh, Axis::X, s.mx.data(), s.a.data());           // Dx mx
    apply_diff_adjoint_into(mesh, Axis::X, s.mx.data(), s.b.data());   // DxT mx
    apply_diff_into(mesh, Axis::Y, s.my.data(), s.c.data());           // Dy my
    apply_diff_adjoint_into(mesh, Axis::Y, s.my.data(), s.d.data());   // DyT my
    for (std::size_t i = 0; i < n; ++i) out[i].z += pref * (s.b[i] + s.d[i] - s.a[i] - s.c[i]);
}

}  // namespace

VectorField exchange_field(const VectorField& m, const MaterialParams& p) {
    VectorField out(m.mesh);
    accumulate_exchange(m, p, out);
    return out;
}

double exchange_energy(const VectorField& m, const MaterialParams& p) {
    const Mesh& mesh = m.mesh;
    const double vol = mesh.cell_volume();
    const double inv2[3] = {1.0 / (mesh.dx * mesh.dx), 1.0 / (mesh.dy * mesh.dy), 1.0 / (mesh.dz * mesh.dz)};
    double e = 0.0;
    // each unordered pair counted once: only +1-direction links
    const int nx = mesh.nx, ny = mesh.ny;
    for (int iy = 0; iy < ny; ++iy) {
        const std::size_t row = static_cast<std::size_t>(iy) * nx;
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t i = row + ix;
            if (ix < nx - 1) {
                const Vec3 d = m[i] - m[i + 1];
                e += d.dot(d) * inv2[0];
            }
            if (iy < ny - 1) {
                const Vec3 d = m[i] - m[i + nx];
                e += d.dot(d) * inv2[1];
            }
        }
    }
    return p.Aex * vol * e;
}

VectorField dmi_field(const VectorField& m, const MaterialParams& p) {
    VectorField out(m.mesh);
    accumulate_dmi(m, p, out);
    return out;
}

double dmi_energy(const VectorField& m, const MaterialParams& p) {
    if (p.D == 0.0) return 0.0;
    const Mesh& mesh = m.mesh;
    Scratch& s = scratch();
    split_components(m, s);

    apply_diff_into(mesh, Axis::X, s.mx.data(), s.a.data());  // Dx mx
    apply_diff_into(mesh, Axis::Y, s.my.data(), s.b.data());  // Dy my
    apply_diff_into(mesh, Axis::X, s.mz.data(), s.c.data());  // Dx mz
    apply_diff_into(mesh, Axis::Y, s.mz.data(), s.d.data());  // Dy mz

    double e = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        e += s.mz[i] * (s.a[i] + s.b[i]) - s.mx[i] * s.c[i] - s.my[i] * s.d[i];
    return p.D * mesh.cell_volume() * e;
}

VectorField anisotropy_field(const VectorField& m, const ScalarField& k, const MaterialParams& p) {
    if (!(m.mesh == k.mesh)) throw std::invalid_argument("anisotropy_field: mesh mismatch");
    VectorField out(m.mesh);
    const Vec3 u = p.easy_axis;
    for (std::size_t i = 0; i < m.size(); ++i)
        out[i] = u * (2.0 * k[i] / p.Ms * m[i].dot(u));
    return out;
}

double anisotropy_energy(const VectorField& m, const ScalarField& k, const MaterialParams& p) {
    if (!(m.mesh == k.mesh)) throw std::invalid_argument("anisotropy_energy: mesh mismatch");
    const double vol = m.mesh.cell_volume();
    const Vec3 u = p.easy_axis;
    double e = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double proj = m[i].dot(u);
        e += k[i] * (1.0 - proj * proj);
    }
    return e * vol;
}

// ---------------------------------------------------------------------------
// Newell cell-averaged demag tensor (rectangular prisms).

namespace {

double newell_f(double x, double y, double z) {
    x = std::abs(x);
    y = std::abs(y);
    z = std::abs(z);
    const double x2 = x * x, y2 = y * y, z2 = z * z;
    const double r = std::sqrt(x2 + y2 + z2);
    double f = (1.0 / 6.0) * (2.0 * x2 - y2 - z2) * r;
    if (x2 + z2 > 0.0) f += 0.5 * y * (z2 - x2) * std::asinh(y / std::sqrt(x2 + z2));
    if (x2 + y2 > 0.0) f += 0.5 * z * (y2 - x2) * std::asinh(z / std::sqrt(x2 + y2));
    if (x > 0.0 && y > 0.0 && z > 0.0) f -= x * y * z * std::atan(y * z / (x * r));
    return f;
}

double newell_g(double x, double y, double z) {
    z = std::abs(z);  // g is even in z, odd in x and y (kept via signs below)
    const double x2 = x * x, y2 = y * y, z2 = z * z;
    const double r = std::sqrt(x2 + y2 + z2);
    double g = -(1.0 / 3.0) * x * y * r;
    if (x2 + y2 > 0.0) g += x * y * z * std::asinh(z / std::sqrt(x2 + y2));
    if (y2 + z2 > 0.0) g += (y / 6.0) * (3.0 * z2 - y2) * std::asinh(x / std::sqrt(y2 + z2));
    if (x2 + z2 > 0.0) g += (x / 6.0) * (3.0 * z2 - x2) * std::asinh(y / std::sqrt(x2 + z2));
    if (z > 0.0 && r > 0.0) g -= (z2 * z / 6.0) * std::atan(x * y / (z * r));
    if (y != 0.0 && r > 0.0) g -= (z * y2 / 2.0) * std::atan(x * z / (y * r));
    if (x != 0.0 && r > 0.0) g -= (z * x2 / 2.0) * std::atan(y * z / (x * r));
    return g;
}

// second-difference weights (1, -2, 1) applied along each axis
template <typename F>
double newell_sum(F&& base, double X, double Y, double Z, double dx, double dy, double dz) {
    static const double w[3] = {1.0, -2.0, 1.0};
    double s = 0.0;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            for (int k = -1; k <= 1; ++k)
                s += w[i + 1] * w[j + 1] * w[k + 1] * base(X + i * dx, Y + j * dy, Z + k * dz);
    return -s / (4.0 * M_PI * dx * dy * dz);
}

}  // namespace

std::size_t DemagKernel::table_index(int dix, int diy) const {
    const int w = 2 * mesh_.nx - 1;
    return static_cast<std::size_t>(dix + mesh_.nx - 1) + static_cast<std::size_t>(w) * (diy + mesh_.ny - 1);
}

#ifdef CHIRALMM_HAVE_FFTW

namespace {

/// fftw_malloc-backed scratch so new-array plan execution sees the same
/// (SIMD) alignment the plans were created with.
template <typename T>
struct FftwBuffer {
    T* p = nullptr;
    std::size_t cap = 0;
    ~FftwBuffer() { fftw_free(p); }
    T* ensure(std::size_t n) {
        if (n > cap) {
            fftw_free(p);
            p = static_cast<T*>(fftw_malloc(n * sizeof(T)));
            cap = n;
        }
        return p;
    }
};

}  // namespace

/// Zero-padded (2nx x 2ny) kernel spectra plus the shared FFTW plans. The
/// spectra are purely real: each tensor table is even (nxx, nyy, nzz) or
/// odd-odd (nxy) under displacement reversal. Plans are created with
/// FFTW_ESTIMATE (deterministic, no runtime tuning) on fftw_malloc-aligned
/// buffers; plan creation/destruction is serialized because the FFTW
/// planner is not thread-safe.
struct DemagKernel::Spectra {
    int px = 0, py = 0;   // padded real dims, x fastest
    std::size_t nc = 0;   // complex row length px/2 + 1
    std::vector<double> kxx, kyy, kzz, kxy;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }

    ~Spectra() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
    }
};

void DemagKernel::accumulate_field_fft(const VectorField& m, double Ms, VectorField& out) const {
    const Spectra& sp = *fft_;
    const int nx = mesh_.nx, ny = mesh_.ny;
    const std::size_t nreal = static_cast<std::size_t>(sp.px) * sp.py;
    const std::size_t ncplx = static_cast<std::size_t>(sp.py) * sp.nc;

    thread_local FftwBuffer<double> fbuf_s, rbuf_s;
    thread_local FftwBuffer<std::complex<double>> cx_s, cy_s, cz_s, hc_s;
    thread_local int fbuf_px = 0, fbuf_py = 0, fbuf_nx = 0;
    double* fbuf = fbuf_s.ensure(nreal);
    double* rbuf = rbuf_s.ensure(nreal);
    std::complex<double>* cx = cx_s.ensure(ncplx);
    std::complex<double>* cy = cy_s.ensure(ncplx);
    std::complex<double>* cz = cz_s.ensure(ncplx);
    std::complex<double>* hc = hc_s.ensure(ncplx);
    // the forward scratch is only ever written in the top-left (ny, nx)
    // block, so it stays zero elsewhere across calls for a fixed geometry
    if (fbuf_px != sp.px || fbuf_py != sp.py || fbuf_nx != nx) {
        std::fill(fbuf, fbuf + nreal, 0.0);
        fbuf_px = sp.px;
        fbuf_py = sp.py;
        fbuf_nx = nx;
    }

    auto forward = [&](auto getter, std::complex<double>* dst) {
        for (int iy = 0; iy < ny; ++iy) {
            double* row = fbuf + static_cast<std::size_t>(iy) * sp.px;
            const Vec3* src = m.data.data() + static_cast<std::size_t>(iy) * nx;
            for (int ix = 0; ix < nx; ++ix) row[ix] = getter(src[ix]);
        }
        fftw_execute_dft_r2c(sp.fwd, fbuf, reinterpret_cast<fftw_complex*>(dst));
    };
    forward([](const Vec3& v) { return v.x; }, cx);
    forward([](const Vec3& v) { return v.y; }, cy);
    forward([](const Vec3& v) { return v.z; }, cz);

    const double pref = -constants::mu0 * Ms;
    auto inverse_accumulate = [&](double Vec3::* comp) {
        fftw_execute_dft_c2r(sp.bwd, reinterpret_cast<fftw_complex*>(hc), rbuf);
        for (int iy = 0; iy < ny; ++iy) {
            const double* row = rbuf + static_cast<std::size_t>(iy) * sp.px;
            Vec3* dst = out.data.data() + static_cast<std::size_t>(iy) * nx;
            for (int ix = 0; ix < nx; ++ix) dst[ix].*comp += pref * row[ix];
        }
    };
    for (std::size_t i = 0; i < ncplx; ++i) hc[i] = sp.kxx[i] * cx[i] + sp.kxy[i] * cy[i];
    inverse_accumulate(&Vec3::x);
    for (std::size_t i = 0; i < ncplx; ++i) hc[i] = sp.kxy[i] * cx[i] + sp.kyy[i] * cy[i];
    inverse_accumulate(&Vec3::y);
    for (std::size_t i = 0; i < ncplx; ++i) hc[i] = sp.kzz[i] * cz[i];
    inverse_accumulate(&Vec3::z);
}

#else

struct DemagKernel::Spectra {};

void DemagKernel::accumulate_field_fft(const VectorField&, double, VectorField&) const {}

#endif  // CHIRALMM_HAVE_FFTW

DemagKernel::DemagKernel(const Mesh& mesh) : mesh_(mesh) {
    const int nx = mesh.nx, ny = mesh.ny;
    const std::size_t table = static_cast<std::size_t>(2 * nx - 1) * (2 * ny - 1);
    nxx_.resize(table);
    nyy_.resize(table);
    nzz_.resize(table);
    nxy_.resize(table);
    const double dx = mesh.dx, dy = mesh.dy, dz = mesh.dz;
    for (int diy = -(ny - 1); diy <= ny - 1; ++diy) {
        for (int dix = -(nx - 1); dix <= nx - 1; ++dix) {
            const double X = dix * dx, Y = diy * dy, Z = 0.0;
            const std::size_t t = table_index(dix, diy);
            nxx_[t] = newell_sum(newell_f, X, Y, Z, dx, dy, dz);
            nyy_[t] = newell_sum([](double a, double b, double c) { return newell_f(b, a, c); }, X, Y, Z, dx, dy, dz);
            nzz_[t] = newell_sum([](double a, double b, double c) { return newell_f(c, b, a); }, X, Y, Z, dx, dy, dz);
            nxy_[t] = newell_sum(newell_g, X, Y, Z, dx, dy, dz);
        }
    }

#ifdef CHIRALMM_HAVE_FFTW
    // circular layout: displacement d lands at d mod P with P = 2n >= 2n-1,
    // so the padded circular convolution reproduces the linear one exactly
    auto sp = std::make_shared<Spectra>();
    sp->px = 2 * nx;
    sp->py = 2 * ny;
    sp->nc = static_cast<std::size_t>(sp->px / 2 + 1);
    const std::size_t nreal = static_cast<std::size_t>(sp->px) * sp->py;
    const std::size_t ncplx = static_cast<std::size_t>(sp->py) * sp->nc;
    FftwBuffer<double> rbuf_s;
    FftwBuffer<std::complex<double>> cbuf_s;
    double* rbuf = rbuf_s.ensure(nreal);
    std::complex<double>* cbuf = cbuf_s.ensure(ncplx);
    {
        std::lock_guard<std::mutex> lock(Spectra::planner_mutex());
        sp->fwd = fftw_plan_dft_r2c_2d(sp->py, sp->px, rbuf,
                                       reinterpret_cast<fftw_complex*>(cbuf), FFTW_ESTIMATE);
        sp->bwd = fftw_plan_dft_c2r_2d(sp->py, sp->px, reinterpret_cast<fftw_complex*>(cbuf),
                                       rbuf, FFTW_ESTIMATE);
    }
    auto spectrum = [&](const std::vector<double>& tab) {
        std::fill(rbuf, rbuf + nreal, 0.0);
        for (int diy = -(ny - 1); diy <= ny - 1; ++diy)
            for (int dix = -(nx - 1); dix <= nx - 1; ++dix) {
                const int wx = (dix + sp->px) % sp->px;
                const int wy = (diy + sp->py) % sp->py;
                rbuf[static_cast<std::size_t>(wy) * sp->px + wx] = tab[table_index(dix, diy)];
            }
        fftw_execute_dft_r2c(sp->fwd, rbuf, reinterpret_cast<fftw_complex*>(cbuf));
        // the spectrum is real by symmetry; fold the inverse-transform
        // normalization in while dropping the rounding-level imaginary part
        const double scale = 1.0 / static_cast<double>(nreal);
        std::vector<double> out(ncplx);
        for (std::size_t i = 0; i < ncplx; ++i) out[i] = cbuf[i].real() * scale;
        return out;
    };
    sp->kxx = spectrum(nxx_);
    sp->kyy = spectrum(nyy_);
    sp->kzz = spectrum(nzz_);
    sp->kxy = spectrum(nxy_);
    fft_ = std::move(sp);
#endif
}

void DemagKernel::accumulate_field(const VectorField& m, double Ms, VectorField& out) const {
    if (fft_) {
        accumulate_field_fft(m, Ms, out);
        return;
    }
    const int nx = mesh_.nx, ny = mesh_.ny;
    const std::size_t n = m.size();
    const double pref = -constants::mu0 * Ms;

    // scatter to per-component arrays so the displacement loop below is a
    // stride-1 fused multiply-add over both kernel row and source row
    thread_local std::vector<double> mx, my, mz, hx, hy, hz;
    mx.resize(n);
    my.resize(n);
    mz.resize(n);
    hx.assign(n, 0.0);
    hy.assign(n, 0.0);
    hz.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        mx[i] = m[i].x;
        my[i] = m[i].y;
        mz[i] = m[i].z;
    }

    const int wrow = 2 * nx - 1;
    for (int iy = 0; iy < ny; ++iy) {
        double* hxr = hx.data() + static_cast<std::size_t>(iy) * nx;
        double* hyr = hy.data() + static_cast<std::size_t>(iy) * nx;
        double* hzr = hz.data() + static_cast<std::size_t>(iy) * nx;
        for (int jy = 0; jy < ny; ++jy) {
            const std::size_t rb = static_cast<std::size_t>(wrow) * (iy - jy + ny - 1) + (nx - 1);
            const double* kxx = nxx_.data() + rb;
            const double* kyy = nyy_.data() + rb;
            const double* kzz = nzz_.data() + rb;
            const double* kxy = nxy_.data() + rb;
            const double* mxr = mx.data() + static_cast<std::size_t>(jy) * nx;
            const double* myr = my.data() + static_cast<std::size_t>(jy) * nx;
            const double* mzr = mz.data() + static_cast<std::size_t>(jy) * nx;
            for (int d = -(nx - 1); d <= nx - 1; ++d) {
                const double axx = kxx[d], ayy = kyy[d], azz = kzz[d], axy = kxy[d];
                const int i0 = std::max(0, d), i1 = std::min(nx, nx + d);
                const double* sx = mxr - d;
                const double* sy = myr - d;
                const double* sz = mzr - d;
                for (int ix = i0; ix < i1; ++ix) {
                    hxr[ix] += axx * sx[ix] + axy * sy[ix];
                    hyr[ix] += axy * sx[ix] + ayy * sy[ix];
                    hzr[ix] += azz * sz[ix];
                }
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        out[i].x += pref * hx[i];
        out[i].y += pref * hy[i];
        out[i].z += pref * hz[i];
    }
}

VectorField DemagKernel::field(const VectorField& m, double Ms) const {
    VectorField out(m.mesh);
    accumulate_field(m, Ms, out);
    return out;
}

double DemagKernel::energy(const VectorField& m, double Ms) const {
    // E = -(Ms V / 2) sum_i m_i . B_i  with B the kernel field (symmetric kernel)
    const VectorField b = field(m, Ms);
    double e = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) e += m[i].dot(b[i]);
    return -0.5 * Ms * m.mesh.cell_volume() * e;
}

// ---------------------------------------------------------------------------

FieldModel::FieldModel(const Mesh& mesh, const MaterialParams& p) : mesh_(mesh), params_(p) {
    mesh.validate();
    p.validate();
    if (p.demag == DemagMode::Full) kernel_ = DemagKernel(mesh);
}

FieldTerms FieldModel::field_terms(const VectorField& m, const ScalarField& k) const {
    FieldTerms t;
    t.exchange = exchange_field(m, params_);
    t.dmi = dmi_field(m, params_);
    t.anisotropy = anisotropy_field(m, k, params_);
    t.demag = VectorField(mesh_);
    if (params_.demag == DemagMode::ThinFilm) {
        const double pref = -constants::mu0 * params_.Ms;
        for (std::size_t i = 0; i < m.size(); ++i) t.demag[i].z = pref * m[i].z;
    } else if (params_.demag == DemagMode::Full) {
        kernel_.accumulate_field(m, params_.Ms, t.demag);
    }
    t.total = VectorField(mesh_);
    for (std::size_t i = 0; i < m.size(); ++i)
        t.total[i] = t.exchange[i] + t.dmi[i] + t.anisotropy[i] + t.demag[i];
    return t;
}

VectorField FieldModel::total_field(const VectorField& m, const ScalarField& k) const {
    VectorField out(mesh_);
    accumulate_exchange(m, params_, out);
    accumulate_dmi(m, params_, out);
    const Vec3 u = params_.easy_axis;
    const double ka = 2.0 / params_.Ms;
    for (std::size_t i = 0; i < m.size(); ++i)
        out[i] += u * (ka * k[i] * m[i].dot(u));
    if (params_.demag == DemagMode::ThinFilm) {
        const double pref = -constants::mu0 * params_.Ms;
        for (std::size_t i = 0; i < m.size(); ++i) out[i].z += pref * m[i].z;
    } else if (params_.demag == DemagMode::Full) {
        kernel_.accumulate_field(m, params_.Ms, out);
    }
    return out;
}

EnergyTerms FieldModel::total_energy(const VectorField& m, const ScalarField& k) const {
    EnergyTerms e;
    e.exchange = exchange_energy(m, params_);
    e.dmi = dmi_energy(m, params_);
    e.anisotropy = anisotropy_energy(m, k, params_);
    if (params_.demag == DemagMode::ThinFilm) {
        double s = 0.0;
        for (const Vec3& v : m.data) s += v.z * v.z;
        e.demag = 0.5 * constants::mu0 * params_.Ms * params_.Ms * mesh_.cell_volume() * s;
    } else if (params_.demag == DemagMode::Full) {
        e.demag = kernel_.energy(m, params_.Ms);
    }
    e.total = e.exchange + e.dmi + e.anisotropy + e.demag;
    return e;
}

}  // namespace chiralmm
