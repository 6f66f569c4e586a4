#pragma once

#include <memory>
#include <vector>

#include "chiralmm/materials.hpp"
#include "chiralmm/mesh.hpp"

namespace chiralmm {

/// Per-term effective induction, tesla. total = sum of the terms cell-wise.
struct FieldTerms {
    VectorField exchange;
    VectorField dmi;
    VectorField anisotropy;
    VectorField demag;
    VectorField total;
};

struct EnergyTerms {
    double exchange = 0.0;
    double dmi = 0.0;
    double anisotropy = 0.0;
    double demag = 0.0;
    double total = 0.0;
};

/// B_ex(i) = (2*Aex/Ms) * sum_nbr (m_j - m_i)/delta^2, free boundaries.
VectorField exchange_field(const VectorField& m, const MaterialParams& p);
double exchange_energy(const VectorField& m, const MaterialParams& p);

/// Interfacial (Neel) DMI for a z-interface. The field is the exact
/// negative gradient of the discrete energy
///   E = D * V * sum_i [ m_z (Dx m_x + Dy m_y) - m_x Dx m_z - m_y Dy m_z ]
/// with Dx, Dy central differences inside and one-sided at the edges.
/// In the deep interior this reduces to
///   B = (2D/Ms) (d m_z/dx, d m_z/dy, -d m_x/dx - d m_y/dy);
/// near the edges the adjoint stencils carry the chiral boundary tilting.
VectorField dmi_field(const VectorField& m, const MaterialParams& p);
double dmi_energy(const VectorField& m, const MaterialParams& p);

/// B_anis(i) = (2*K(i)/Ms) * (m_i . u) u along the easy axis u.
VectorField anisotropy_field(const VectorField& m, const ScalarField& k,
                             const MaterialParams& p);
double anisotropy_energy(const VectorField& m, const ScalarField& k,
                         const MaterialParams& p);

/// Magnetostatic kernel for DemagMode::Full: Newell cell-averaged tensor,
/// evaluated by direct summation over cell pairs.
class DemagKernel {
public:
    DemagKernel() = default;
    explicit DemagKernel(const Mesh& mesh);

    bool valid() const { return !nxx_.empty(); }

    /// Adds B_demag = -mu0 * Ms * (N (*) m) into out.
    void accumulate_field(const VectorField& m, double Ms, VectorField& out) const;
    VectorField field(const VectorField& m, double Ms) const;
    double energy(const VectorField& m, double Ms) const;

    /// Tensor entry for a cell displacement (in cells).
    double nxx(int dix, int diy) const { return nxx_[table_index(dix, diy)]; }
    double nyy(int dix, int diy) const { return nyy_[table_index(dix, diy)]; }
    double nzz(int dix, int diy) const { return nzz_[table_index(dix, diy)]; }
    double nxy(int dix, int diy) const { return nxy_[table_index(dix, diy)]; }

private:
    std::size_t table_index(int dix, int diy) const;
    void accumulate_field_fft(const VectorField& m, double Ms, VectorField& out) const;

    // Precomputed zero-padded kernel spectra; the convolution runs as three
    // forward and three inverse FFTs per field evaluation when available.
    struct Spectra;

    Mesh mesh_;
    std::vector<double> nxx_, nyy_, nzz_, nxy_;
    std::shared_ptr<const Spectra> fft_;
};

/// Bundles material parameters with the (optional) demag kernel so the
/// dynamics loop assembles B_eff without re-deriving anything per step.
class FieldModel {
public:
    FieldModel(const Mesh& mesh, const MaterialParams& p);

    const Mesh& mesh() const { return mesh_; }
    const MaterialParams& params() const { return params_; }
    const DemagKernel& kernel() const { return kernel_; }

    FieldTerms field_terms(const VectorField& m, const ScalarField& k) const;
    VectorField total_field(const VectorField& m, const ScalarField& k) const;
    EnergyTerms total_energy(const VectorField& m, const ScalarField& k) const;

private:
    Mesh mesh_;
    MaterialParams params_;
    DemagKernel kernel_;  // only populated for DemagMode::Full
};

}  // namespace chiralmm
