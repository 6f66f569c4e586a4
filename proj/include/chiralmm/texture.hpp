#pragma once

#include <string>

#include "chiralmm/mesh.hpp"

namespace chiralmm {

enum class TextureKind { UniformUp, UniformDown, VerticalStripe, CircularStripe, Indeterminate };

std::string to_string(TextureKind k);

struct ClassifierThresholds {
    double uniform_u = 0.9;   // |<m_z>| at or above which the state is uniform
    double skyrmion_q = 0.5;  // |Q| at or above which the texture counts as circular
    int band_margin = 2;      // stripe-axis band count must exceed the other by this
};

struct TextureClass {
    TextureKind kind = TextureKind::Indeterminate;
    double uniformity = 0.0;     // u = |<m_z>|
    double topological_charge = 0.0;
    int bands_x = 0;             // max sign-change count of m_z along x (over rows)
    int bands_y = 0;             // max sign-change count of m_z along y (over columns)

    bool is_uniform() const {
        return kind == TextureKind::UniformUp || kind == TextureKind::UniformDown;
    }
    /// +1 for UniformUp, -1 for UniformDown, 0 otherwise.
    int polarity() const {
        if (kind == TextureKind::UniformUp) return +1;
        if (kind == TextureKind::UniformDown) return -1;
        return 0;
    }
};

/// Q = (1/4pi) sum_cells m . (dm/dx x dm/dy) dx dy, central differences
/// inside and one-sided at the edges. Requires nz = 1.
double skyrmion_number(const VectorField& m);

TextureClass classify(const VectorField& m, const ClassifierThresholds& thresholds = {});

}  // namespace chiralmm
