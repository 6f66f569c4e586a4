#pragma once

#include <string>

#include "chiralmm/mesh.hpp"

namespace chiralmm {

/// OVF 2.0 text snapshot, rectangular mesh, columns m_x m_y m_z, x-fastest
/// ordering. The header carries the simulation time and Ms.
void write_ovf(const VectorField& field, const std::string& path, double t = 0.0,
               double Ms = 0.0);

struct OvfSnapshot {
    VectorField field;
    double t = 0.0;
    double Ms = 0.0;
};

OvfSnapshot read_ovf(const std::string& path);

}  // namespace chiralmm
