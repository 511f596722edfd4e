#pragma once

#include "thermalcat/types.hpp"

namespace thermalcat::atom {

// Basis ordering: index 0 = |e>, index 1 = |g>.
inline ComplexVector ket_e() { return (ComplexVector(2) << 1, 0).finished(); }
inline ComplexVector ket_g() { return (ComplexVector(2) << 0, 1).finished(); }
inline ComplexVector ket_plus() { return (ComplexVector(2) << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0)).finished(); }
inline ComplexVector ket_minus() { return (ComplexVector(2) << 1 / std::sqrt(2.0), -1 / std::sqrt(2.0)).finished(); }

// S+ = |e><g|, S- = |g><e|, S_z = |e><e| - |g><g|.
inline ComplexMatrix s_plus() { return (ComplexMatrix(2, 2) << 0, 1, 0, 0).finished(); }
inline ComplexMatrix s_minus() { return (ComplexMatrix(2, 2) << 0, 0, 1, 0).finished(); }
inline ComplexMatrix s_z() { return (ComplexMatrix(2, 2) << 1, 0, 0, -1).finished(); }
inline ComplexMatrix project_e() { return (ComplexMatrix(2, 2) << 1, 0, 0, 0).finished(); }
inline ComplexMatrix project_g() { return (ComplexMatrix(2, 2) << 0, 0, 0, 1).finished(); }

// sigma_z of the |+>/|-> basis expressed in e/g coordinates:
// (|+><+| - |-><-|)/2 = (S+ + S-)/2.
inline ComplexMatrix sigma_z_pm() { return (ComplexMatrix(2, 2) << 0, 0.5, 0.5, 0).finished(); }

}  // namespace thermalcat::atom
