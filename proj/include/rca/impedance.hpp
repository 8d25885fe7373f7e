#pragma once

#include "rca/layout.hpp"
#include "rca/types.hpp"

namespace rca {

// Complex mutual-impedance blocks of the full (M + M·N)-port network.
// Ordering: actives 0..M-1, couplers 0..MN-1 (layout order).
struct ImpedanceSet {
  CMatrix Zaa;  // M x M, active-active
  CMatrix Zac;  // M x MN, active-coupler
  CMatrix Zcc;  // MN x MN, coupler-coupler
};

// Induced-current weight matrix: column m holds the coupler currents driven
// by a unit current on active port m.
struct MechanicalWeights {
  CMatrix W;    // MN x M
  double sign;  // convention the solve used
};

// Condition-number ceiling for the weight solve.
inline constexpr double kConditionLimit = 1e12;

// Induced-EMF self impedance of a thin dipole: the zero-separation limit of
// the side-by-side kernel,
//   Z = η/(4π) [ (γ + ln(2kl) - Ci(2kl)) + j Si(2kl) ].
// For the half-wave dipole this is the canonical 73.08 + j42.52 Ω.
Complex self_impedance(const DipoleSpec& spec);

// Induced-EMF mutual impedance of two parallel side-by-side dipoles of
// length l with center separation d:
//   R =  η/(4π) [2 Ci(u0) - Ci(u1) - Ci(u2)]
//   X = -η/(4π) [2 Si(u0) - Si(u1) - Si(u2)]
// with u0 = kd, u1 = k(√(d²+l²)+l), u2 = k(√(d²+l²)-l).
// Requires d >= 0.05 λ (kernel validity floor); throws SpacingError below.
Complex mutual_impedance_side_by_side(double d, const DipoleSpec& spec);

// Fills every block from the side-by-side kernel on Euclidean center
// distances, self impedances on the diagonals.  Coupling between different
// RCAs is included: the blocks describe the full multiport, not a per-RCA
// approximation.  Throws SpacingError (naming the pair) when the layout
// violates d_min or the kernel floor.
ImpedanceSet assemble_impedances(const ArrayLayout& layout, const DipoleSpec& spec);

// Solves (Zcc + diag(loads)) W = s Zacᵀ for the induced-current weights,
// s = loads.sign_convention.  Throws ConditioningError when the condition
// estimate exceeds kConditionLimit.
MechanicalWeights mechanical_weights(const ImpedanceSet& Z, const LoadConfig& loads);

// ‖(Zcc + diag(loads)) W - s Zacᵀ‖_F / ‖Zacᵀ‖_F
double weights_residual(const ImpedanceSet& Z, const LoadConfig& loads,
                        const MechanicalWeights& weights);

}  // namespace rca
