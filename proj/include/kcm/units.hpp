#pragma once

// Internal unit system: lengths in Angstrom, energies in kcal/mol, angles in
// radians. Optical-trap quantities enter in pN and nm and are converted at
// the boundary.

namespace kcm::units {

// Coulomb constant in kcal*Angstrom/(mol*e^2).
inline constexpr double kCoulomb = 332.0636;

// 1 pN*nm expressed in kcal/mol.
inline constexpr double kPicoNewtonNanometer = 0.1439326;

// 1 pN expressed in kcal/(mol*Angstrom).
inline constexpr double kPicoNewton = 0.01439326;

inline constexpr double kAngstromPerNanometer = 10.0;
inline constexpr double kNanometerPerAngstrom = 0.1;

}  // namespace kcm::units
