#pragma once

namespace rres {

// hbar^2 / (2 m_e) in eV nm^2; divide by the mass multiplier for other masses.
inline constexpr double kHbar2Over2MeEvNm2 = 0.0380998;

// hbar in eV s, used for Wigner time delays.
inline constexpr double kHbarEvS = 6.58212e-16;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace rres
