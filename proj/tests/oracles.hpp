#pragma once

// Reference constants for the test suite, generated by tools/make_oracles.py
// through routes independent of the library (closed forms, plain bisection,
// composite Simpson).  Regenerate with:  python3 tools/make_oracles.py

namespace oracle {

// Root of 0.6 * 0.5^k + 0.4 * 1.5^k = 1 (two-atom coefficient law).
inline constexpr double kTwoAtomKappa = 1.7898035015167153;

// E Z^2 ln Z^2 for standard normal Z: 2 - gamma - ln 2.
inline constexpr double kNormalZ2LnZ2 = 0.72963715453852196;
inline constexpr double kCGauss = 1.3705442407637205;  // its reciprocal

// Critical-GARCH CLT constants for the three-atom noise.
inline constexpr double kCDiscLambda1 = 1.4426950408889634;   // 1/ln 2
inline constexpr double kCDiscLambda05 = 7.6445565028127973;

// Kevei family at alpha=0.5, kappa=1, v0=1, p=0.05, b=1.
// Density integral over [1,inf) of v^{-3/2} e^{-v} = 2/e - 2 sqrt(pi) erfc(1).
inline constexpr double kKeveiDensityIntegral = 0.17814771178156075;
inline constexpr double kKeveiC = 5.6133193629013283;
inline constexpr double kKeveiMgf = 11.226638725802657;
inline constexpr double kKeveiUpMass = 0.56133193629013289;
inline constexpr double kKeveiW = 0.7727189766335677;
inline constexpr double kKeveiAccept = 0.24212784385868796;
// Tilted truncated moment up_mass * (2 sqrt(x) - 1), x >= 1.
inline constexpr double kKeveiHAt1 = 0.56133193629013289;
inline constexpr double kKeveiHAt100 = 10.665306789512526;
// Tilted tail up_mass / sqrt(x), x >= 1.
inline constexpr double kKeveiTailAt2 = 0.396921618647328;
inline constexpr double kKeveiTailAt5 = 0.25103527349726362;
inline constexpr double kKeveiTailAt10 = 0.17750874420693472;

// Bruin sequence for ell = ln at n = 1e6.
inline constexpr double kBruinLog1e6FixedPoint = 16626508.901372476;
inline constexpr double kBruinLog1e6Formula = 13815510.557964273;
inline constexpr double kBruinLog1e6FormulaRatio = 1.1900611565138512;

// St. Petersburg staircase at n = 2^20 with b_n = n log2 n and the default
// schedule a_n = (ln n)^{-1/2}; probe value n P(Y > a_n b_n) is exact.
inline constexpr double kStpAnAt2p20 = 0.26857913553447926;
inline constexpr double kStpProbeValue2p20 = 0.25;

// g_A spot values.
inline constexpr double kGaRhoHalfPrefactor = 1.2732395447351628;  // 4/pi
inline constexpr double kGaRhoHalfAtE4 = 2.5464790894703255;
inline constexpr double kClt7TargetScale = 1.2011224087864498;  // sqrt(1/ln 2)

// Condition-2a ratio of ell(x) = exp((ln x)^{3/4}) at grid points:
// asymptotically exp(beta (ln x)^{2 beta - 1}), grows without bound.
inline constexpr double kAp4Ratio1e6 = 13.977321487929149;
inline constexpr double kAp4Ratio1e9 = 25.669766555919502;
inline constexpr double kAp4Ratio1e12 = 42.905986572302872;

}  // namespace oracle
