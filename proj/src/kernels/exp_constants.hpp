#pragma once

// Shared constants of the exp approximation: range reduction
// x = n ln2 + r, |r| <= ln2/2, then a degree-11 Taylor polynomial evaluated
// by Estrin's scheme. Variants must evaluate these in exactly the same order.

namespace equipart::kernels::detail {

inline constexpr double kExpLo = -708.0;
inline constexpr double kExpHi = 709.0;
inline constexpr double kLog2e = 1.4426950408889634074;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;

inline constexpr double kExpCoeff[12] = {
    1.0,
    1.0,
    1.0 / 2.0,
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 120.0,
    1.0 / 720.0,
    1.0 / 5040.0,
    1.0 / 40320.0,
    1.0 / 362880.0,
    1.0 / 3628800.0,
    1.0 / 39916800.0,
};

}  // namespace equipart::kernels::detail
