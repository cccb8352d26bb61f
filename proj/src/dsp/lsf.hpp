#pragma once

#include "dsp/types.hpp"

namespace exknet::dsp {

// LPC <-> line spectral frequencies. The conversion works on the sum and
// difference polynomials P(z) = A(z) + z^-(p+1) A(1/z) and
// Q(z) = A(z) - z^-(p+1) A(1/z); after removing their fixed roots at z = +/-1
// both collapse to Chebyshev series in cos(w), whose interleaved zeros on
// (0, pi) are the LSFs. Root search: 2048-interval grid scan alternating
// between the two series, then bisection to 1e-12 rad.

LsfVector lpc_to_lsf(const LpcCoefficients& lpc);

// Rebuilds the predictor from root angles. Requires strictly ascending
// frequencies in (0, pi); that ordering is exactly the stability condition
// for the derived synthesis filter.
LpcCoefficients lsf_to_lpc(const LsfVector& lsf);

}  // namespace exknet::dsp
