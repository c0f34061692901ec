#pragma once

#include "crossdiff/linalg.hpp"

namespace crossdiff::closed_form {

// Closed-form expressions for the built-in worked family: diffusion matrix e1,
// competition matrix [[1, b/2], [2, 1]] and growth rates (1, 4). They provide
// an independent route against the generic numeric path and are valid for
// b in (0, 1/2), delta < b/4.

/// Equilibrium u* = (1-2b, 2) / (1-b).
Vec2 ustar(double b);

/// phi(b, delta) = -4 b delta^2 + (8 - 6b) delta - b^2/4; the marginal
/// parameter is its smaller positive root.
double phi(double b, double delta);

/// Smaller root of phi(b, .) = 0, evaluated in cancellation-free form.
double marginal_delta(double b);

/// Critical squared wave number k_c^2 = (b - 4 dc) / (4 dc (2 + dc)).
double critical_ksq(double b, double delta_c);

/// Kernel slope M = -(1 + k^2 (1 + dc)) / (b/2 + k^2).
double kernel_slope(double b, double delta_c, double ksq);

/// Adjoint kernel slope M* = -u1* (1 + k^2 (1 + dc)) / (u2* (2 + k^2)).
double adjoint_slope(double b, double delta_c, double ksq);

/// Second-order mean correction v20.
Vec2 v20(double b, double M);

/// det L2 = 9 u1* u2* (2 + dc) k^4 dc (exact at the critical pair).
double det_l2(double b, double delta_c, double ksq);

/// Second-order harmonic correction v22 = (w2 k^4 + w1 k^2 + w0) / det L2.
Vec2 v22(double b, double delta_c, double ksq);

struct STCoefficients {
    double S1, S2, T1, T2;
};

/// Projection coefficients with -<G2, eta> = S1 v20_1 + S2 v20_2 + T1 v22_1 + T2 v22_2.
STCoefficients st_coefficients(double b, double delta_c, double ksq);

/// Assembled <G2, eta> from the closed forms above.
double g2_eta(double b, double delta_c, double ksq);

}  // namespace crossdiff::closed_form
