#include "crossdiff/closed_form.hpp"

#include <cmath>

#include "crossdiff/errors.hpp"

namespace crossdiff::closed_form {

Vec2 ustar(double b) {
    if (!(b >= 0.0 && b < 0.5))
        throw invalid_argument_error("closed_form: b must lie in [0, 1/2)");
    return {(1.0 - 2.0 * b) / (1.0 - b), 2.0 / (1.0 - b)};
}

double phi(double b, double delta) {
    return -4.0 * b * delta * delta + (8.0 - 6.0 * b) * delta - b * b / 4.0;
}

double marginal_delta(double b) {
    if (!(b > 0.0 && b < 0.5))
        throw invalid_argument_error("closed_form::marginal_delta: b must lie in (0, 1/2)");
    // 4b d^2 - (8-6b) d + b^2/4 = 0; smaller root via the q-formula to avoid
    // cancellation (d- ~ b^2/32 while d+ ~ (8-6b)/(4b)).
    const double c1 = 8.0 - 6.0 * b;
    const double disc = c1 * c1 - 4.0 * b * b * b;
    const double q = 0.5 * (c1 + std::sqrt(disc));
    return (b * b / 4.0) / q;
}

double critical_ksq(double b, double delta_c) {
    return (b - 4.0 * delta_c) / (4.0 * delta_c * (2.0 + delta_c));
}

double kernel_slope(double b, double delta_c, double ksq) {
    return -(1.0 + ksq * (1.0 + delta_c)) / (b / 2.0 + ksq);
}

double adjoint_slope(double b, double delta_c, double ksq) {
    const Vec2 us = ustar(b);
    return -us.v1 * (1.0 + ksq * (1.0 + delta_c)) / (us.v2 * (2.0 + ksq));
}

Vec2 v20(double b, double M) {
    const Vec2 us = ustar(b);
    const double f = 1.0 / (4.0 * us.v1 * us.v2 * (1.0 - b));
    return {f * (-us.v2 * (2.0 + b * M) + b * us.v1 * M * (M + 2.0)),
            f * (2.0 * us.v2 * (2.0 + b * M) - 2.0 * us.v1 * M * (M + 2.0))};
}

double det_l2(double b, double delta_c, double ksq) {
    const Vec2 us = ustar(b);
    return 9.0 * us.v1 * us.v2 * (2.0 + delta_c) * ksq * ksq * delta_c;
}

Vec2 v22(double b, double delta_c, double ksq) {
    const Vec2 us = ustar(b);
    const double M = kernel_slope(b, delta_c, ksq);
    const double eM = 1.0 + M;
    const double u1 = us.v1, u2 = us.v2, dc = delta_c;

    const Vec2 w2 = {4.0 * (-(1.0 + dc) * u2 * (eM + dc) + u1 * M * (eM + M * dc)),
                     4.0 * (u2 * (eM + dc) - (1.0 + dc) * u1 * M * (eM + M * dc))};
    const Vec2 w1 = {-4.0 * (1.0 + dc) * u2 * (0.5 + b * M / 4.0) - u2 * (eM + dc) +
                         4.0 * u1 * (M + M * M / 2.0) + b / 2.0 * u1 * M * (eM + M * dc),
                     4.0 * u2 * (0.5 + b * M / 4.0) + 2.0 * u2 * (eM + dc) -
                         4.0 * (1.0 + dc) * u1 * (M + M * M / 2.0) - u1 * M * (eM + M * dc)};
    const Vec2 w0 = {-u2 * (0.5 + b * M / 4.0) + b / 2.0 * u1 * (M + M * M / 2.0),
                     2.0 * u2 * (0.5 + b * M / 4.0) - u1 * (M + M * M / 2.0)};

    const double det = det_l2(b, delta_c, ksq);
    return (1.0 / det) * (ksq * ksq * w2 + ksq * w1 + w0);
}

STCoefficients st_coefficients(double b, double delta_c, double ksq) {
    const double M = kernel_slope(b, delta_c, ksq);
    const double Mst = adjoint_slope(b, delta_c, ksq);
    const double eM = 1.0 + M;
    const double dc = delta_c;

    STCoefficients st{};
    st.S1 = 2.0 + M * b / 2.0 + 2.0 * M * Mst + ksq * (eM + dc);
    st.S2 = b / 2.0 + 2.0 * Mst * eM + ksq * Mst * (eM + M * dc);
    const double T1_0 = 0.5 * (2.0 + M * b / 2.0 + 2.0 * M * Mst);
    const double T1_1 = 0.5 * (1.0 - M + 2.0 * M * Mst + dc);
    const double T2_0 = b / 4.0 + Mst * eM;
    const double T2_1 = 1.0 + 0.5 * Mst * (M - 1.0 + M * dc);
    st.T1 = T1_0 + T1_1 * ksq;
    st.T2 = T2_0 + T2_1 * ksq;
    return st;
}

double g2_eta(double b, double delta_c, double ksq) {
    const STCoefficients st = st_coefficients(b, delta_c, ksq);
    const Vec2 a = v20(b, kernel_slope(b, delta_c, ksq));
    const Vec2 c = v22(b, delta_c, ksq);
    return -(st.S1 * a.v1 + st.S2 * a.v2 + st.T1 * c.v1 + st.T2 * c.v2);
}

}  // namespace crossdiff::closed_form
