#pragma once

#include <functional>
#include <string>
#include <vector>

#include "crossdiff/model.hpp"
#include "crossdiff/stability.hpp"

namespace crossdiff::wna {

/// Multiple-scales expansion data around the critical point. The stationary
/// pattern amplitude is reported as a_inf = sqrt(sigma/ell); this is the
/// convention that reproduces the reference amplitudes (see README).
struct WnaExpansion {
    double delta = 0.0;    // operating parameter (<= delta_c)
    double delta_c = 0.0;  // critical bifurcation parameter
    int k_c = 0;           // critical wave number
    double kc_sq = 0.0;    // squared wave number actually used (k_c^2 unless overridden)
    double eps = 0.0;      // eps^2 = (delta_c - delta)/delta_c
    double delta2 = 0.0;   // second-order parameter expansion coefficient (default delta_c)
    double delta1 = 0.0;   // kept at 0: secular-term suppression

    Vec2 ustar;
    Vec2 rho;   // (1, M), kernel of K - kc^2 D(u*)
    Vec2 eta;   // (1, M*), kernel of the adjoint
    double M = 0.0;
    double Mstar = 0.0;

    Vec2 v20;  // second-order mean correction
    Vec2 v22;  // second-order cos(2 k_c x) correction

    double sigma = 0.0;  // linear Stuart-Landau coefficient
    double ell = 0.0;    // cubic Stuart-Landau coefficient
    double a_inf_sq = 0.0;  // sigma / ell
    double a_inf = 0.0;     // sqrt(sigma / ell)

    Vec2 g1, g2;        // assembled interaction vectors (cos(k_c x) balance)
    Vec2 g3;            // cos(3 k_c x) coefficient, reported but unused for sigma/ell
    double rho_eta = 0.0;
    double g1_eta = 0.0;
    double g2_eta = 0.0;

    Vec2 secular_r1;  // delta1-scaled order-3 forms; identically zero while delta1 = 0
    Vec2 secular_r3;

    stability::Convention convention = stability::Convention::marginal_nearest_integer;
};

struct WnaOptions {
    stability::Convention convention = stability::Convention::marginal_nearest_integer;
    double delta2 = -1.0;  // < 0 means "use delta_c"
    // |det(K - kc^2 D)| <= kernel_tol_scale * ||K||_F * ||kc^2 D||_F qualifies
    // as a critical point (integer k_c never nulls the determinant exactly).
    double kernel_tol_scale = 1e-6;
};

/// Kernel vectors rho = (1, M) of A = K - ksq D(u*; delta_c) and eta = (1, M*)
/// of A^T, computed from the matrix rows. Throws kernel_error when A is not
/// critical within tolerance, or when the kernel is two-dimensional.
std::pair<Vec2, Vec2> kernel_vectors(const ModelParams& p, double delta_c, double ksq,
                                     double kernel_tol_scale = 1e-6);

/// Symmetric bilinear reaction form Q_K(x, y).
Vec2 qk_form(const ModelParams& p, const Vec2& x, const Vec2& y);
/// Symmetric bilinear diffusion form Q_D(x, y) with split coefficients
/// d_ij^{nm} = d_ij(m,0) + delta d_ij(m,1).
Vec2 qd_form(const ModelParams& p, double delta, const Vec2& x, const Vec2& y);
/// M_j(x, y) = Q_K(x, y) - j^2 ksq Q_D(x, y).
Vec2 m_form(const ModelParams& p, double delta, int j, double ksq, const Vec2& x,
            const Vec2& y);

/// Vector d = (d11^{delta 2} + d12^{delta 1}, d21^{delta 2} + d22^{delta 1})
/// entering the cos(2 k_c x) forcing.
Vec2 gradient_coupling_vec(const ModelParams& p, double delta);

struct SecondOrder {
    Vec2 v20, v22;
    double detL0 = 0.0, detL2 = 0.0;
};

/// Solves L0 v20 = -1/4 M0(rho, rho) and
/// L2 v22 = ksq rho1 rho2 d - 1/4 M2(rho, rho), with L_j = K - j^2 ksq D(u*).
/// Throws solver_error naming the singular block (a singular L2 means the
/// harmonic 2 k_c is itself critical: resonance).
SecondOrder second_order_coeffs(const ModelParams& p, double delta_c, double ksq,
                                const Vec2& rho);

/// First cubic interaction vector R1 (cos(k_c x) channel).
Vec2 r1_vec(const ModelParams& p, double delta_c, const Vec2& rho, const Vec2& v20,
            const Vec2& v22);
/// Second cubic interaction vector R2 (cos(3 k_c x) channel).
Vec2 r2_vec(const ModelParams& p, double delta_c, const Vec2& rho, const Vec2& v22);

/// Order-3 forms that are multiplied by delta1 in the expansion. They are kept
/// evaluable; with delta1 = 0 their contribution vanishes identically.
Vec2 secular_r1_form(const ModelParams& p, const Vec2& x);
Vec2 secular_r3_form(const ModelParams& p, const Vec2& x);

/// Stuart-Landau coefficients (sigma, ell) from an expansion whose kernel and
/// second-order data are already filled in. Throws kernel_error if
/// <rho, eta> <= 0 (degenerate projection).
std::pair<double, double> landau_coefficients(const ModelParams& p, WnaExpansion& exp);

/// Full pipeline: critical pair, kernel vectors, second-order solves,
/// Stuart-Landau coefficients. Requires delta <= delta_c.
WnaExpansion build_expansion(const ModelParams& p, double delta, const WnaOptions& opts = {});

/// Exact Stuart-Landau solution A(t) for dA/dt = sigma A - ell A^3, A(0) = A0 > 0.
double amplitude_at(double sigma, double ell, double A0, double t);

/// Truncated stationary profile
///   v(x) = u* + eps sqrt(sigma/ell) rho cos(k_c x)
///        + eps^2 (sigma/ell) (v20 + v22 cos(2 k_c x)).
/// `sign` flips the first-order term (the pattern is defined up to a
/// half-period shift). Throws invalid_argument_error when sigma <= 0 or
/// ell <= 0 (no patterned state predicted).
Vec2 stationary_profile(const WnaExpansion& exp, double x, int sign = +1);

/// One row of the small-b limit diagnostics (continuous critical wave number).
struct LimitDiagnostics {
    double b = 0.0;
    double delta_c = 0.0;
    double kc_sq = 0.0;
    double M = 0.0, Mstar = 0.0;
    double eps_M = 0.0;                  // 1 + M
    double kc_sq_eps_M = 0.0;            // -> -1
    double kc_sq_one_plus_2Mstar = 0.0;  // -> 9
    double S1 = 0.0, S2 = 0.0, T1 = 0.0, T2 = 0.0;
    double T_combo = 0.0;    // kc^2 delta_c (T1 v22_1 + T2 v22_2)
    double G2_scaled = 0.0;  // kc^2 delta_c <G2, eta>
    double g1_eta = 0.0;     // -> 0
    double a_inf = 0.0;      // -> 0
    double a_inf_sq = 0.0;
    double delta_c_over_b_sq = 0.0;  // -> 1/32
    bool ok = false;
    std::string error;
};

/// Evaluates the diagnostics along decreasing b values for a model family
/// b -> params. Rows that fail are marked, not fatal.
std::vector<LimitDiagnostics> limit_diagnostics(
    const std::function<ModelParams(double)>& family, const std::vector<double>& b_values);

}  // namespace crossdiff::wna
