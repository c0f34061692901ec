#include "crossdiff/wna.hpp"

#include <cmath>

#include "crossdiff/errors.hpp"

namespace crossdiff::wna {

std::pair<Vec2, Vec2> kernel_vectors(const ModelParams& p, double delta_c, double ksq,
                                     double kernel_tol_scale) {
    const Vec2 us = coexistence_equilibrium(p);
    const Mat2 K = jacobian_K(p);
    const Mat2 kD = ksq * diffusion_matrix_at(p, us, delta_c);
    const Mat2 A = K - kD;

    const double scale = K.norm_fro() * kD.norm_fro();
    if (A.norm_fro() <= 1e-14 * (K.norm_fro() + kD.norm_fro()))
        throw kernel_error("kernel_vectors: matrix vanishes, kernel is two-dimensional");
    if (std::abs(A.det()) > kernel_tol_scale * scale)
        throw kernel_error("kernel_vectors: (delta_c, k) is not a critical point "
                           "(|det A| = " + std::to_string(std::abs(A.det())) + ")");

    // rho = (1, M) from the first row, a11 + a12 M = 0; the second row is the
    // fallback when a12 degenerates. (At an integer k_c the matrix is singular
    // only up to the tolerance, so the two rows differ by ~|det A| / (a12 a22);
    // the first row is the canonical choice.)
    const double tiny = 1e-6 * A.norm_fro();
    const double M = std::abs(A.a12) > tiny ? -A.a11 / A.a12 : -A.a21 / A.a22;
    // eta = (1, M*) from the first column of the adjoint, a11 + a21 M* = 0.
    const double Mst = std::abs(A.a21) > tiny ? -A.a11 / A.a21 : -A.a12 / A.a22;
    if (!std::isfinite(M) || !std::isfinite(Mst))
        throw kernel_error("kernel_vectors: degenerate critical matrix");
    return {Vec2{1.0, M}, Vec2{1.0, Mst}};
}

Vec2 qk_form(const ModelParams& p, const Vec2& x, const Vec2& y) {
    const Mat2& B = p.beta;
    const double mixed = x.v1 * y.v2 + x.v2 * y.v1;
    return {-(2.0 * B.a11 * x.v1 * y.v1 + B.a12 * mixed),
            -(2.0 * B.a22 * x.v2 * y.v2 + B.a21 * mixed)};
}

Vec2 qd_form(const ModelParams& p, double delta, const Vec2& x, const Vec2& y) {
    const Mat2 D1 = diffusion_species_matrix(p, 1, delta);
    const Mat2 D2 = diffusion_species_matrix(p, 2, delta);
    return {D1.a11 * x.v1 * y.v1 + D2.a12 * x.v2 * y.v2,
            D1.a21 * x.v1 * y.v1 + D2.a22 * x.v2 * y.v2};
}

Vec2 m_form(const ModelParams& p, double delta, int j, double ksq, const Vec2& x,
            const Vec2& y) {
    if (j < 0 || j > 3) throw invalid_argument_error("m_form: j must lie in {0,1,2,3}");
    return qk_form(p, x, y) - static_cast<double>(j) * j * ksq * qd_form(p, delta, x, y);
}

Vec2 gradient_coupling_vec(const ModelParams& p, double delta) {
    const Mat2 D1 = diffusion_species_matrix(p, 1, delta);
    const Mat2 D2 = diffusion_species_matrix(p, 2, delta);
    return {D2.a11 + D1.a12, D2.a21 + D1.a22};
}

SecondOrder second_order_coeffs(const ModelParams& p, double delta_c, double ksq,
                                const Vec2& rho) {
    const Vec2 us = coexistence_equilibrium(p);
    const Mat2 K = jacobian_K(p);
    const Mat2 D = diffusion_matrix_at(p, us, delta_c);

    SecondOrder out;
    const Mat2 L0 = K;
    const Mat2 L2 = K - 4.0 * ksq * D;
    out.detL0 = L0.det();
    out.detL2 = L2.det();
    const double scale0 = K.norm_fro() * K.norm_fro();
    const double scale2 = (K.norm_fro() + 4.0 * ksq * D.norm_fro()) *
                          (K.norm_fro() + 4.0 * ksq * D.norm_fro());
    if (std::abs(out.detL0) <= 1e-14 * scale0)
        throw solver_error("second_order_coeffs: L0 is singular");
    if (std::abs(out.detL2) <= 1e-14 * scale2)
        throw solver_error("second_order_coeffs: L2 is singular "
                           "(harmonic 2 k_c is itself a critical mode)");

    out.v20 = solve2(L0, -0.25 * qk_form(p, rho, rho));  // M0 = Q_K
    const Vec2 rhs2 = ksq * rho.v1 * rho.v2 * gradient_coupling_vec(p, delta_c) -
                      0.25 * m_form(p, delta_c, 2, ksq, rho, rho);
    out.v22 = solve2(L2, rhs2);
    return out;
}

Vec2 r1_vec(const ModelParams& p, double delta_c, const Vec2& rho, const Vec2& v20,
            const Vec2& v22) {
    const Mat2 D1 = diffusion_species_matrix(p, 1, delta_c);
    const Mat2 D2 = diffusion_species_matrix(p, 2, delta_c);
    Vec2 r;
    for (int i = 0; i < 2; ++i) {
        const double di1 = (i == 0) ? D2.a11 : D2.a21;  // d_{i1}^{delta 2}
        const double di2 = (i == 0) ? D1.a12 : D1.a22;  // d_{i2}^{delta 1}
        r[i] = di1 * (rho.v1 * (0.5 * v22.v2 - v20.v2) - rho.v2 * v22.v1) +
               di2 * (rho.v2 * (0.5 * v22.v1 - v20.v1) - rho.v1 * v22.v2);
    }
    return r;
}

Vec2 r2_vec(const ModelParams& p, double delta_c, const Vec2& rho, const Vec2& v22) {
    const Mat2 D1 = diffusion_species_matrix(p, 1, delta_c);
    const Mat2 D2 = diffusion_species_matrix(p, 2, delta_c);
    Vec2 r;
    for (int i = 0; i < 2; ++i) {
        const double di1 = (i == 0) ? D2.a11 : D2.a21;
        const double di2 = (i == 0) ? D1.a12 : D1.a22;
        r[i] = -3.0 * (di1 * (rho.v2 * v22.v1 + 0.5 * rho.v1 * v22.v2) +
                       di2 * (rho.v1 * v22.v2 + 0.5 * rho.v2 * v22.v1));
    }
    return r;
}

Vec2 secular_r1_form(const ModelParams& p, const Vec2& x) {
    return {p.dtensor(0, 0, 0, 1) * x.v1 * x.v1 + p.dtensor(0, 1, 1, 1) * x.v2 * x.v2,
            p.dtensor(1, 0, 0, 1) * x.v1 * x.v1 + p.dtensor(1, 1, 1, 1) * x.v2 * x.v2};
}

Vec2 secular_r3_form(const ModelParams& p, const Vec2& x) {
    // cos(2kx) coefficient of d/dx(d_{i1}^{21} x2 dx1 + d_{i2}^{11} x1 dx2) per
    // unit k^2 and unit amplitude.
    const double c = x.v1 * x.v2;
    return {-c * (p.dtensor(0, 0, 1, 1) + p.dtensor(0, 1, 0, 1)),
            -c * (p.dtensor(1, 0, 1, 1) + p.dtensor(1, 1, 0, 1))};
}

std::pair<double, double> landau_coefficients(const ModelParams& p, WnaExpansion& exp) {
    exp.rho_eta = exp.rho.dot(exp.eta);
    if (!(exp.rho_eta > 0.0))
        throw kernel_error("landau_coefficients: degenerate projection, <rho,eta> <= 0");

    const Vec2 us = coexistence_equilibrium(p);
    const Mat2 D1 = diffusion_d1(p, us);
    exp.g1 = exp.kc_sq * exp.delta2 * (D1 * exp.rho);
    exp.g2 = m_form(p, exp.delta_c, 1, exp.kc_sq, exp.rho, exp.v20) +
             0.5 * m_form(p, exp.delta_c, 1, exp.kc_sq, exp.rho, exp.v22) +
             exp.kc_sq * r1_vec(p, exp.delta_c, exp.rho, exp.v20, exp.v22);
    exp.g3 = 0.5 * m_form(p, exp.delta_c, 3, exp.kc_sq, exp.rho, exp.v22) +
             exp.kc_sq * r2_vec(p, exp.delta_c, exp.rho, exp.v22);

    // delta1-scaled order-3 forms; identically zero under secular suppression.
    exp.secular_r1 = exp.delta1 * secular_r1_form(p, exp.rho);
    exp.secular_r3 = exp.delta1 * secular_r3_form(p, exp.rho);

    exp.g1_eta = exp.g1.dot(exp.eta);
    exp.g2_eta = exp.g2.dot(exp.eta);
    exp.sigma = exp.g1_eta / exp.rho_eta;
    exp.ell = -exp.g2_eta / exp.rho_eta;
    return {exp.sigma, exp.ell};
}

WnaExpansion build_expansion(const ModelParams& p, double delta, const WnaOptions& opts) {
    WnaExpansion exp;
    exp.convention = opts.convention;
    const auto rep = stability::critical_pair(p, opts.convention);
    exp.delta_c = rep.delta_c;
    exp.k_c = rep.k_c;
    exp.kc_sq = static_cast<double>(rep.k_c) * rep.k_c;
    if (delta > exp.delta_c * (1.0 + 1e-12))
        throw invalid_argument_error("build_expansion: delta exceeds delta_c, "
                                     "no expansion below criticality");
    exp.delta = delta;
    exp.eps = std::sqrt(std::max(0.0, (exp.delta_c - delta) / exp.delta_c));
    exp.delta2 = opts.delta2 < 0.0 ? exp.delta_c : opts.delta2;
    exp.delta1 = 0.0;
    exp.ustar = coexistence_equilibrium(p);

    auto [rho, eta] = kernel_vectors(p, exp.delta_c, exp.kc_sq, opts.kernel_tol_scale);
    exp.rho = rho;
    exp.eta = eta;
    exp.M = rho.v2;
    exp.Mstar = eta.v2;

    const SecondOrder so = second_order_coeffs(p, exp.delta_c, exp.kc_sq, exp.rho);
    exp.v20 = so.v20;
    exp.v22 = so.v22;

    landau_coefficients(p, exp);
    if (exp.ell != 0.0) {
        exp.a_inf_sq = exp.sigma / exp.ell;
        exp.a_inf = exp.a_inf_sq > 0.0 ? std::sqrt(exp.a_inf_sq) : 0.0;
    }
    return exp;
}

double amplitude_at(double sigma, double ell, double A0, double t) {
    if (!(A0 > 0.0)) throw invalid_argument_error("amplitude_at: A0 must be > 0");
    if (!(ell > 0.0)) throw invalid_argument_error("amplitude_at: ell must be > 0");
    if (sigma == 0.0) {
        // Degenerate logistic limit: A^2 = A0^2 / (1 + 2 ell A0^2 t).
        return A0 / std::sqrt(1.0 + 2.0 * ell * A0 * A0 * t);
    }
    const double r = sigma / ell;
    const double a2 = r / (1.0 + (r / (A0 * A0) - 1.0) * std::exp(-2.0 * sigma * t));
    return std::sqrt(std::max(0.0, a2));
}

Vec2 stationary_profile(const WnaExpansion& exp, double x, int sign) {
    if (!(exp.sigma > 0.0) || !(exp.ell > 0.0))
        throw invalid_argument_error(
            "stationary_profile: subcritical coefficients (sigma or ell <= 0), "
            "no patterned state predicted");
    const double amp = std::sqrt(exp.sigma / exp.ell);
    const double kx = exp.k_c * x;
    const double s = sign >= 0 ? 1.0 : -1.0;
    const Vec2 first = (s * exp.eps * amp * std::cos(kx)) * exp.rho;
    const Vec2 second =
        (exp.eps * exp.eps * exp.a_inf_sq) * (exp.v20 + std::cos(2.0 * kx) * exp.v22);
    return exp.ustar + first + second;
}

std::vector<LimitDiagnostics> limit_diagnostics(
    const std::function<ModelParams(double)>& family, const std::vector<double>& b_values) {
    std::vector<LimitDiagnostics> rows;
    rows.reserve(b_values.size());
    for (double b : b_values) {
        LimitDiagnostics row;
        row.b = b;
        try {
            const ModelParams p = family(b);
            const double dc = stability::marginal_delta(p);
            const double ksq = stability::minimizer_ksq(p, dc);  // continuous double root
            row.delta_c = dc;
            row.kc_sq = ksq;
            row.delta_c_over_b_sq = dc / (b * b);

            auto [rho, eta] = kernel_vectors(p, dc, ksq, 1e-6);
            row.M = rho.v2;
            row.Mstar = eta.v2;
            row.eps_M = 1.0 + row.M;
            row.kc_sq_eps_M = ksq * row.eps_M;
            row.kc_sq_one_plus_2Mstar = ksq * (1.0 + 2.0 * row.Mstar);

            const SecondOrder so = second_order_coeffs(p, dc, ksq, rho);
            const double rho_eta = rho.dot(eta);

            // <G2, eta> is linear in (v20, v22); extract the coefficients by
            // evaluating on unit vectors.
            auto g2_eta = [&](const Vec2& v20, const Vec2& v22) {
                const Vec2 g2 = m_form(p, dc, 1, ksq, rho, v20) +
                                0.5 * m_form(p, dc, 1, ksq, rho, v22) +
                                ksq * r1_vec(p, dc, rho, v20, v22);
                return g2.dot(eta);
            };
            row.S1 = -g2_eta({1.0, 0.0}, {0.0, 0.0});
            row.S2 = -g2_eta({0.0, 1.0}, {0.0, 0.0});
            row.T1 = -g2_eta({0.0, 0.0}, {1.0, 0.0});
            row.T2 = -g2_eta({0.0, 0.0}, {0.0, 1.0});
            row.T_combo = ksq * dc * (row.T1 * so.v22.v1 + row.T2 * so.v22.v2);

            const double g2e = g2_eta(so.v20, so.v22);
            row.G2_scaled = ksq * dc * g2e;

            const Vec2 us = coexistence_equilibrium(p);
            const Vec2 g1 = ksq * dc * (diffusion_d1(p, us) * rho);  // delta2 = delta_c
            row.g1_eta = g1.dot(eta);
            const double sigma = row.g1_eta / rho_eta;
            const double ell = -g2e / rho_eta;
            if (ell > 0.0 && sigma > 0.0) {
                row.a_inf_sq = sigma / ell;
                row.a_inf = std::sqrt(row.a_inf_sq);
            }
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace crossdiff::wna
