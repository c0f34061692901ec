#include "crossdiff/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "crossdiff/errors.hpp"

namespace crossdiff::stability {

std::string convention_name(Convention c) {
    return c == Convention::marginal_nearest_integer ? "marginal-nearest-integer"
                                                     : "integer-entry";
}

Convention convention_from_name(const std::string& name) {
    if (name == "marginal-nearest-integer") return Convention::marginal_nearest_integer;
    if (name == "integer-entry") return Convention::integer_entry;
    throw config_error("unknown critical-pair convention '" + name + "'");
}

namespace {

struct DispersionPolys {
    // det D(u*; delta) = a0 + a1 delta + a2 delta^2, q(delta) = q0 + q1 delta.
    double a0, a1, a2;
    double q0, q1;
    double detK;

    double detD(double d) const { return a0 + d * (a1 + d * a2); }
    double q(double d) const { return q0 + q1 * d; }
    double phi(double d) const { return 4.0 * detD(d) * detK - q(d) * q(d); }
    double dphi(double d) const {
        return 4.0 * (a1 + 2.0 * a2 * d) * detK - 2.0 * q(d) * q1;
    }
};

double q_of(const ModelParams& p, const Vec2& us, const Mat2& D) {
    const Mat2& B = p.beta;
    // Left-to-right grouping: for the singular built-in families the first
    // three products cancel exactly, keeping q accurate as b -> 0.
    return D.a11 * B.a22 * us.v2 + D.a22 * B.a11 * us.v1 - D.a12 * B.a21 * us.v2 -
           D.a21 * B.a12 * us.v1;
}

DispersionPolys dispersion_polys(const ModelParams& p) {
    const Vec2 us = coexistence_equilibrium(p);
    const Mat2 D0 = diffusion_d0(p, us);
    const Mat2 D1 = diffusion_d1(p, us);
    DispersionPolys dp{};
    dp.a0 = D0.det();
    dp.a2 = D1.det();
    dp.a1 = (D0 + D1).det() - dp.a0 - dp.a2;  // exact mixed term of det(D0 + d D1)
    dp.q0 = q_of(p, us, D0);
    dp.q1 = q_of(p, us, D1);
    dp.detK = jacobian_K(p).det();
    return dp;
}

}  // namespace

double q_delta(const ModelParams& p, double delta) {
    const Vec2 us = coexistence_equilibrium(p);
    return q_of(p, us, diffusion_matrix_at(p, us, delta));
}

double dispersion(const ModelParams& p, double delta, double ksq) {
    if (ksq < 0.0) throw invalid_argument_error("dispersion: ksq must be >= 0");
    const DispersionPolys dp = dispersion_polys(p);
    return dp.detD(delta) * ksq * ksq + dp.q(delta) * ksq + dp.detK;
}

double minimizer_ksq(const ModelParams& p, double delta) {
    const DispersionPolys dp = dispersion_polys(p);
    const double detD = dp.detD(delta);
    if (!(detD > 0.0))
        throw invalid_argument_error("minimizer_ksq: det D(u*) is not positive");
    return -dp.q(delta) / (2.0 * detD);
}

double marginal_function(const ModelParams& p, double delta) {
    return dispersion_polys(p).phi(delta);
}

double marginal_delta(const ModelParams& p, const MarginalSearch& opts) {
    const DispersionPolys dp = dispersion_polys(p);
    // Unstable for some wave number iff q < 0 and phi < 0.
    auto unstable = [&dp](double d) { return dp.q(d) < 0.0 && dp.phi(d) < 0.0; };

    if (!unstable(opts.delta_lo))
        throw bracket_error(
            "marginal_delta: no instability at the lower end of the search interval");

    // Log-spaced scan for the first stable point.
    const double llo = std::log(opts.delta_lo), lhi = std::log(opts.delta_hi);
    double lo = opts.delta_lo, hi = std::numeric_limits<double>::quiet_NaN();
    for (int i = 1; i <= opts.scan_points; ++i) {
        const double d = std::exp(llo + (lhi - llo) * i / opts.scan_points);
        if (!unstable(d)) {
            hi = d;
            break;
        }
        lo = d;
    }
    if (!std::isfinite(hi))
        throw bracket_error("marginal_delta: instability indicator has constant sign on (" +
                            std::to_string(opts.delta_lo) + ", " +
                            std::to_string(opts.delta_hi) + "]");

    // Bisection to 1e-3 relative.
    while (hi - lo > 1e-3 * hi) {
        const double mid = 0.5 * (lo + hi);
        (unstable(mid) ? lo : hi) = mid;
    }

    // Newton polish on phi (the boundary satisfies phi = 0 with q < 0 nearby);
    // quadratic convergence reaches the floating-point fixed point in a few
    // iterations, which the downstream closed-form identities rely on.
    double d = 0.5 * (lo + hi);
    double best = d, best_phi = std::abs(dp.phi(d));
    for (int it = 0; it < 100; ++it) {
        const double f = dp.phi(d);
        if (std::abs(f) < best_phi) {
            best = d;
            best_phi = std::abs(f);
        }
        const double fp = dp.dphi(d);
        if (fp == 0.0) break;
        const double next = std::clamp(d - f / fp, 0.5 * lo, 2.0 * hi);
        if (next == d) break;
        d = next;
    }
    return best;
}

std::pair<double, double> unstable_band(const ModelParams& p, double delta) {
    if (!(delta > 0.0))
        throw band_error("unstable_band: requires delta > 0 (det D vanishes at 0)");
    const DispersionPolys dp = dispersion_polys(p);
    const double detD = dp.detD(delta);
    const double q = dp.q(delta);
    const double disc = q * q - 4.0 * detD * dp.detK;
    if (disc < 0.0)
        throw band_error("unstable_band: empty band (discriminant < 0) at delta = " +
                         std::to_string(delta));
    if (!(q < 0.0))
        throw band_error("unstable_band: q_delta(u*) >= 0, no positive band");
    const double s = std::sqrt(disc);
    // Stable quadratic roots: k^2 = (-q -/+ s) / (2 detD), q < 0.
    const double hi = (-q + s) / (2.0 * detD);
    const double lo = dp.detK / (detD * hi);  // product of roots = detK / detD
    return {lo, hi};
}

double growth_rate(const ModelParams& p, double delta, int k) {
    if (k < 0) throw invalid_argument_error("growth_rate: k must be >= 0");
    const Vec2 us = coexistence_equilibrium(p);
    const Mat2 K = jacobian_K(p);
    const Mat2 D = diffusion_matrix_at(p, us, delta);
    const Mat2 Ak = K - static_cast<double>(k) * static_cast<double>(k) * D;
    return max_real_eigenvalue(Ak);
}

StabilityReport critical_pair(const ModelParams& p, Convention convention,
                              const MarginalSearch& opts) {
    const DispersionPolys dp = dispersion_polys(p);
    StabilityReport rep;
    rep.convention = convention;
    rep.delta_bar_c = marginal_delta(p, opts);

    const double km_sq_bar = -dp.q(rep.delta_bar_c) / (2.0 * dp.detD(rep.delta_bar_c));

    if (convention == Convention::marginal_nearest_integer) {
        rep.delta_c = rep.delta_bar_c;
        rep.k_c = std::max(1, static_cast<int>(std::lround(std::sqrt(km_sq_bar))));
    } else {
        // For each integer k, h(k^2; delta) = 0 is a quadratic in delta:
        //   (a2 k^4) delta^2 + (a1 k^4 + q1 k^2) delta + (a0 k^4 + q0 k^2 + detK) = 0.
        // delta(k) is its largest root in (0, marginal]; the critical pair
        // maximizes delta(k) over k.
        const int k_max = 2 * static_cast<int>(std::ceil(std::sqrt(km_sq_bar))) + 2;
        double best_delta = -1.0;
        int best_k = 0;
        for (int k = 1; k <= k_max; ++k) {
            const double k2 = static_cast<double>(k) * k;
            const double k4 = k2 * k2;
            const double A = dp.a2 * k4;
            const double B = dp.a1 * k4 + dp.q1 * k2;
            const double C = dp.a0 * k4 + dp.q0 * k2 + dp.detK;
            double roots[2];
            int nroots = 0;
            if (std::abs(A) < 1e-300) {
                if (B != 0.0) roots[nroots++] = -C / B;
            } else {
                const double disc = B * B - 4.0 * A * C;
                if (disc >= 0.0) {
                    const double s = std::sqrt(disc);
                    const double qf = -0.5 * (B + (B >= 0.0 ? s : -s));
                    roots[nroots++] = qf / A;
                    if (qf != 0.0) roots[nroots++] = C / qf;
                }
            }
            for (int r = 0; r < nroots; ++r) {
                const double d = roots[r];
                if (d > 0.0 && d <= rep.delta_bar_c * (1.0 + 1e-12) && d > best_delta) {
                    best_delta = d;
                    best_k = k;
                }
            }
        }
        if (best_k == 0)
            throw bracket_error("critical_pair: no integer mode becomes critical below "
                                "the marginal parameter");
        rep.delta_c = std::min(best_delta, rep.delta_bar_c);
        rep.k_c = best_k;
    }

    rep.q_value = dp.q(rep.delta_c);
    const double detD_c = dp.detD(rep.delta_c);
    const double km_sq_c = -rep.q_value / (2.0 * detD_c);
    rep.h_min = detD_c * km_sq_c * km_sq_c + rep.q_value * km_sq_c + dp.detK;
    const double disc = rep.q_value * rep.q_value - 4.0 * detD_c * dp.detK;
    if (disc >= 0.0 && rep.q_value < 0.0) {
        const double s = std::sqrt(disc);
        rep.band_hi = (-rep.q_value + s) / (2.0 * detD_c);
        rep.band_lo = dp.detK / (detD_c * rep.band_hi);
    } else {
        rep.band_lo = rep.band_hi = km_sq_c;
    }
    rep.growth = growth_rate(p, rep.delta_c, rep.k_c);
    return rep;
}

}  // namespace crossdiff::stability
