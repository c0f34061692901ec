#pragma once

#include <string>

#include "crossdiff/model.hpp"

namespace crossdiff::stability {

/// How the critical pair (delta_c, k_c) is selected once the marginal
/// parameter is known.
///   marginal_nearest_integer: delta_c = marginal delta, k_c = nearest integer
///                             to the double root sqrt(k_m^2).
///   integer_entry:            delta_c = largest delta below the marginal value
///                             at which some integer squared wave number is a
///                             root of the dispersion polynomial; k_c is that
///                             integer.
enum class Convention { marginal_nearest_integer, integer_entry };

std::string convention_name(Convention c);
Convention convention_from_name(const std::string& name);

struct StabilityReport {
    double delta_bar_c = 0.0;  // h(k_m^2) = 0 here (double root)
    double delta_c = 0.0;      // critical bifurcation parameter
    int k_c = 0;               // critical integer wave number
    double band_lo = 0.0;      // k_-^2 at delta_c
    double band_hi = 0.0;      // k_+^2 at delta_c
    double q_value = 0.0;      // q_delta(u*) at delta_c
    double h_min = 0.0;        // h(k_m^2) at delta_c
    double growth = 0.0;       // max Re eigenvalue of A_{k_c} at delta_c
    Convention convention = Convention::marginal_nearest_integer;
};

/// Quadratic dispersion coefficient
///   q = d11 b22 u2* + d22 b11 u1* - (d12 b21 u2* + d21 b12 u1*),
/// with D evaluated at (u*, delta). Negative iff diffusion can destabilize.
double q_delta(const ModelParams& p, double delta);

/// h(k^2) = det(K - k^2 D(u*)) = det(D) k^4 + q k^2 + det(K).
double dispersion(const ModelParams& p, double delta, double ksq);

/// Minimizer k_m^2(delta) = -q / (2 det D) of the dispersion parabola.
double minimizer_ksq(const ModelParams& p, double delta);

/// phi(delta) = 4 det(D(u*; delta)) det(K) - q(delta)^2. Negative iff the
/// dispersion parabola dips below zero (instability possible when q < 0).
double marginal_function(const ModelParams& p, double delta);

struct MarginalSearch {
    double delta_lo = 1e-16;
    double delta_hi = 1.0;
    int scan_points = 400;
};

/// Unique marginal parameter in (delta_lo, delta_hi]: the smallest root of
/// phi(delta) = 0 above which h(k_m^2) > 0. Bracketed on a log grid, bisected
/// to 1e-3 relative, then Newton-polished to 1e-14 relative.
/// Throws bracket_error if no sign change is found.
double marginal_delta(const ModelParams& p, const MarginalSearch& opts = {});

/// Roots (k_-^2, k_+^2) of h for 0 < delta < marginal. Throws band_error when
/// the discriminant is negative (no unstable band) or delta <= 0 (det D = 0).
std::pair<double, double> unstable_band(const ModelParams& p, double delta);

/// Full critical-pair computation under the given convention.
StabilityReport critical_pair(const ModelParams& p,
                              Convention convention = Convention::marginal_nearest_integer,
                              const MarginalSearch& opts = {});

/// Max Re eigenvalue of A_k = K - k^2 D(u*; delta); positive iff mode k grows.
double growth_rate(const ModelParams& p, double delta, int k);

}  // namespace crossdiff::stability
