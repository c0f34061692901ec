#pragma once

#include <array>
#include <string>
#include <vector>

#include "crossdiff/linalg.hpp"

namespace crossdiff {

/// Built-in diffusion-matrix families.
///   e1:       D(u) = [[(1+d)u1, u1], [u2, (1+d)u2]],   det = d(2+d) u1 u2
///   e2:       D(u) = [[(1+d)u1 + d/2 u2, (1+d/2)u1],
///                     [(1+d/2)u2, d/2 u1 + (1+d)u2]],  det = d(1+d)(u1+u2)^2 / 2
///   bt_limit: e1 at delta = 0 (singular diffusion)
enum class Family { e1, e2, bt_limit, custom };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

/// The 16 coefficients d[i][j][m][n] of the decomposition
///   d_ij(u; delta) = d[i][j][0][0] u1 + d[i][j][0][1] u1 delta
///                  + d[i][j][1][0] u2 + d[i][j][1][1] u2 delta,
/// i.e. D(u) is linear in u and affine in delta.
struct DiffusionTensor {
    std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2> d{};

    double& operator()(int i, int j, int m, int n) { return d[i][j][m][n]; }
    double operator()(int i, int j, int m, int n) const { return d[i][j][m][n]; }
};

/// Problem data: Lotka-Volterra kinetics plus the regularized diffusion tensor.
struct ModelParams {
    std::array<double, 2> alpha{0.0, 0.0};  // growth rates
    Mat2 beta;                              // competition matrix B
    DiffusionTensor dtensor;
    double b = 0.0;      // kinetics-regularization parameter
    double delta = 0.0;  // diffusion-regularization parameter
    Family family = Family::custom;
};

/// Constructs the worked example family: alpha = (1,4), B = [[1, b/2], [2, 1]]
/// and the requested diffusion matrix. Requires b in [0, 1/2) so that the
/// coexistence equilibrium stays positive; bt_limit forces delta = 0.
ModelParams builtin_example(Family which, double b, double delta);

/// Coexistence equilibrium u* of the kinetics. Throws invalid_argument_error
/// if the competition conditions fail (non-positive components).
Vec2 coexistence_equilibrium(const ModelParams& p);

/// D(u) at the parameters' delta.
Mat2 diffusion_matrix(const ModelParams& p, const Vec2& u);
/// D(u) at an explicit delta (used by continuation in delta).
Mat2 diffusion_matrix_at(const ModelParams& p, const Vec2& u, double delta);
/// delta-independent part D0(u) and delta-derivative part D1(u),
/// so that D(u) = D0(u) + delta D1(u).
Mat2 diffusion_d0(const ModelParams& p, const Vec2& u);
Mat2 diffusion_d1(const ModelParams& p, const Vec2& u);
/// Constant matrix D^{delta m} (m = 1, 2) with entries d[i][j][m-1][0] + delta d[i][j][m-1][1],
/// so that D(u) = D^{delta 1} u1 + D^{delta 2} u2.
Mat2 diffusion_species_matrix(const ModelParams& p, int m, double delta);

/// Lotka-Volterra reaction f_i(u) = u_i (alpha_i - beta_i1 u1 - beta_i2 u2).
Vec2 reaction(const ModelParams& p, const Vec2& u);

/// Jacobian K = Df(u*) of the kinetics at the coexistence equilibrium.
Mat2 jacobian_K(const ModelParams& p);

/// One checked clause of the structural hypotheses; margin > 0 means satisfied
/// with that slack (strict inequalities) or satisfied-at-boundary when 0 is allowed.
struct ValidationClause {
    std::string name;
    bool pass = false;
    double margin = 0.0;
};

struct ValidationReport {
    std::vector<ValidationClause> clauses;
    bool pass() const {
        for (const auto& c : clauses)
            if (!c.pass) return false;
        return !clauses.empty();
    }
    const ValidationClause* find(const std::string& name) const;
};

/// Numerically spot-checks the structural hypotheses on the given probes:
/// coefficient non-negativity, positive diagonal and positive determinant of
/// D(u) for delta > 0, monotone determinant in delta, the four competition
/// inequalities, and the instability precondition q_delta(u*) < 0.
/// Grids default to a log-spaced delta grid on [1e-6, 1] joined with {0} and a
/// coarse positive lattice of u probes.
ValidationReport validate_hypotheses(const ModelParams& p,
                                     std::vector<double> delta_grid = {},
                                     std::vector<Vec2> u_probe = {});

}  // namespace crossdiff
