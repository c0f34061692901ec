#include "crossdiff/model.hpp"

#include <algorithm>
#include <cmath>

#include "crossdiff/errors.hpp"
#include "crossdiff/stability.hpp"

namespace crossdiff {

std::string family_name(Family f) {
    switch (f) {
        case Family::e1: return "e1";
        case Family::e2: return "e2";
        case Family::bt_limit: return "bt-limit";
        case Family::custom: return "custom";
    }
    return "custom";
}

Family family_from_name(const std::string& name) {
    if (name == "e1") return Family::e1;
    if (name == "e2") return Family::e2;
    if (name == "bt-limit" || name == "bt_limit") return Family::bt_limit;
    if (name == "custom") return Family::custom;
    throw config_error("unknown diffusion family '" + name + "'");
}

namespace {

DiffusionTensor tensor_e1() {
    DiffusionTensor t;
    t(0, 0, 0, 0) = 1.0;  // d11 = (1+delta) u1
    t(0, 0, 0, 1) = 1.0;
    t(0, 1, 0, 0) = 1.0;  // d12 = u1
    t(1, 0, 1, 0) = 1.0;  // d21 = u2
    t(1, 1, 1, 0) = 1.0;  // d22 = (1+delta) u2
    t(1, 1, 1, 1) = 1.0;
    return t;
}

DiffusionTensor tensor_e2() {
    DiffusionTensor t;
    t(0, 0, 0, 0) = 1.0;  // d11 = (1+delta) u1 + delta/2 u2
    t(0, 0, 0, 1) = 1.0;
    t(0, 0, 1, 1) = 0.5;
    t(0, 1, 0, 0) = 1.0;  // d12 = (1+delta/2) u1
    t(0, 1, 0, 1) = 0.5;
    t(1, 0, 1, 0) = 1.0;  // d21 = (1+delta/2) u2
    t(1, 0, 1, 1) = 0.5;
    t(1, 1, 0, 1) = 0.5;  // d22 = delta/2 u1 + (1+delta) u2
    t(1, 1, 1, 0) = 1.0;
    t(1, 1, 1, 1) = 1.0;
    return t;
}

}  // namespace

ModelParams builtin_example(Family which, double b, double delta) {
    if (!(b >= 0.0 && b < 0.5))
        throw invalid_argument_error(
            "builtin_example: b must lie in [0, 1/2), got b = " + std::to_string(b));
    if (delta < 0.0)
        throw invalid_argument_error("builtin_example: delta must be >= 0");

    ModelParams p;
    p.alpha = {1.0, 4.0};
    p.beta = {1.0, b / 2.0, 2.0, 1.0};
    p.b = b;
    p.family = which;
    switch (which) {
        case Family::e1:
            p.dtensor = tensor_e1();
            p.delta = delta;
            break;
        case Family::e2:
            p.dtensor = tensor_e2();
            p.delta = delta;
            break;
        case Family::bt_limit:
            p.dtensor = tensor_e1();
            p.delta = 0.0;
            break;
        case Family::custom:
            throw invalid_argument_error("builtin_example: 'custom' is not a built-in family");
    }
    return p;
}

Vec2 coexistence_equilibrium(const ModelParams& p) {
    const Mat2& B = p.beta;
    const double det = B.det();
    const double n1 = B.a22 * p.alpha[0] - B.a12 * p.alpha[1];
    const double n2 = B.a11 * p.alpha[1] - B.a21 * p.alpha[0];
    if (!(n1 > 0.0) || !(n2 > 0.0) || !(det > 0.0))
        throw invalid_argument_error(
            "coexistence_equilibrium: competition conditions violated "
            "(need b22*a1 - b12*a2 > 0, b11*a2 - b21*a1 > 0, det(B) > 0)");
    return {n1 / det, n2 / det};
}

Mat2 diffusion_matrix_at(const ModelParams& p, const Vec2& u, double delta) {
    Mat2 D;
    auto entry = [&](int i, int j) {
        return p.dtensor(i, j, 0, 0) * u.v1 + p.dtensor(i, j, 0, 1) * u.v1 * delta +
               p.dtensor(i, j, 1, 0) * u.v2 + p.dtensor(i, j, 1, 1) * u.v2 * delta;
    };
    D.a11 = entry(0, 0);
    D.a12 = entry(0, 1);
    D.a21 = entry(1, 0);
    D.a22 = entry(1, 1);
    return D;
}

Mat2 diffusion_matrix(const ModelParams& p, const Vec2& u) {
    return diffusion_matrix_at(p, u, p.delta);
}

Mat2 diffusion_d0(const ModelParams& p, const Vec2& u) {
    Mat2 D;
    D.a11 = p.dtensor(0, 0, 0, 0) * u.v1 + p.dtensor(0, 0, 1, 0) * u.v2;
    D.a12 = p.dtensor(0, 1, 0, 0) * u.v1 + p.dtensor(0, 1, 1, 0) * u.v2;
    D.a21 = p.dtensor(1, 0, 0, 0) * u.v1 + p.dtensor(1, 0, 1, 0) * u.v2;
    D.a22 = p.dtensor(1, 1, 0, 0) * u.v1 + p.dtensor(1, 1, 1, 0) * u.v2;
    return D;
}

Mat2 diffusion_d1(const ModelParams& p, const Vec2& u) {
    Mat2 D;
    D.a11 = p.dtensor(0, 0, 0, 1) * u.v1 + p.dtensor(0, 0, 1, 1) * u.v2;
    D.a12 = p.dtensor(0, 1, 0, 1) * u.v1 + p.dtensor(0, 1, 1, 1) * u.v2;
    D.a21 = p.dtensor(1, 0, 0, 1) * u.v1 + p.dtensor(1, 0, 1, 1) * u.v2;
    D.a22 = p.dtensor(1, 1, 0, 1) * u.v1 + p.dtensor(1, 1, 1, 1) * u.v2;
    return D;
}

Mat2 diffusion_species_matrix(const ModelParams& p, int m, double delta) {
    if (m != 1 && m != 2)
        throw invalid_argument_error("diffusion_species_matrix: m must be 1 or 2");
    const int mi = m - 1;
    Mat2 D;
    D.a11 = p.dtensor(0, 0, mi, 0) + delta * p.dtensor(0, 0, mi, 1);
    D.a12 = p.dtensor(0, 1, mi, 0) + delta * p.dtensor(0, 1, mi, 1);
    D.a21 = p.dtensor(1, 0, mi, 0) + delta * p.dtensor(1, 0, mi, 1);
    D.a22 = p.dtensor(1, 1, mi, 0) + delta * p.dtensor(1, 1, mi, 1);
    return D;
}

Vec2 reaction(const ModelParams& p, const Vec2& u) {
    const Mat2& B = p.beta;
    return {u.v1 * (p.alpha[0] - B.a11 * u.v1 - B.a12 * u.v2),
            u.v2 * (p.alpha[1] - B.a21 * u.v1 - B.a22 * u.v2)};
}

Mat2 jacobian_K(const ModelParams& p) {
    const Vec2 us = coexistence_equilibrium(p);
    const Mat2& B = p.beta;
    return {-B.a11 * us.v1, -B.a12 * us.v1, -B.a21 * us.v2, -B.a22 * us.v2};
}

const ValidationClause* ValidationReport::find(const std::string& name) const {
    for (const auto& c : clauses)
        if (c.name == name) return &c;
    return nullptr;
}

ValidationReport validate_hypotheses(const ModelParams& p, std::vector<double> delta_grid,
                                     std::vector<Vec2> u_probe) {
    if (delta_grid.empty()) {
        delta_grid.push_back(0.0);
        for (double e = -6.0; e <= 0.0; e += 0.5) delta_grid.push_back(std::pow(10.0, e));
    }
    if (u_probe.empty()) {
        for (double a : {0.1, 0.5, 1.0, 2.0, 10.0})
            for (double c : {0.1, 0.5, 1.0, 2.0, 10.0}) u_probe.push_back({a, c});
    }
    std::sort(delta_grid.begin(), delta_grid.end());

    ValidationReport rep;
    auto add = [&rep](std::string name, bool pass, double margin) {
        rep.clauses.push_back({std::move(name), pass, margin});
    };

    // H_D 1: coefficient non-negativity.
    double min_coeff = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int m = 0; m < 2; ++m)
                for (int n = 0; n < 2; ++n) min_coeff = std::min(min_coeff, p.dtensor(i, j, m, n));
    add("coefficients_nonnegative", min_coeff >= 0.0, min_coeff);

    // H_D 2: positive diagonal and determinant for delta > 0, monotone det in delta.
    double min_diag = std::numeric_limits<double>::infinity();
    double min_det = std::numeric_limits<double>::infinity();
    double min_det_increment = std::numeric_limits<double>::infinity();
    for (const Vec2& u : u_probe) {
        double prev_det = -std::numeric_limits<double>::infinity();
        for (double d : delta_grid) {
            const Mat2 D = diffusion_matrix_at(p, u, d);
            if (d > 0.0) {
                min_diag = std::min({min_diag, D.a11, D.a22});
                min_det = std::min(min_det, D.det());
            }
            if (prev_det > -std::numeric_limits<double>::infinity())
                min_det_increment = std::min(min_det_increment, D.det() - prev_det);
            prev_det = D.det();
        }
    }
    add("diagonal_positive", min_diag > 0.0, min_diag);
    add("det_positive", min_det > 0.0, min_det);
    add("det_increasing_in_delta", min_det_increment > 0.0, min_det_increment);

    // Competition conditions (strict except the trace).
    const Mat2& B = p.beta;
    const double c1 = B.a22 * p.alpha[0] - B.a12 * p.alpha[1];
    const double c2 = B.a11 * p.alpha[1] - B.a21 * p.alpha[0];
    add("b22a1_minus_b12a2_positive", c1 > 0.0, c1);
    add("b11a2_minus_b21a1_positive", c2 > 0.0, c2);
    add("detB_positive", B.det() > 0.0, B.det());
    add("trB_nonnegative", B.trace() >= 0.0, B.trace());

    // Instability precondition at the stored delta: q_delta(u*) < 0, equivalently
    // tr(K^{-1} D(u*)) > 0.
    if (c1 > 0.0 && c2 > 0.0 && B.det() > 0.0) {
        const double q = stability::q_delta(p, p.delta);
        add("q_delta_negative", q < 0.0, -q);
        const Mat2 K = jacobian_K(p);
        const Mat2 D = diffusion_matrix(p, coexistence_equilibrium(p));
        // tr(K^{-1} D) = (k22 d11 - k12 d21 - k21 d12 + k11 d22) / det K
        const double tr_kinv_d =
            (K.a22 * D.a11 - K.a12 * D.a21 - K.a21 * D.a12 + K.a11 * D.a22) / K.det();
        add("tr_Kinv_D_positive", tr_kinv_d > 0.0, tr_kinv_d);
    } else {
        add("q_delta_negative", false, 0.0);
        add("tr_Kinv_D_positive", false, 0.0);
    }

    return rep;
}

}  // namespace crossdiff
