// Acceptance suite: runs the project's seven acceptance criteria and prints
// one PASS/FAIL line per check. Exit status is the number of failed checks.
//
//   crossdiff_acceptance                 run everything
//   crossdiff_acceptance --criterion N   run criterion N only
//
// Criterion 5 integrates Simulation 1 to stationarity (about a minute);
// setting CROSSDIFF_ACCEPT_LONG=1 also runs Simulations 2 and 3 (much longer).

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "crossdiff/closed_form.hpp"
#include "crossdiff/fem.hpp"
#include "crossdiff/harness.hpp"
#include "crossdiff/model.hpp"
#include "crossdiff/stability.hpp"
#include "crossdiff/wna.hpp"

#include "oracles.hpp"

using namespace crossdiff;
using std::numbers::pi;

namespace {

int g_failures = 0;

void check(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %-44s %s\n", pass ? "PASS" : "FAIL", criterion,
                name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double rel(double ref, double got) { return std::abs(got - ref) / std::abs(ref); }

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Critical parameters: 0.95 delta_c within 2% of the reference rows,
//    integer k_c exact. Analytic, sub-second.
void criterion1() {
    for (const auto& ref : harness::reference_rows()) {
        const ModelParams p = builtin_example(Family::e1, ref.b, 0.0);
        const auto rep = stability::critical_pair(p);
        const double d95 = 0.95 * rep.delta_c;
        check(1, fmt("b=%.3g: 0.95*delta_c vs %.3g", ref.b, ref.delta),
              rel(ref.delta, d95) <= 0.02,
              fmt("got %.6g (rel %.2e)", d95, rel(ref.delta, d95)));
        check(1, fmt("b=%.3g: k_c == %d", ref.b, ref.k_c), rep.k_c == ref.k_c,
              fmt("got %d", rep.k_c));
    }
}

// ---------------------------------------------------------------------------
// 2. WNA amplitude within 5% of the reference column under at least one of the
//    two documented conventions; the matching one is recorded and fixed.
void criterion2() {
    bool sqrt_matches_all = true, ratio_matches_all = true;
    for (const auto& ref : harness::reference_rows()) {
        const ModelParams p = builtin_example(Family::e1, ref.b, 0.0);
        const auto exp = wna::build_expansion(p, 0.0, {});
        const double a_sqrt = std::sqrt(exp.sigma / exp.ell);
        const double a_ratio = exp.sigma / exp.ell;
        const bool s_ok = rel(ref.a_inf, a_sqrt) <= 0.05;
        const bool r_ok = rel(ref.a_inf, a_ratio) <= 0.05;
        sqrt_matches_all = sqrt_matches_all && s_ok;
        ratio_matches_all = ratio_matches_all && r_ok;
        check(2, fmt("b=%.3g: amplitude vs %.3g", ref.b, ref.a_inf), s_ok || r_ok,
              fmt("sqrt(sigma/ell)=%.4e (rel %.2e), sigma/ell=%.4e (rel %.2e)", a_sqrt,
                  rel(ref.a_inf, a_sqrt), a_ratio, rel(ref.a_inf, a_ratio)));
        // The library's reported a_inf must use the recorded convention.
        check(2, fmt("b=%.3g: reported a_inf uses it", ref.b), exp.a_inf == a_sqrt,
              fmt("a_inf=%.6e", exp.a_inf));
    }
    check(2, "matching convention recorded: sqrt(sigma/ell)",
          sqrt_matches_all && !ratio_matches_all,
          sqrt_matches_all ? "sqrt convention matches all rows" : "no uniform match");
}

// ---------------------------------------------------------------------------
// 3. Closed-form cross-checks at the continuous critical pair, 1e-8 relative.
void criterion3() {
    for (const auto& ref : harness::reference_rows()) {
        const double b = ref.b;
        const ModelParams p = builtin_example(Family::e1, b, 0.0);
        const double dc = stability::marginal_delta(p);
        const double ksq = stability::minimizer_ksq(p, dc);

        const double ksq_closed = closed_form::critical_ksq(b, dc);
        check(3, fmt("b=%.3g: k_c^2 closed form", b), rel(ksq_closed, ksq) <= 1e-8,
              fmt("numeric %.10g closed %.10g", ksq, ksq_closed));

        const auto [rho, eta] = wna::kernel_vectors(p, dc, ksq);
        const double Mc = closed_form::kernel_slope(b, dc, ksq);
        const double Mstc = closed_form::adjoint_slope(b, dc, ksq);
        check(3, fmt("b=%.3g: M", b), rel(Mc, rho.v2) <= 1e-8,
              fmt("numeric %.10g closed %.10g", rho.v2, Mc));
        check(3, fmt("b=%.3g: M*", b), rel(Mstc, eta.v2) <= 1e-8,
              fmt("numeric %.10g closed %.10g", eta.v2, Mstc));

        const auto so = wna::second_order_coeffs(p, dc, ksq, rho);
        const Vec2 v20c = closed_form::v20(b, rho.v2);
        const Vec2 v22c = closed_form::v22(b, dc, ksq);
        check(3, fmt("b=%.3g: v20", b),
              rel(v20c.v1, so.v20.v1) <= 1e-8 && rel(v20c.v2, so.v20.v2) <= 1e-8,
              fmt("numeric (%.8g, %.8g)", so.v20.v1, so.v20.v2));
        check(3, fmt("b=%.3g: v22", b),
              rel(v22c.v1, so.v22.v1) <= 1e-8 && rel(v22c.v2, so.v22.v2) <= 1e-8,
              fmt("numeric (%.8g, %.8g)", so.v22.v1, so.v22.v2));

        const double detl2_closed = closed_form::det_l2(b, dc, ksq);
        check(3, fmt("b=%.3g: det L2 identity", b), rel(detl2_closed, so.detL2) <= 1e-8,
              fmt("numeric %.10g closed %.10g", so.detL2, detl2_closed));
    }
}

// ---------------------------------------------------------------------------
// 4. Limit diagnostics along b -> 0.
void criterion4() {
    auto family = [](double b) { return builtin_example(Family::e1, b, 0.0); };
    const std::vector<double> bs = {1e-2, 3e-3, 1e-3, 3e-4};
    const auto rows = wna::limit_diagnostics(family, bs);
    for (const auto& r : rows)
        if (!r.ok) {
            check(4, fmt("row b=%.3g computes", r.b), false, r.error);
            return;
        }

    auto monotone_within = [&](const std::string& name, double target, double tol,
                               const std::function<double(const wna::LimitDiagnostics&)>& get) {
        bool monotone = true;
        for (std::size_t i = 1; i < rows.size(); ++i)
            monotone = monotone &&
                       std::abs(get(rows[i]) - target) < std::abs(get(rows[i - 1]) - target);
        const double last = get(rows.back());
        const double relerr = std::abs(last - target) / std::abs(target);
        check(4, name + " monotone in distance", monotone,
              fmt("values %.5g, %.5g, %.5g, %.5g", get(rows[0]), get(rows[1]), get(rows[2]),
                  get(rows[3])));
        check(4, name + fmt(" within %.0f%% at b=3e-4", tol * 100.0), relerr <= tol,
              fmt("got %.6g vs target %.6g (rel %.2e)", last, target, relerr));
    };

    monotone_within("k_c^2(1+M) -> -1", -1.0, 0.10,
                    [](const wna::LimitDiagnostics& r) { return r.kc_sq_eps_M; });
    monotone_within("k_c^2(1+2M*) -> 9", 9.0, 0.10,
                    [](const wna::LimitDiagnostics& r) { return r.kc_sq_one_plus_2Mstar; });
    monotone_within("k_c^2 delta_c (T.v22) -> 55/288", 55.0 / 288.0, 0.15,
                    [](const wna::LimitDiagnostics& r) { return r.T_combo; });

    bool g1_dec = true, a_dec = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        g1_dec = g1_dec && rows[i].g1_eta < rows[i - 1].g1_eta && rows[i].g1_eta > 0.0;
        a_dec = a_dec && rows[i].a_inf < rows[i - 1].a_inf && rows[i].a_inf > 0.0;
    }
    check(4, "<G1,eta> -> 0 decreasing", g1_dec,
          fmt("values %.3e .. %.3e", rows.front().g1_eta, rows.back().g1_eta));
    check(4, "A_inf -> 0 decreasing", a_dec,
          fmt("values %.3e .. %.3e", rows.front().a_inf, rows.back().a_inf));
}

// ---------------------------------------------------------------------------
// 5. FEM vs WNA on Simulation 1 (desk scale); 2-3 behind CROSSDIFF_ACCEPT_LONG.
void criterion5() {
    std::vector<int> sims = {1};
    if (const char* env = std::getenv("CROSSDIFF_ACCEPT_LONG");
        env && std::strcmp(env, "0") != 0) {
        sims.push_back(2);
        sims.push_back(3);
    }
    for (int sim : sims) {
        harness::RowSpec spec = harness::standard_row(sim);
        spec.max_steps = 20'000'000;
        const auto row = harness::run_row(spec);
        if (!row.ok) {
            check(5, fmt("sim%d completes", sim), false, row.error);
            continue;
        }
        check(5, fmt("sim%d reaches stationarity", sim), row.stationary,
              fmt("steps=%lld (tol_s=%.0e)", static_cast<long long>(row.steps), spec.tol_s));
        check(5, fmt("sim%d dominant mode == k_c", sim),
              row.dominant_mode == row.stab.k_c,
              fmt("mode %d vs k_c %d", row.dominant_mode, row.stab.k_c));
        check(5, fmt("sim%d RD2(FEM, WNA) <= 1e-4", sim), row.rd2_fem_wna <= 1e-4,
              fmt("RD2 = %.3e", row.rd2_fem_wna));
    }
}

// ---------------------------------------------------------------------------
// 6. Two-family comparison on Simulation-1 settings.
void criterion6() {
    harness::ExperimentConfig cfg;
    cfg.simulations = {1};
    cfg.run_fem = true;
    cfg.max_steps = 20'000'000;
    const auto rep = harness::experiment2(cfg);
    if (rep.comparisons.empty() || !rep.comparisons[0].ok) {
        check(6, "experiment 2 completes", false,
              rep.comparisons.empty() ? "no rows" : rep.comparisons[0].e1.error);
        return;
    }
    const auto& c = rep.comparisons[0];
    check(6, "RD_inf(delta_c) = 0.136 within 5%", rel(0.136, c.rd_inf_delta_c) <= 0.05,
          fmt("got %.4f", c.rd_inf_delta_c));
    auto decade = [](double ref, double got) {
        return got > 0.0 && std::abs(std::log10(got / ref)) <= 1.0;
    };
    check(6, "RD2(FEM states) ~ 3.74e-6 (1 decade)", decade(3.74e-6, c.rd2_u),
          fmt("got %.3e", c.rd2_u));
    check(6, "RD2(WNA profiles) ~ 3.46e-6 (1 decade)", decade(3.46e-6, c.rd2_v),
          fmt("got %.3e", c.rd2_v));
    check(6, "RD_inf(A_inf) ~ 2.90e-3 (1 decade)", decade(2.90e-3, c.rd_inf_a_inf),
          fmt("got %.3e", c.rd_inf_a_inf));
}

// ---------------------------------------------------------------------------
// 7. Property suite (no reference tables).
void criterion7() {
    // Equilibrium preservation through full steps.
    {
        const ModelParams p = builtin_example(Family::e1, 0.0385, 4.53e-5);
        const Vec2 us = coexistence_equilibrium(p);
        fem::SolverConfig cfg;
        cfg.n_nodes = 65;
        fem::FemState st =
            fem::make_initial_state(fem::InitialCondition::constant(us.v1, us.v2), p, cfg);
        for (int s = 0; s < 10; ++s) fem::advance(st, p, cfg);
        double dev = 0.0;
        for (int i = 0; i < cfg.n_nodes; ++i)
            dev = std::max({dev, std::abs(st.u1[i] - us.v1), std::abs(st.u2[i] - us.v2)});
        check(7, "equilibrium preserved by the scheme", dev <= 1e-13,
              fmt("max deviation %.2e", dev));

        const Vec2 r = reaction(p, us);
        check(7, "reaction(u*) = 0", std::abs(r.v1) <= 1e-15 && std::abs(r.v2) <= 1e-15,
              fmt("(%.2e, %.2e)", r.v1, r.v2));
    }

    // Dispersion equals the brute-force determinant.
    {
        const ModelParams p = builtin_example(Family::e1, 0.0385, 4.53e-5);
        const Vec2 us = coexistence_equilibrium(p);
        const Mat2 K = jacobian_K(p);
        const Mat2 D = diffusion_matrix(p, us);
        double worst = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double ksq = static_cast<double>(k) * k;
            const double ref = oracles::brute_force_dispersion(K, D, ksq);
            const Mat2 Ak = K - ksq * D;
            const double scale = std::abs(Ak.a11 * Ak.a22) + std::abs(Ak.a12 * Ak.a21);
            worst = std::max(worst,
                             std::abs(stability::dispersion(p, p.delta, ksq) - ref) / scale);
        }
        check(7, "dispersion vs brute-force determinant", worst <= 1e-12,
              fmt("worst rel %.2e over k=1..50 (determinant product scale)", worst));
    }

    // Fredholm projection of the order-2 forcing.
    {
        const ModelParams p = builtin_example(Family::e1, 0.0385, 0.0);
        const auto exp = wna::build_expansion(p, 0.0, {});
        const Vec2 us = coexistence_equilibrium(p);
        const Vec2 f1 = -exp.delta1 * exp.kc_sq * (diffusion_d1(p, us) * exp.rho);
        const Vec2 f0 = -0.25 * wna::m_form(p, exp.delta_c, 0, exp.kc_sq, exp.rho, exp.rho);
        const Vec2 f2 =
            -0.25 * wna::m_form(p, exp.delta_c, 2, exp.kc_sq, exp.rho, exp.rho) +
            exp.kc_sq * exp.rho.v1 * exp.rho.v2 * wna::gradient_coupling_vec(p, exp.delta_c);
        const double proj = std::abs(f1.dot(exp.eta));
        check(7, "Fredholm projection ~ 0", proj < 1e-10 * (f0.norm() + f2.norm()),
              fmt("projection %.2e", proj));
    }

    // Stuart-Landau exact solution vs an RK4 oracle.
    {
        const double sigma = 6.2658550702646646e-3, ell = 42.94631600423552;
        const double a0 = 0.1 * std::sqrt(sigma / ell);
        auto rhs = [&](double, double a) { return sigma * a - ell * a * a * a; };
        double worst = 0.0;
        for (double f : {0.1, 0.5, 1.0}) {
            const double t = f * 50.0 / sigma;
            const double ref = oracles::rk4(rhs, a0, 0.0, t, 400000);
            worst = std::max(worst, std::abs(wna::amplitude_at(sigma, ell, a0, t) - ref));
        }
        check(7, "amplitude vs ODE oracle <= 1e-8", worst <= 1e-8, fmt("worst %.2e", worst));
    }

    // Lumped inner product and total variation oracles.
    {
        const fem::Mesh mesh(201);
        std::vector<double> one(mesh.n_nodes, 1.0), cos3(mesh.n_nodes);
        for (int i = 0; i < mesh.n_nodes; ++i) cos3[i] = std::cos(3.0 * mesh.x(i));
        const double m = fem::lumped_inner_product(mesh, one, one);
        const double c = fem::lumped_inner_product(mesh, cos3, cos3);
        check(7, "lumped product oracles",
              std::abs(m - pi) < 1e-13 && std::abs(c - pi / 2) < 30.0 * mesh.h * mesh.h,
              fmt("(1,1)=%.15g, (cos3,cos3)=%.10g", m, c));

        fem::FemState st;
        st.u1 = cos3;
        const double tv = fem::total_variation(st);
        check(7, "total-variation oracle (cos, k=3)", std::abs(tv - 6.0) < 5e-3,
              fmt("TV %.6f vs 6", tv));
    }

    // Mesh refinement: stationary-state differences shrink like h^2.
    {
        auto stationary = [](int n_nodes) {
            harness::RowSpec spec = harness::standard_row(1);
            spec.n_nodes = n_nodes;
            spec.tau = 0.1;  // the discrete stationary state does not depend on tau
            spec.tol_s = 1e-10;
            spec.max_steps = 2'000'000;
            return harness::run_row(spec);
        };
        const auto a = stationary(65), b = stationary(129), c = stationary(257);
        if (!a.ok || !b.ok || !c.ok || !a.stationary || !b.stationary || !c.stationary) {
            check(7, "refinement runs complete", false, "a run failed or hit max_steps");
        } else {
            auto subsample_rd = [](const harness::RowResult& coarse,
                                   const harness::RowResult& fine) {
                const fem::Mesh mesh(coarse.spec.n_nodes);
                std::vector<double> f1(mesh.n_nodes), f2(mesh.n_nodes);
                for (int i = 0; i < mesh.n_nodes; ++i) {
                    f1[i] = fine.u1_fem[2 * i];
                    f2[i] = fine.u2_fem[2 * i];
                }
                return harness::relative_difference(mesh, coarse.u1_fem, coarse.u2_fem, f1,
                                                    f2, harness::Norm::l2);
            };
            const double e1 = subsample_rd(a, b);
            const double e2 = subsample_rd(b, c);
            const double ratio = e1 / e2;
            check(7, "mesh refinement ratio in [2.5, 6]", ratio >= 2.5 && ratio <= 6.0,
                  fmt("RD(65->129)=%.3e RD(129->257)=%.3e ratio %.2f", e1, e2, ratio));
        }
    }

    // Early-time growth/decay of the critical cosine mode vs the linear rate.
    {
        const double b = 0.2;  // larger rates keep the check fast
        const ModelParams p0 = builtin_example(Family::e1, b, 0.0);
        const auto rep = stability::critical_pair(p0);

        auto measured_rate = [&](double delta, double t0, double t1) {
            ModelParams p = p0;
            p.delta = delta;
            fem::SolverConfig cfg;
            cfg.n_nodes = 129;
            cfg.tau = 0.005;
            cfg.max_steps = static_cast<std::int64_t>(t1 / cfg.tau) + 1;
            cfg.tol_s = 0.0;  // run the full window
            cfg.snapshot_every = 0;
            const Vec2 us = coexistence_equilibrium(p);
            fem::FemState st = fem::make_initial_state(
                fem::InitialCondition::cosine(rep.k_c, 1e-6 * std::max(us.v1, us.v2)), p,
                cfg);
            double pv0 = 0.0;
            while (st.time < t1 - 0.5 * cfg.tau) {
                fem::advance(st, p, cfg);
                if (std::abs(st.time - t0) < 0.49 * cfg.tau)
                    pv0 = fem::measure_amplitude(st, us, rep.k_c).projection;
            }
            const double pv1 = fem::measure_amplitude(st, us, rep.k_c).projection;
            return std::log(std::abs(pv1 / pv0)) / (t1 - t0);
        };

        const double grow_pred = stability::growth_rate(p0, 0.5 * rep.delta_c, rep.k_c);
        const double grow_meas = measured_rate(0.5 * rep.delta_c, 20.0, 120.0);
        check(7, "below-threshold growth rate within 20%",
              grow_pred > 0.0 && rel(grow_pred, grow_meas) <= 0.20,
              fmt("predicted %.4e measured %.4e", grow_pred, grow_meas));

        const double decay_pred = stability::growth_rate(p0, 1.2 * rep.delta_bar_c, rep.k_c);
        const double decay_meas = measured_rate(1.2 * rep.delta_bar_c, 20.0, 120.0);
        check(7, "above-threshold decay rate within 20%",
              decay_pred < 0.0 && decay_meas < 0.0 && rel(decay_pred, decay_meas) <= 0.20,
              fmt("predicted %.4e measured %.4e", decay_pred, decay_meas));
    }

    // Above-threshold perturbations die out completely.
    {
        const ModelParams p0 = builtin_example(Family::e1, 0.0385, 0.0);
        const double dbar = stability::marginal_delta(p0);
        ModelParams p = p0;
        p.delta = 2.0 * dbar;
        fem::SolverConfig cfg;
        cfg.n_nodes = 65;
        cfg.tau = 0.02;
        cfg.tol_s = 0.0;  // fixed window; the property is the decay itself
        cfg.max_steps = 200000;
        cfg.snapshot_every = 0;
        const auto sum =
            fem::run_to_stationary(fem::InitialCondition::cosine(10, 1e-3), p, cfg, 10);
        const Vec2 us = coexistence_equilibrium(p);
        double dev = 0.0;
        for (std::size_t i = 0; i < sum.final_state.u1.size(); ++i)
            dev = std::max({dev, std::abs(sum.final_state.u1[i] - us.v1),
                            std::abs(sum.final_state.u2[i] - us.v2)});
        check(7, "above-threshold decay to u*", dev < 1e-8,
              fmt("deviation %.2e after %lld steps", dev,
                  static_cast<long long>(sum.steps)));
    }
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            only = std::atoi(argv[++i]);
    }
    const std::function<void()> criteria[] = {criterion1, criterion2, criterion3, criterion4,
                                              criterion5, criterion6, criterion7};
    for (int c = 1; c <= 7; ++c) {
        if (only != 0 && only != c) continue;
        criteria[c - 1]();
    }
    if (g_failures == 0)
        std::printf("acceptance: all checks passed\n");
    else
        std::printf("acceptance: %d check(s) FAILED\n", g_failures);
    return g_failures > 125 ? 125 : g_failures;
}
