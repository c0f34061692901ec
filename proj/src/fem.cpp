#include "crossdiff/fem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "crossdiff/banded.hpp"
#include "crossdiff/errors.hpp"

namespace crossdiff::fem {

Mesh::Mesh(int n) : n_nodes(n) {
    if (n < 3) throw invalid_argument_error("Mesh: need at least 3 nodes");
    h = std::numbers::pi / (n - 1);
}

InitialCondition InitialCondition::cosine(int k, double amp) {
    InitialCondition ic;
    ic.kind = Kind::equilibrium_plus_cosine;
    ic.k = k;
    ic.amp = amp;
    return ic;
}

InitialCondition InitialCondition::noise(std::uint64_t seed, double amp) {
    InitialCondition ic;
    ic.kind = Kind::equilibrium_plus_noise;
    ic.seed = seed;
    ic.amp = amp;
    return ic;
}

InitialCondition InitialCondition::constant(double c1, double c2) {
    InitialCondition ic;
    ic.kind = Kind::constant;
    ic.c1 = c1;
    ic.c2 = c2;
    return ic;
}

InitialCondition InitialCondition::custom(std::vector<double> u1, std::vector<double> u2) {
    InitialCondition ic;
    ic.kind = Kind::custom;
    ic.u1 = std::move(u1);
    ic.u2 = std::move(u2);
    return ic;
}

namespace {

std::vector<std::pair<std::string, std::string>> parse_kv_list(const std::string& s) {
    std::vector<std::pair<std::string, std::string>> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw invalid_argument_error("initial-condition spec: expected key=value in '" +
                                         item + "'");
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    return out;
}

}  // namespace

InitialCondition parse_ic_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string tail = colon == std::string::npos ? "" : spec.substr(colon + 1);

    if (head == "file") {
        std::ifstream in(tail);
        if (!in) throw invalid_argument_error("initial condition file not readable: " + tail);
        std::vector<double> u1, u2;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("x,", 0) == 0) continue;
            double x, a, b;
            char c1, c2;
            std::stringstream ls(line);
            if (ls >> x >> c1 >> a >> c2 >> b) {
                u1.push_back(a);
                u2.push_back(b);
            }
        }
        if (u1.empty())
            throw invalid_argument_error("initial condition file has no data rows: " + tail);
        return InitialCondition::custom(std::move(u1), std::move(u2));
    }

    InitialCondition ic;
    if (head == "cos")
        ic.kind = InitialCondition::Kind::equilibrium_plus_cosine;
    else if (head == "noise")
        ic.kind = InitialCondition::Kind::equilibrium_plus_noise;
    else if (head == "const")
        ic.kind = InitialCondition::Kind::constant;
    else
        throw invalid_argument_error("unknown initial-condition kind '" + head +
                                     "' (expected cos|noise|const|file)");
    for (const auto& [key, val] : parse_kv_list(tail)) {
        if (key == "k") ic.k = std::stoi(val);
        else if (key == "amp") ic.amp = std::stod(val);
        else if (key == "seed") ic.seed = std::stoull(val);
        else if (key == "c1") ic.c1 = std::stod(val);
        else if (key == "c2") ic.c2 = std::stod(val);
        else throw invalid_argument_error("unknown initial-condition key '" + key + "'");
    }
    return ic;
}

double lumped_inner_product(const Mesh& mesh, std::span<const double> f,
                            std::span<const double> g) {
    if (static_cast<int>(f.size()) != mesh.n_nodes || f.size() != g.size())
        throw invalid_argument_error("lumped_inner_product: field/mesh size mismatch");
    const int n = mesh.n_nodes;
    double s = 0.5 * (f[0] * g[0] + f[n - 1] * g[n - 1]);
    for (int i = 1; i < n - 1; ++i) s += f[i] * g[i];
    return s * mesh.h;
}

double stopping_norm(const Mesh& mesh, std::span<const double> f, bool euclidean) {
    if (euclidean) {
        double s = 0.0;
        for (double v : f) s += v * v;
        return std::sqrt(s);
    }
    return std::sqrt(lumped_inner_product(mesh, f, f));
}

FemState make_initial_state(const InitialCondition& ic, const ModelParams& p,
                            const SolverConfig& cfg) {
    const Mesh mesh(cfg.n_nodes);
    FemState st;
    st.u1.resize(mesh.n_nodes);
    st.u2.resize(mesh.n_nodes);

    switch (ic.kind) {
        case InitialCondition::Kind::equilibrium_plus_cosine: {
            const Vec2 us = coexistence_equilibrium(p);
            for (int i = 0; i < mesh.n_nodes; ++i) {
                const double c = ic.amp * std::cos(ic.k * mesh.x(i));
                st.u1[i] = us.v1 + c;
                st.u2[i] = us.v2 + c;
            }
            break;
        }
        case InitialCondition::Kind::equilibrium_plus_noise: {
            const Vec2 us = coexistence_equilibrium(p);
            std::mt19937_64 rng(ic.seed);
            std::uniform_real_distribution<double> dist(-ic.amp, ic.amp);
            for (int i = 0; i < mesh.n_nodes; ++i) {
                st.u1[i] = us.v1 + dist(rng);
                st.u2[i] = us.v2 + dist(rng);
            }
            break;
        }
        case InitialCondition::Kind::constant:
            std::fill(st.u1.begin(), st.u1.end(), ic.c1);
            std::fill(st.u2.begin(), st.u2.end(), ic.c2);
            break;
        case InitialCondition::Kind::custom:
            if (static_cast<int>(ic.u1.size()) != mesh.n_nodes ||
                static_cast<int>(ic.u2.size()) != mesh.n_nodes)
                throw invalid_argument_error(
                    "custom initial condition size does not match the mesh");
            st.u1 = ic.u1;
            st.u2 = ic.u2;
            break;
    }
    for (int i = 0; i < mesh.n_nodes; ++i)
        if (!(st.u1[i] > 0.0) || !(st.u2[i] > 0.0))
            throw invalid_argument_error("initial condition is not componentwise positive");
    return st;
}

std::pair<std::vector<double>, std::vector<double>> fixed_point_step(
    const FemState& prev, const std::pair<std::vector<double>, std::vector<double>>& iterate,
    const ModelParams& p, const SolverConfig& cfg) {
    const Mesh mesh(cfg.n_nodes);
    const int n = mesh.n_nodes;
    const auto& it1 = iterate.first;
    const auto& it2 = iterate.second;
    if (static_cast<int>(it1.size()) != n || static_cast<int>(it2.size()) != n ||
        static_cast<int>(prev.u1.size()) != n)
        throw invalid_argument_error("fixed_point_step: field/mesh size mismatch");
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(it1[i]) || !std::isfinite(it2[i]))
            throw solver_error("fixed_point_step: non-finite iterate");

    // Unknowns interleaved per node: (u1_0, u2_0, u1_1, u2_1, ...).
    BandedMatrix A(2 * n, 3, 3);
    std::vector<double> rhs(2 * n, 0.0);

    // Frozen diffusion coefficients at the iterate, averaged per element.
    std::vector<Mat2> dnode(n);
    for (int i = 0; i < n; ++i)
        dnode[i] = diffusion_matrix_at(p, {it1[i], it2[i]}, p.delta);

    const double inv_h = 1.0 / mesh.h;
    for (int e = 0; e < n - 1; ++e) {
        const Mat2 de = 0.5 * (dnode[e] + dnode[e + 1]);
        const double dcoef[2][2] = {{de.a11, de.a12}, {de.a21, de.a22}};
        for (int a = 0; a < 2; ++a) {      // test node within element
            for (int b = 0; b < 2; ++b) {  // trial node within element
                const double grad = (a == b ? 1.0 : -1.0) * inv_h;
                for (int s = 0; s < 2; ++s)      // test species
                    for (int m = 0; m < 2; ++m)  // trial species
                        A.at(2 * (e + a) + s, 2 * (e + b) + m) += dcoef[s][m] * grad;
            }
        }
    }

    // Lumped mass, reaction linearization and right-hand side.
    const Mat2& B = p.beta;
    for (int i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 * mesh.h : mesh.h;
        const double g1 = p.alpha[0] - B.a11 * it1[i] - B.a12 * it2[i];
        const double g2 = p.alpha[1] - B.a21 * it1[i] - B.a22 * it2[i];
        A.at(2 * i, 2 * i) += w * (1.0 / cfg.tau - g1);
        A.at(2 * i + 1, 2 * i + 1) += w * (1.0 / cfg.tau - g2);
        rhs[2 * i] = w / cfg.tau * prev.u1[i];
        rhs[2 * i + 1] = w / cfg.tau * prev.u2[i];
    }

    A.factorize();
    A.solve(rhs);

    std::vector<double> u1(n), u2(n);
    for (int i = 0; i < n; ++i) {
        u1[i] = rhs[2 * i];
        u2[i] = rhs[2 * i + 1];
    }
    return {std::move(u1), std::move(u2)};
}

void advance(FemState& state, const ModelParams& p, const SolverConfig& cfg) {
    const Mesh mesh(cfg.n_nodes);
    std::pair<std::vector<double>, std::vector<double>> iterate{state.u1, state.u2};
    std::vector<double> diff(mesh.n_nodes);

    int k = 0;
    while (true) {
        ++k;
        auto next = fixed_point_step(state, iterate, p, cfg);
        double n1, n2;
        for (int i = 0; i < mesh.n_nodes; ++i) diff[i] = next.first[i] - iterate.first[i];
        n1 = stopping_norm(mesh, diff, cfg.euclidean_norms);
        for (int i = 0; i < mesh.n_nodes; ++i) diff[i] = next.second[i] - iterate.second[i];
        n2 = stopping_norm(mesh, diff, cfg.euclidean_norms);
        const double d = std::max(n1, n2);
        if (k == 1) {
            // First-iterate distance to the previous time slice drives the
            // stationarity criterion.
            state.last_first_iter_diff = d;
        }
        iterate = std::move(next);

        double mx = 0.0;
        for (int i = 0; i < mesh.n_nodes; ++i)
            mx = std::max({mx, std::abs(iterate.first[i]), std::abs(iterate.second[i])});
        if (!std::isfinite(d) || mx > 1e12)
            throw solver_error("advance: fixed-point iteration blew up at step " +
                               std::to_string(state.step + 1));
        if (d < cfg.tol_fp) break;
        if (k >= cfg.max_fp_iters)
            throw solver_error("advance: fixed-point iteration did not converge in " +
                               std::to_string(cfg.max_fp_iters) + " iterations");
    }

    state.u1 = std::move(iterate.first);
    state.u2 = std::move(iterate.second);
    state.step += 1;
    state.time = static_cast<double>(state.step) * cfg.tau;
    state.last_fp_iters = k;
}

double total_variation_of(std::span<const double> f) {
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) tv += std::abs(f[i + 1] - f[i]);
    return tv;
}

double total_variation(const FemState& state) { return total_variation_of(state.u1); }

AmplitudeEstimate measure_amplitude(const FemState& state, const Vec2& u_star, int k_c) {
    const int n = static_cast<int>(state.u1.size());
    const Mesh mesh(n);
    std::vector<double> dev(n), cosk(n);
    for (int i = 0; i < n; ++i) {
        dev[i] = state.u1[i] - u_star.v1;
        cosk[i] = std::cos(k_c * mesh.x(i));
    }
    AmplitudeEstimate est;
    est.projection = 2.0 / std::numbers::pi * lumped_inner_product(mesh, dev, cosk);
    const auto [mn, mx] = std::minmax_element(state.u1.begin(), state.u1.end());
    est.half_range = 0.5 * (*mx - *mn);
    return est;
}

RunSummary run_to_stationary(const InitialCondition& ic, const ModelParams& p,
                             const SolverConfig& cfg, int monitor_mode) {
    RunSummary sum;
    FemState state = make_initial_state(ic, p, cfg);
    const Vec2 us = coexistence_equilibrium(p);
    sum.min_density = std::min(*std::min_element(state.u1.begin(), state.u1.end()),
                               *std::min_element(state.u2.begin(), state.u2.end()));

    auto snapshot = [&](const FemState& st) {
        Snapshot s;
        s.step = st.step;
        s.time = st.time;
        if (monitor_mode > 0)
            s.amplitude_proj = measure_amplitude(st, us, monitor_mode).projection;
        s.amplitude_range = measure_amplitude(st, us, std::max(monitor_mode, 1)).half_range;
        s.tv1 = total_variation(st);
        const double m1 = *std::min_element(st.u1.begin(), st.u1.end());
        const double m2 = *std::min_element(st.u2.begin(), st.u2.end());
        s.min_u = std::min(m1, m2);
        s.fp_iters = st.last_fp_iters;
        s.step_diff = st.last_first_iter_diff;
        return s;
    };
    sum.series.push_back(snapshot(state));

    while (state.step < cfg.max_steps) {
        advance(state, p, cfg);
        const double m1 = *std::min_element(state.u1.begin(), state.u1.end());
        const double m2 = *std::min_element(state.u2.begin(), state.u2.end());
        sum.min_density = std::min({sum.min_density, m1, m2});
        if (cfg.snapshot_every > 0 && state.step % cfg.snapshot_every == 0)
            sum.series.push_back(snapshot(state));
        if (state.last_first_iter_diff < cfg.tol_s) {
            sum.stationary = true;
            break;
        }
    }
    if (sum.series.empty() || sum.series.back().step != state.step)
        sum.series.push_back(snapshot(state));
    sum.steps = state.step;
    sum.final_state = std::move(state);
    return sum;
}

}  // namespace crossdiff::fem
