#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crossdiff/model.hpp"

namespace crossdiff::fem {

/// Uniform mesh on [0, pi] with n nodes, h = pi / (n - 1).
struct Mesh {
    int n_nodes = 0;
    double h = 0.0;

    explicit Mesh(int n);
    double x(int i) const { return h * i; }
};

struct SolverConfig {
    int n_nodes = 128;
    double tau = 0.01;       // time step
    double tol_fp = 1e-7;    // fixed-point stopping tolerance
    double tol_s = 1e-12;    // stationarity tolerance
    int max_fp_iters = 200;
    std::int64_t max_steps = 10'000'000;
    int snapshot_every = 1000;
    bool euclidean_norms = false;  // nodal Euclidean instead of lumped L2 in both criteria
};

struct FemState {
    std::int64_t step = 0;
    double time = 0.0;
    std::vector<double> u1, u2;
    int last_fp_iters = 0;
    double last_first_iter_diff = 0.0;  // max-norm pair distance of the first iterate
};

struct InitialCondition {
    enum class Kind { equilibrium_plus_cosine, equilibrium_plus_noise, constant, custom };
    Kind kind = Kind::equilibrium_plus_noise;
    int k = 1;            // cosine mode
    double amp = 1e-3;    // perturbation amplitude (absolute)
    std::uint64_t seed = 0;
    double c1 = 1.0, c2 = 1.0;            // constant values
    std::vector<double> u1, u2;           // custom nodal arrays

    static InitialCondition cosine(int k, double amp);
    static InitialCondition noise(std::uint64_t seed, double amp);
    static InitialCondition constant(double c1, double c2);
    static InitialCondition custom(std::vector<double> u1, std::vector<double> u2);
};

/// Parses "cos:k=10,amp=1e-3", "noise:seed=7,amp=1e-3", "const:c1=1,c2=2" or
/// "file:PATH" (CSV with columns x,u1,u2).
InitialCondition parse_ic_spec(const std::string& spec);

/// Mass-lumped (trapezoidal) inner product: weights h/2 at the ends, h inside.
double lumped_inner_product(const Mesh& mesh, std::span<const double> f,
                            std::span<const double> g);

/// Discrete norm used by the stopping criteria (lumped L2 by default).
double stopping_norm(const Mesh& mesh, std::span<const double> f, bool euclidean);

/// Builds the nodal state at t = 0. Throws invalid_argument_error if the
/// resulting field has a non-positive component.
FemState make_initial_state(const InitialCondition& ic, const ModelParams& p,
                            const SolverConfig& cfg);

/// One linearized step: diffusion coefficients and the reaction factor are
/// frozen at `iterate`, the new nodal pair solves the coupled 2N banded system.
std::pair<std::vector<double>, std::vector<double>> fixed_point_step(
    const FemState& prev, const std::pair<std::vector<double>, std::vector<double>>& iterate,
    const ModelParams& p, const SolverConfig& cfg);

/// Advances one time slice: fixed-point iterations from the previous state
/// until the pair distance drops below tol_fp. Throws solver_error on
/// divergence (iteration cap or norm blow-up).
void advance(FemState& state, const ModelParams& p, const SolverConfig& cfg);

struct Snapshot {
    std::int64_t step = 0;
    double time = 0.0;
    double amplitude_proj = 0.0;   // cosine-mode projection (monitor mode)
    double amplitude_range = 0.0;  // (max - min)/2 of u1
    double tv1 = 0.0;              // total variation of u1
    double min_u = 0.0;            // min nodal density over both species
    int fp_iters = 0;
    double step_diff = 0.0;        // stationarity indicator of this step
};

struct RunSummary {
    FemState final_state;
    bool stationary = false;
    std::int64_t steps = 0;
    std::vector<Snapshot> series;
    double min_density = 0.0;  // overall minimum nodal value seen
};

/// Integrates until the first-iterate step difference drops below tol_s, or
/// max_steps is reached (summary flagged non-stationary, not an error).
/// monitor_mode selects the cosine mode tracked in the amplitude series
/// (0 disables the projection).
RunSummary run_to_stationary(const InitialCondition& ic, const ModelParams& p,
                             const SolverConfig& cfg, int monitor_mode = 0);

/// Exact total variation of the piecewise-linear interpolant of u1.
double total_variation(const FemState& state);
double total_variation_of(std::span<const double> f);

struct AmplitudeEstimate {
    double projection = 0.0;  // 2/pi (u1 - u1*, cos(k .))^h
    double half_range = 0.0;  // (max u1 - min u1) / 2
};

AmplitudeEstimate measure_amplitude(const FemState& state, const Vec2& u_star, int k_c);

}  // namespace crossdiff::fem
