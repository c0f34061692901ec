#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crossdiff/fem.hpp"
#include "crossdiff/model.hpp"
#include "crossdiff/stability.hpp"
#include "crossdiff/wna.hpp"

namespace crossdiff::harness {

enum class Norm { l2, linf };

/// RD_p(a, b) = |a - b| / |a| for scalars. Throws invalid_argument_error when
/// the first argument vanishes.
double relative_difference(double a, double b);

/// RD_p of a single nodal field (lumped L2 or max norm).
double relative_difference(const fem::Mesh& mesh, std::span<const double> f1,
                           std::span<const double> f2, Norm p);

/// RD_p of the stacked two-species state.
double relative_difference(const fem::Mesh& mesh, std::span<const double> u1a,
                           std::span<const double> u2a, std::span<const double> u1b,
                           std::span<const double> u2b, Norm p);

/// One pipeline row: stability -> WNA -> FEM on a single parameter point.
struct RowSpec {
    std::string id = "row";
    Family family = Family::e1;
    double b = 3.85e-2;
    double delta_factor = 0.95;          // delta = delta_factor * delta_c
    std::optional<double> delta_abs;     // explicit delta overrides the factor
    int n_nodes = 128;
    double tau = 0.01;
    double tol_fp = 1e-7;
    double tol_s = 1e-12;
    std::int64_t max_steps = 3'000'000;
    int snapshot_every = 1000;
    double ic_amp_rel = 1e-3;  // cosine amplitude relative to ||u*||_inf
    std::uint64_t seed = 0;    // seed for noise initial data (cosine rows ignore it)
    bool noise_ic = false;
    stability::Convention convention = stability::Convention::marginal_nearest_integer;
    bool run_fem = true;

    std::string canonical_string() const;
};

struct RowResult {
    RowSpec spec;
    bool ok = false;
    std::string error;

    stability::StabilityReport stab;
    double delta = 0.0;
    bool above_threshold = false;  // delta >= delta_c: no pattern predicted
    bool has_expansion = false;
    wna::WnaExpansion exp;

    bool fem_ran = false;
    bool stationary = false;
    std::int64_t steps = 0;
    double rd2_fem_wna = 0.0;  // sign-aligned stacked RD_2 (0 when not computed)
    int profile_sign = +1;     // sign of the first-order term matching the FEM state
    double tv_stationary = 0.0;
    double amp_projection = 0.0;
    double amp_half_range = 0.0;
    int dominant_mode = 0;
    double min_density = 0.0;
    double final_dev_inf = 0.0;  // ||u - u*||_inf of the final state
    std::vector<fem::Snapshot> series;
    std::vector<double> x, u1_fem, u2_fem, u1_wna, u2_wna;

    std::string config_hash;
};

/// Runs one row; never throws, failures are recorded in the result.
RowResult run_row(const RowSpec& spec);

/// Runs rows on a bounded worker pool. jobs = 0 resolves to the CROSSDIFF_JOBS
/// environment variable, then to the hardware concurrency.
std::vector<RowResult> run_rows(const std::vector<RowSpec>& specs, int jobs = 0);

struct ExperimentConfig {
    std::vector<int> simulations = {1, 2, 3};  // which standard rows to run
    std::string out_dir;
    int jobs = 0;
    bool check = false;
    bool run_fem = true;
    std::int64_t max_steps = 3'000'000;
    stability::Convention convention = stability::Convention::marginal_nearest_integer;
};

struct ExperimentReport {
    std::vector<RowResult> rows;
    bool ok = false;            // all rows completed
    bool check_passed = true;   // assertions in check mode
    std::vector<std::string> messages;
};

/// Reference values for the three standard simulations (delta = 0.95 delta_c).
struct ReferenceRow {
    int sim;
    double b;
    double delta;   // 0.95 delta_c, 3 significant digits
    int k_c;
    double a_inf;
    int n_nodes;
};
const std::vector<ReferenceRow>& reference_rows();

/// Standard simulation row -> RowSpec (family e1 unless overridden).
RowSpec standard_row(int sim, Family family = Family::e1);

/// Experiment 1: the three standard simulations with the e1 family; emits
/// per-row directories, an aggregate report.csv and pattern/amplitude/TV
/// series for plotting.
ExperimentReport experiment1(const ExperimentConfig& cfg);

struct FamilyComparison {
    int sim = 0;
    RowResult e1, e2;
    double rd_inf_delta_c = 0.0;
    double rd2_u = 0.0;      // FEM stationary states
    double rd2_v = 0.0;      // WNA profiles
    double rd_inf_a_inf = 0.0;
    bool ok = false;
};

struct Experiment2Report {
    std::vector<FamilyComparison> comparisons;
    bool ok = false;
    bool check_passed = true;
    std::vector<std::string> messages;
};

/// Experiment 2: reruns the standard rows with both diffusion families and
/// reports the cross-family relative differences.
Experiment2Report experiment2(const ExperimentConfig& cfg);

struct SweepConfig {
    std::vector<RowSpec> grid;
    std::string out_dir;
    int jobs = 0;
};

/// Reads a sweep grid CSV with header
///   id,family,b,delta_factor[,delta,n_nodes,tau,tol_fp,tol_s,max_steps,ic,seed]
/// an empty delta_factor together with a delta column gives absolute deltas.
std::vector<RowSpec> parse_sweep_grid(const std::string& path);

ExperimentReport sweep(const SweepConfig& cfg);

/// Serializes a row result into <dir>/<id>/{summary.json,profile.csv,series.csv}.
void write_row_outputs(const std::string& dir, const RowResult& row);

/// Aggregate table mirroring the per-row summaries.
void write_report_csv(const std::string& path, const std::vector<RowResult>& rows);

}  // namespace crossdiff::harness
