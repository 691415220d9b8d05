#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aet/boundary.hpp"
#include "aet/field.hpp"
#include "aet/perturb.hpp"
#include "aet/recon.hpp"

namespace aet {

inline constexpr double default_data_h = 0.0125;
inline constexpr double default_recon_h = 1.0 / 62.0;

struct ExperimentConfig {
    std::string phantom = "sigma2";
    PairFamily family = PairFamily::adapted;
    int gamma_index = 8;
    double data_h = default_data_h;
    double recon_h = default_recon_h;
    double alpha = 0.0;
    std::uint64_t seed = 50;
    double floor_L = 1e-6;
    NoiseNorm noise_norm = NoiseNorm::euclidean;
    double f_clamp_percentile = 0.0;
    std::string out_dir;  // empty: no files written

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    /// Unique, filesystem-safe run name, e.g. "sigma2_adapted_g8_a0_s50".
    std::string label() const;
};

/// Applies one `key = value` entry. Keys: phantom, family, gamma, alpha, seed,
/// floor, data_h, recon_h, out, noise_norm, f_clamp.
void apply_config_entry(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Reads a line-based key=value file ('#' starts a comment) on top of `base`.
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

class AdmissibilityError : public std::runtime_error {
public:
    AdmissibilityError(const std::string& what, AdmissibilityReport report)
        : std::runtime_error(what), report_(std::move(report)) {}
    const AdmissibilityReport& report() const { return report_; }

private:
    AdmissibilityReport report_;
};

struct RunReport {
    ExperimentConfig config;
    AdmissibilityReport admissibility;
    std::string status = "ok";  // ok | inadmissible | solver | error
    std::string message;

    std::size_t data_nodes = 0;
    std::size_t recon_nodes = 0;
    double error_percent = 0.0;
    double theta_max_error = 0.0;
    double theta_l2_error = 0.0;

    double identity_residual = 0.0;  // cellwise detH vs sigma^2 detJ^2
    double min_abs_det_j = 0.0;
    double median_abs_det_j = 0.0;
    double p1_abs_det_j_uncontrolled = 0.0;  // 1st percentile next to the uncontrolled boundary
    bool det_j_single_sign = true;           // over cells with |detJ| > 1e-6
    double min_eigenvalue = 0.0;             // of the perturbed, floored H on the recon mesh

    std::size_t forward_iterations[2] = {0, 0};
    std::size_t theta_iterations = 0;
    std::size_t sigma_iterations = 0;
    std::size_t repaired_trace_nodes = 0;
    std::size_t clamped_cells = 0;
    double wall_seconds = 0.0;

    bool ok() const { return status == "ok"; }
    static std::string csv_header();
    std::string csv_row() const;
};

/// Shares meshes between experiments; safe to use from several threads.
class MeshCache {
public:
    MeshPtr get(double h);

private:
    std::mutex mutex_;
    std::map<double, MeshPtr> meshes_;
};

/// Everything a figure export needs from one run.
struct RunArtifacts {
    NodalScalarField sigma_true;
    NodalScalarField sigma_rec;
    NodalScalarField theta_rec;
    PowerDensityField h;  // perturbed and floored, on the reconstruction mesh
    NodalScalarField u1, u2;  // forward solutions on the data mesh
    std::vector<double> det_j;  // per data-mesh cell
};

/// Forward data only: boundary pair, admissibility, and the two Neumann solves
/// on the data mesh. Throws AdmissibilityError or SolverError.
struct ForwardRun {
    BoundaryPair pair;
    AdmissibilityReport admissibility;
    NodalScalarField sigma;
    NodalScalarField u1, u2;
    SolveStats stats[2];
};
ForwardRun simulate(const ExperimentConfig& config, MeshCache& cache);

/// boundary -> forward (data mesh) -> interpolate H -> perturb -> reconstruct
/// (recon mesh) -> metrics. Writes artifacts under config.out_dir/label() when
/// out_dir is set. Throws AdmissibilityError, SolverError, std::invalid_argument.
RunReport run_experiment(const ExperimentConfig& config, MeshCache& cache, RunArtifacts* artifacts = nullptr);
RunReport run_experiment(const ExperimentConfig& config);

/// Runs every config (on up to `threads` workers, 0 = hardware concurrency) and
/// returns reports in input order; failures become rows with a status flag.
std::vector<RunReport> sweep(const std::vector<ExperimentConfig>& configs, unsigned threads = 0);

/// The 8 arcs x 2 families grid at the base config's noise level.
std::vector<ExperimentConfig> arc_sweep_configs(const ExperimentConfig& base);
/// Gamma_5 and Gamma_4 x alpha in {1, 5, 10} x 2 families.
std::vector<ExperimentConfig> noise_study_configs(const ExperimentConfig& base);

/// Versioned schema line, header and one row per report.
std::string reports_to_csv(const std::vector<RunReport>& reports);
void write_reports_csv(const std::string& path, const std::vector<RunReport>& reports);

/// Writes log_h11, logsym_h12, log_h22, log_det_h, sigma_rec and sigma_true as
/// nodal CSV files plus one VTK file holding all of them. Returns the CSV paths.
std::vector<std::string> export_figures(const RunArtifacts& artifacts, const std::string& dir, double c = 1e-3);

/// Nearest-rank percentile (p in [0, 100]) of a non-empty sample.
double percentile(std::vector<double> values, double p);

}  // namespace aet
