#include "aet/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <thread>

#include "aet/forward.hpp"
#include "aet/io.hpp"
#include "aet/mesh.hpp"
#include "aet/phantoms.hpp"

namespace aet {

namespace {

constexpr const char* report_schema = "# aetlab-report v1";

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != value.size()) throw std::invalid_argument("config: " + key + " expects a number, got '" + value + "'");
    return v;
}

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch == '\n' ? ' ' : ch;
    }
    return out + '"';
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

}  // namespace

void ExperimentConfig::validate() const {
    phantom_from_name(phantom);
    if (family == PairFamily::custom) throw std::invalid_argument("config: family must be adapted or cutoff");
    if (gamma_index < 1 || gamma_index > 8) throw std::invalid_argument("config: gamma must be in 1..8");
    if (!(data_h > 0.0 && data_h < 0.5)) throw std::invalid_argument("config: data_h must be in (0, 0.5)");
    if (!(recon_h > 0.0 && recon_h < 0.5)) throw std::invalid_argument("config: recon_h must be in (0, 0.5)");
    if (!(data_h < recon_h)) throw std::invalid_argument("config: the data mesh must be finer than the reconstruction mesh");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("config: alpha must be >= 0");
    if (!(floor_L > 0.0)) throw std::invalid_argument("config: floor must be positive");
    if (!(f_clamp_percentile >= 0.0 && f_clamp_percentile <= 100.0)) {
        throw std::invalid_argument("config: f_clamp must be in [0, 100]");
    }
}

std::string ExperimentConfig::label() const {
    std::string name = phantom;
    for (char& ch : name) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-') ch = '-';
    }
    std::ostringstream s;
    s << name << '_' << to_string(family) << "_g" << gamma_index << "_a" << alpha << "_s" << seed;
    return s.str();
}

void apply_config_entry(ExperimentConfig& c, const std::string& key_in, const std::string& value_in) {
    const auto key = trim(key_in);
    const auto value = trim(value_in);
    if (key == "phantom") {
        c.phantom = value;
    } else if (key == "family") {
        c.family = family_from_name(value);
    } else if (key == "gamma") {
        const double g = parse_double(key, value);
        if (g != std::floor(g)) throw std::invalid_argument("config: gamma must be an integer");
        c.gamma_index = static_cast<int>(g);
    } else if (key == "alpha") {
        c.alpha = parse_double(key, value);
    } else if (key == "seed") {
        try {
            std::size_t used = 0;
            if (value.empty() || !std::isdigit(static_cast<unsigned char>(value[0]))) throw std::invalid_argument("sign");
            c.seed = std::stoull(value, &used);
            if (used != value.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw std::invalid_argument("config: seed expects a non-negative integer, got '" + value + "'");
        }
    } else if (key == "floor") {
        c.floor_L = parse_double(key, value);
    } else if (key == "data_h" || key == "data-h") {
        c.data_h = parse_double(key, value);
    } else if (key == "recon_h" || key == "recon-h") {
        c.recon_h = parse_double(key, value);
    } else if (key == "out") {
        c.out_dir = value;
    } else if (key == "noise_norm") {
        if (value == "mass") {
            c.noise_norm = NoiseNorm::mass_matrix;
        } else if (value == "euclidean") {
            c.noise_norm = NoiseNorm::euclidean;
        } else {
            throw std::invalid_argument("config: noise_norm must be mass or euclidean");
        }
    } else if (key == "f_clamp") {
        c.f_clamp_percentile = parse_double(key, value);
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        apply_config_entry(base, line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

std::string RunReport::csv_header() {
    return "label,phantom,family,gamma,alpha,seed,floor,data_h,recon_h,status,data_nodes,recon_nodes,"
           "error_percent,theta_max_error,theta_l2_error,identity_residual,min_abs_detj,median_abs_detj,"
           "p1_abs_detj_uncontrolled,detj_single_sign,min_eigenvalue,iter_u1,iter_u2,iter_theta,iter_sigma,"
           "repaired_trace_nodes,clamped_cells,wall_seconds," +
           AdmissibilityReport::csv_header() + ",message";
}

std::string RunReport::csv_row() const {
    std::ostringstream s;
    const auto& c = config;
    s << c.label() << ',' << c.phantom << ',' << to_string(c.family) << ',' << c.gamma_index << ',' << fmt(c.alpha)
      << ',' << c.seed << ',' << fmt(c.floor_L) << ',' << fmt(c.data_h) << ',' << fmt(c.recon_h) << ',' << status
      << ',' << data_nodes << ',' << recon_nodes << ',' << fmt(error_percent) << ',' << fmt(theta_max_error) << ','
      << fmt(theta_l2_error) << ',' << fmt(identity_residual) << ',' << fmt(min_abs_det_j) << ','
      << fmt(median_abs_det_j) << ',' << fmt(p1_abs_det_j_uncontrolled) << ',' << (det_j_single_sign ? 1 : 0) << ','
      << fmt(min_eigenvalue) << ',' << forward_iterations[0] << ',' << forward_iterations[1] << ','
      << theta_iterations << ',' << sigma_iterations << ',' << repaired_trace_nodes << ',' << clamped_cells << ','
      << fmt(wall_seconds) << ',' << admissibility.csv_row() << ',' << csv_escape(message);
    return s.str();
}

MeshPtr MeshCache::get(double h) {
    std::lock_guard lock(mutex_);
    auto& slot = meshes_[h];
    if (!slot) slot = make_disk_mesh(h);
    return slot;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("percentile of an empty sample");
    if (!(p >= 0.0 && p <= 100.0)) throw std::invalid_argument("percentile must be in [0, 100]");
    const auto n = values.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n) - 1;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank), values.end());
    return values[rank];
}

ForwardRun simulate(const ExperimentConfig& config, MeshCache& cache) {
    config.validate();
    ForwardRun run;
    run.pair = family_pair(config.family, config.gamma_index);
    run.admissibility = check_admissibility(run.pair);
    if (!run.admissibility.admissible) {
        throw AdmissibilityError("boundary pair " + to_string(config.family) + " " +
                                     std::to_string(config.gamma_index) +
                                     " is not admissible: " + run.admissibility.failure_summary(),
                                 run.admissibility);
    }
    const auto phantom = phantom_from_name(config.phantom);
    const auto mesh = cache.get(config.data_h);
    run.sigma = sample_to_mesh(phantom, mesh);
    const auto arc = select_arc(*mesh, run.pair.ell);
    const std::function<double(double)>* fluxes[2] = {&run.pair.f1, &run.pair.f2};
    NodalScalarField* outputs[2] = {&run.u1, &run.u2};
    for (int k = 0; k < 2; ++k) {
        try {
            auto sol = solve_neumann({run.sigma, arc, *fluxes[k], phantom.lambda_bound});
            *outputs[k] = std::move(sol.u);
            run.stats[k] = sol.stats;
        } catch (const SolverError& e) {
            throw SolverError("forward u" + std::to_string(k + 1) + ": " + e.what(), e.stats());
        }
    }
    return run;
}

RunReport run_experiment(const ExperimentConfig& config, MeshCache& cache, RunArtifacts* artifacts) {
    const auto start = std::chrono::steady_clock::now();
    RunReport rep;
    rep.config = config;
    auto fwd = simulate(config, cache);
    rep.admissibility = fwd.admissibility;
    rep.forward_iterations[0] = fwd.stats[0].iterations;
    rep.forward_iterations[1] = fwd.stats[1].iterations;
    const auto data_mesh = fwd.sigma.mesh;
    const auto recon_mesh = cache.get(config.recon_h);
    rep.data_nodes = data_mesh->node_count();
    rep.recon_nodes = recon_mesh->node_count();

    // Jacobian diagnostics on the data mesh.
    const auto diag = jacobian_diagnostics(fwd.sigma, fwd.u1, fwd.u2);
    rep.identity_residual = diag.identity_residual;
    std::vector<double> abs_det(diag.det_j.size());
    std::transform(diag.det_j.begin(), diag.det_j.end(), abs_det.begin(), [](double v) { return std::abs(v); });
    rep.min_abs_det_j = *std::min_element(abs_det.begin(), abs_det.end());
    rep.median_abs_det_j = percentile(abs_det, 50.0);
    const auto edge_cells = cells_touching_uncontrolled_boundary(*data_mesh, fwd.pair.ell);
    if (!edge_cells.empty()) {
        std::vector<double> edge(edge_cells.size());
        for (std::size_t k = 0; k < edge.size(); ++k) edge[k] = abs_det[edge_cells[k]];
        rep.p1_abs_det_j_uncontrolled = percentile(std::move(edge), 1.0);
    }
    int sign = 0;
    for (double d : diag.det_j) {
        if (std::abs(d) <= 1e-6) continue;
        const int s = d > 0 ? 1 : -1;
        if (sign == 0) sign = s;
        if (s != sign) rep.det_j_single_sign = false;
    }

    // Data on the reconstruction mesh.
    const auto h_data = power_density(fwd.sigma, fwd.u1, fwd.u2);
    const PointLocator locator(data_mesh);
    auto transfer = [&](const std::vector<double>& v) {
        return interpolate(locator, NodalScalarField(data_mesh, v), recon_mesh).values;
    };
    const PowerDensityField h_recon(recon_mesh, transfer(h_data.h11), transfer(h_data.h12), transfer(h_data.h22));
    const auto h = perturb(h_recon, {config.alpha, config.seed, config.floor_L, config.noise_norm});
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < h.size(); ++i) {
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, symmetric_eigenvalues(h.h11[i], h.h12[i], h.h22[i]).first);
    }

    const auto traces = boundary_theta(fwd.u1, fwd.sigma, recon_mesh);
    rep.repaired_trace_nodes = traces.repaired;
    ReconOptions ropts;
    ropts.f_clamp_percentile = config.f_clamp_percentile;
    const auto rec = reconstruct(h, traces, ropts);
    rep.theta_iterations = rec.theta_stats.iterations;
    rep.sigma_iterations = rec.sigma_stats.iterations;
    rep.clamped_cells = rec.clamped_cells;

    const auto phantom = phantom_from_name(config.phantom);
    const auto sigma_true = sample_to_mesh(phantom, recon_mesh);
    rep.error_percent = relative_l2_error(rec.sigma, sigma_true);

    const auto theta_ref = theta_truth(fwd.u1, recon_mesh);
    std::vector<double> dtheta(theta_ref.size());
    for (std::size_t i = 0; i < dtheta.size(); ++i) {
        dtheta[i] = wrap_angle(rec.theta[i] - theta_ref[i]);
        rep.theta_max_error = std::max(rep.theta_max_error, std::abs(dtheta[i]));
    }
    rep.theta_l2_error = l2_norm(*recon_mesh, dtheta);

    RunArtifacts local;
    RunArtifacts& art = artifacts ? *artifacts : local;
    if (artifacts || !config.out_dir.empty()) {
        art.sigma_true = sigma_true;
        art.sigma_rec = rec.sigma;
        art.theta_rec = rec.theta;
        art.h = h;
        art.u1 = fwd.u1;
        art.u2 = fwd.u2;
        art.det_j = diag.det_j;
    }

    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!config.out_dir.empty()) {
        const auto dir = config.out_dir + "/" + config.label();
        ensure_directory(dir);
        const auto det_h = h.determinant();
        VtkWriter(*recon_mesh)
            .point_scalar("sigma_rec", rec.sigma.values)
            .point_scalar("sigma_true", sigma_true.values)
            .point_scalar("theta_rec", rec.theta.values)
            .point_scalar("detH", det_h)
            .write(dir + "/reconstruction.vtk");
        VtkWriter(*data_mesh)
            .point_scalar("sigma", fwd.sigma.values)
            .point_scalar("u1", fwd.u1.values)
            .point_scalar("u2", fwd.u2.values)
            .cell_scalar("detJ", diag.det_j)
            .write(dir + "/forward.vtk");
        export_figures(art, dir);
        write_reports_csv(dir + "/report.csv", {rep});
    }
    return rep;
}

RunReport run_experiment(const ExperimentConfig& config) {
    MeshCache cache;
    return run_experiment(config, cache);
}

std::vector<RunReport> sweep(const std::vector<ExperimentConfig>& configs, unsigned threads) {
    if (configs.empty()) throw std::invalid_argument("sweep: empty config list");
    std::vector<RunReport> reports(configs.size());
    MeshCache cache;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < configs.size(); k = next++) {
            RunReport& rep = reports[k];
            try {
                rep = run_experiment(configs[k], cache);
            } catch (const AdmissibilityError& e) {
                rep = RunReport{};
                rep.config = configs[k];
                rep.admissibility = e.report();
                rep.status = "inadmissible";
                rep.message = e.what();
            } catch (const SolverError& e) {
                rep = RunReport{};
                rep.config = configs[k];
                rep.status = "solver";
                rep.message = e.what();
            } catch (const std::exception& e) {
                rep = RunReport{};
                rep.config = configs[k];
                rep.status = "error";
                rep.message = e.what();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, configs.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return reports;
}

std::vector<ExperimentConfig> arc_sweep_configs(const ExperimentConfig& base) {
    std::vector<ExperimentConfig> out;
    for (auto family : {PairFamily::adapted, PairFamily::cutoff}) {
        for (int i = 8; i >= 1; --i) {
            auto c = base;
            c.family = family;
            c.gamma_index = i;
            out.push_back(c);
        }
    }
    return out;
}

std::vector<ExperimentConfig> noise_study_configs(const ExperimentConfig& base) {
    std::vector<ExperimentConfig> out;
    for (int i : {5, 4}) {
        for (double alpha : {1.0, 5.0, 10.0}) {
            for (auto family : {PairFamily::adapted, PairFamily::cutoff}) {
                auto c = base;
                c.gamma_index = i;
                c.alpha = alpha;
                c.family = family;
                out.push_back(c);
            }
        }
    }
    return out;
}

std::string reports_to_csv(const std::vector<RunReport>& reports) {
    std::ostringstream s;
    s << report_schema << '\n' << RunReport::csv_header() << '\n';
    for (const auto& r : reports) s << r.csv_row() << '\n';
    return s.str();
}

void write_reports_csv(const std::string& path, const std::vector<RunReport>& reports) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << reports_to_csv(reports);
}

std::vector<std::string> export_figures(const RunArtifacts& art, const std::string& dir, double c) {
    if (!art.h.mesh) throw std::invalid_argument("export_figures: run artifacts are empty");
    ensure_directory(dir);
    const auto& mesh = *art.h.mesh;
    const auto n = art.h.size();
    std::vector<double> log_h11(n), logsym_h12(n), log_h22(n), log_det(n);
    for (std::size_t i = 0; i < n; ++i) {
        log_h11[i] = std::log(art.h.h11[i]);
        logsym_h12[i] = log_sym(art.h.h12[i], c);
        log_h22[i] = std::log(art.h.h22[i]);
        log_det[i] = std::log(art.h.det(i));
    }
    const std::vector<std::pair<std::string, const std::vector<double>*>> fields = {
        {"log_h11", &log_h11},           {"logsym_h12", &logsym_h12},          {"log_h22", &log_h22},
        {"log_det_h", &log_det},         {"sigma_rec", &art.sigma_rec.values}, {"sigma_true", &art.sigma_true.values},
    };
    std::vector<std::string> paths;
    VtkWriter vtk(mesh);
    for (const auto& [name, values] : fields) {
        const auto path = dir + "/" + name + ".csv";
        write_nodal_csv(mesh, path, {{name, *values}}, name == "logsym_h12" ? "C = " + fmt(c) : std::string{});
        vtk.point_scalar(name, *values);
        paths.push_back(path);
    }
    vtk.write(dir + "/figures.vtk");
    return paths;
}

}  // namespace aet
