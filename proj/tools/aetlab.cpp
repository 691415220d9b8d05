// aetlab: limited-view power-density experiments from the command line.
//
//   aetlab reconstruct --phantom sigma1 --family adapted --gamma 6 --out runs
//   aetlab sweep --phantom sigma2 --out runs
//   aetlab check-bc --family cutoff --gamma 3
//
// Exit codes: 0 success, 1 usage or I/O error, 2 inadmissible boundary data,
// 3 solver failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "aet/driver.hpp"
#include "aet/forward.hpp"
#include "aet/io.hpp"
#include "aet/mesh.hpp"

namespace {

constexpr int exit_inadmissible = 2;
constexpr int exit_solver = 3;

// Flag values are kept as strings and routed through the config-file parser so
// the two input paths accept exactly the same syntax.
struct ConfigFlags {
    std::map<std::string, std::string> values;
    std::string config_file;

    void attach(CLI::App& app) {
        app.add_option("--config", config_file, "key=value config file; flags override it");
        const std::pair<const char*, const char*> keys[] = {
            {"phantom", "sigma1 | sigma2 | sigma2-alt | unit | const:<v>"},
            {"family", "adapted | cutoff"},
            {"gamma", "arc index i in 1..8, ell = i*pi/4"},
            {"alpha", "noise level in percent"},
            {"seed", "noise seed"},
            {"floor", "eigenvalue floor L"},
            {"data-h", "data mesh spacing"},
            {"recon-h", "reconstruction mesh spacing"},
            {"out", "output directory"},
            {"noise-norm", "euclidean | mass"},
            {"f-clamp", "clamp |F| at this percentile (0 = off)"},
        };
        for (const auto& [key, help] : keys) app.add_option(std::string("--") + key, values[key], help);
    }

    aet::ExperimentConfig resolve(const CLI::App& app) const {
        aet::ExperimentConfig c;
        if (!config_file.empty()) c = aet::load_config_file(config_file, c);
        for (const auto& [key, value] : values) {
            if (app.count("--" + key) == 0) continue;
            std::string k = key;
            for (auto& ch : k) {
                if (ch == '-') ch = '_';
            }
            aet::apply_config_entry(c, k, value);
        }
        c.validate();
        return c;
    }
};

void print_reports(const std::vector<aet::RunReport>& reports, const std::string& out_dir, const std::string& name) {
    if (out_dir.empty()) {
        std::cout << aet::reports_to_csv(reports);
        return;
    }
    aet::ensure_directory(out_dir);
    const auto path = out_dir + "/" + name;
    aet::write_reports_csv(path, reports);
    for (const auto& r : reports) {
        std::cout << r.config.label() << "  " << r.status;
        if (r.ok()) std::cout << "  error " << r.error_percent << " %";
        std::cout << '\n';
    }
    std::cout << "wrote " << path << '\n';
}

int run_check_bc(const aet::ExperimentConfig& c, const std::string& csv) {
    const auto pair = csv.empty() ? aet::family_pair(c.family, c.gamma_index) : aet::pair_from_csv(csv);
    const auto rep = aet::check_admissibility(pair);
    std::cout << aet::AdmissibilityReport::csv_header() << '\n' << rep.csv_row() << '\n';
    if (!rep.admissible) {
        std::cerr << "inadmissible: " << rep.failure_summary() << '\n';
        return exit_inadmissible;
    }
    std::cout << "admissible, Ind = " << rep.index << '\n';
    return 0;
}

int run_simulate(const aet::ExperimentConfig& c) {
    aet::MeshCache cache;
    const auto fwd = aet::simulate(c, cache);
    const auto h = aet::power_density(fwd.sigma, fwd.u1, fwd.u2);
    const auto diag = aet::jacobian_diagnostics(fwd.sigma, fwd.u1, fwd.u2);
    const auto& mesh = *fwd.sigma.mesh;
    std::cout << "nodes " << mesh.node_count() << ", Ind " << fwd.admissibility.index << ", CG iterations "
              << fwd.stats[0].iterations << " / " << fwd.stats[1].iterations << ", detH identity residual "
              << diag.identity_residual << '\n';
    if (c.out_dir.empty()) return 0;
    const auto dir = c.out_dir + "/" + c.label();
    aet::ensure_directory(dir);
    aet::write_nodal_csv(mesh, dir + "/power_density.csv", {{"h11", h.h11}, {"h12", h.h12}, {"h22", h.h22}},
                         "power densities on the data mesh");
    aet::VtkWriter(mesh)
        .point_scalar("sigma", fwd.sigma.values)
        .point_scalar("u1", fwd.u1.values)
        .point_scalar("u2", fwd.u2.values)
        .point_scalar("h11", h.h11)
        .point_scalar("h12", h.h12)
        .point_scalar("h22", h.h22)
        .point_scalar("detH", diag.det_h.values)
        .cell_scalar("detJ", diag.det_j)
        .write(dir + "/forward.vtk");
    std::cout << "wrote " << dir << '\n';
    return 0;
}

int run_reconstruct(const aet::ExperimentConfig& c) {
    const auto rep = aet::run_experiment(c);
    std::cout << aet::reports_to_csv({rep});
    return 0;
}

int run_export(aet::ExperimentConfig c) {
    if (c.out_dir.empty()) c.out_dir = "aetlab-out";
    aet::MeshCache cache;
    aet::RunArtifacts art;
    auto quiet = c;
    quiet.out_dir.clear();
    const auto rep = aet::run_experiment(quiet, cache, &art);
    const auto dir = c.out_dir + "/" + c.label();
    for (const auto& path : aet::export_figures(art, dir)) std::cout << path << '\n';
    aet::write_reports_csv(dir + "/report.csv", {rep});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Limited-view acousto-electric tomography laboratory"};
    app.require_subcommand(1);

    auto* check = app.add_subcommand("check-bc", "Admissibility report for a boundary pair");
    auto* simulate = app.add_subcommand("simulate", "Forward solves and power densities on the data mesh");
    auto* reconstruct = app.add_subcommand("reconstruct", "Full pipeline for one configuration");
    auto* sweep = app.add_subcommand("sweep", "All 8 arcs for both boundary families");
    auto* noise = app.add_subcommand("noise-study", "Gamma_5 and Gamma_4 at alpha 1, 5, 10 for both families");
    auto* exp = app.add_subcommand("export", "Run once and write the figure fields");

    std::map<CLI::App*, ConfigFlags> flags;
    for (auto* sub : {check, simulate, reconstruct, sweep, noise, exp}) flags[sub].attach(*sub);
    std::string bc_csv;
    check->add_option("--bc-csv", bc_csv, "custom pair as rows t,f1,f2");
    unsigned threads = 0;
    for (auto* sub : {sweep, noise}) sub->add_option("--threads", threads, "worker threads (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& [sub, f] : flags) {
            if (!sub->parsed()) continue;
            const auto config = f.resolve(*sub);
            if (sub == check) return run_check_bc(config, bc_csv);
            if (sub == simulate) return run_simulate(config);
            if (sub == reconstruct) return run_reconstruct(config);
            if (sub == exp) return run_export(config);
            const auto configs = sub == sweep ? aet::arc_sweep_configs(config) : aet::noise_study_configs(config);
            print_reports(aet::sweep(configs, threads), config.out_dir, sub == sweep ? "sweep.csv" : "noise_study.csv");
            return 0;
        }
    } catch (const aet::AdmissibilityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_inadmissible;
    } catch (const aet::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return exit_solver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
