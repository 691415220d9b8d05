#include <doctest.h>

#include <cmath>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "aet/driver.hpp"
#include "aet/field.hpp"

using namespace aet;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.data_h = 0.05;
    c.recon_h = 0.1;
    return c;
}

fs::path scratch_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("aet-test-" + name);
    fs::remove_all(p);
    return p;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::size_t csv_data_rows(const fs::path& path) {
    std::ifstream in(path);
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line[0] != '#') ++rows;
    }
    return rows - 1;  // header
}

}  // namespace

TEST_CASE("config entries") {
    ExperimentConfig c;
    CHECK(c.label() == "sigma2_adapted_g8_a0_s50");
    apply_config_entry(c, " family ", " cutoff ");
    apply_config_entry(c, "gamma", "3");
    apply_config_entry(c, "alpha", "5");
    apply_config_entry(c, "seed", "7");
    apply_config_entry(c, "phantom", "sigma1");
    apply_config_entry(c, "data-h", "0.02");
    apply_config_entry(c, "recon_h", "0.04");
    apply_config_entry(c, "noise_norm", "mass");
    CHECK(c.family == PairFamily::cutoff);
    CHECK(c.gamma_index == 3);
    CHECK(c.data_h == 0.02);
    CHECK(c.recon_h == 0.04);
    CHECK(c.noise_norm == NoiseNorm::mass_matrix);
    CHECK(c.label() == "sigma1_cutoff_g3_a5_s7");
    CHECK_NOTHROW(c.validate());

    CHECK_THROWS_AS(apply_config_entry(c, "gamma", "2.5"), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_entry(c, "alpha", "five"), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_entry(c, "seed", "-1"), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_entry(c, "colour", "red"), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_entry(c, "noise_norm", "max"), std::invalid_argument);

    auto bad = small_config();
    bad.gamma_index = 9;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = small_config();
    bad.data_h = 0.2;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = small_config();
    bad.floor_L = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = small_config();
    bad.phantom = "sigma9";
    CHECK_THROWS(bad.validate());

    ExperimentConfig constant;
    constant.phantom = "const:1.5";
    CHECK(constant.label() == "const-1-5_adapted_g8_a0_s50");
}

TEST_CASE("config file") {
    const auto dir = scratch_dir("config");
    fs::create_directories(dir);
    const auto path = (dir / "run.cfg").string();
    {
        std::ofstream out(path);
        out << "# comment\n\nphantom = sigma1\ngamma=5   # inline\nalpha = 10\n";
    }
    const auto c = load_config_file(path, small_config());
    CHECK(c.phantom == "sigma1");
    CHECK(c.gamma_index == 5);
    CHECK(c.alpha == 10.0);
    CHECK(c.data_h == 0.05);
    {
        std::ofstream out(path);
        out << "gamma 5\n";
    }
    CHECK_THROWS_AS(load_config_file(path), std::invalid_argument);
    CHECK_THROWS(load_config_file((dir / "missing.cfg").string()));
}

TEST_CASE("percentile") {
    CHECK(percentile({3, 1, 2}, 50) == 2);
    CHECK(percentile({3, 1, 2}, 0) == 1);
    CHECK(percentile({3, 1, 2}, 100) == 3);
    std::vector<double> v(100);
    for (int k = 0; k < 100; ++k) v[k] = k + 1;
    CHECK(percentile(v, 1) == 1);
    CHECK(percentile(v, 37) == 37);
    CHECK_THROWS(percentile({}, 50));
    CHECK_THROWS(percentile({1}, 101));
}

TEST_CASE("experiments are deterministic and alpha = 0 means no noise") {
    MeshCache cache;
    auto c = small_config();
    c.phantom = "sigma1";
    c.gamma_index = 6;
    RunArtifacts a0, a1;
    const auto r0 = run_experiment(c, cache, &a0);
    const auto r1 = run_experiment(c, cache, &a1);
    CHECK(r0.ok());
    CHECK(r0.error_percent == r1.error_percent);
    CHECK(a0.sigma_rec.values == a1.sigma_rec.values);

    // alpha = 0 with a different seed and floor must not touch anything.
    auto other = c;
    other.seed = 12345;
    RunArtifacts a2;
    run_experiment(other, cache, &a2);
    CHECK(std::memcmp(a0.sigma_rec.values.data(), a2.sigma_rec.values.data(),
                      a0.sigma_rec.values.size() * sizeof(double)) == 0);

    auto noisy = c;
    noisy.alpha = 5;
    RunArtifacts n0, n1;
    const auto rn = run_experiment(noisy, cache, &n0);
    run_experiment(noisy, cache, &n1);
    CHECK(n0.sigma_rec.values == n1.sigma_rec.values);
    CHECK(n0.sigma_rec.values != a0.sigma_rec.values);
    CHECK(rn.min_eigenvalue >= noisy.floor_L - 1e-14);
}

TEST_CASE("report fields") {
    auto c = small_config();
    const auto r = run_experiment(c);
    CHECK(r.ok());
    CHECK(r.data_nodes > r.recon_nodes);
    CHECK(r.error_percent < 5.0);
    CHECK(r.identity_residual < 1e-10);
    CHECK(r.det_j_single_sign);
    CHECK(r.admissibility.admissible);
    CHECK(r.forward_iterations[0] > 0);
    CHECK(r.theta_iterations > 0);
    CHECK(r.sigma_iterations > 0);

    const auto csv = lines_of(reports_to_csv({r}));
    REQUIRE(csv.size() == 3);
    CHECK(csv[0] == "# aetlab-report v1");
    CHECK(csv[1] == RunReport::csv_header());
    const auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
    CHECK(count(csv[1]) == count(csv[2]));
    CHECK(csv[2].rfind(c.label() + ",", 0) == 0);
}

TEST_CASE("sweeps") {
    const auto base = small_config();
    const auto arcs = arc_sweep_configs(base);
    REQUIRE(arcs.size() == 16);
    CHECK(arcs.front().gamma_index == 8);
    CHECK(arcs[7].gamma_index == 1);
    CHECK(arcs[8].family == PairFamily::cutoff);

    const auto noise = noise_study_configs(base);
    REQUIRE(noise.size() == 12);
    for (const auto& c : noise) {
        CHECK((c.gamma_index == 5 || c.gamma_index == 4));
        CHECK(c.alpha > 0.0);
    }

    auto configs = arcs;
    configs[3].phantom = "no-such-phantom";
    const auto reports = sweep(configs, 4);
    REQUIRE(reports.size() == 16);
    for (std::size_t k = 0; k < reports.size(); ++k) {
        CAPTURE(k);
        CHECK(reports[k].config.label() == configs[k].label());
        if (k == 3) {
            CHECK(reports[k].status == "error");
            CHECK(!reports[k].message.empty());
        } else {
            CHECK(reports[k].ok());
        }
    }
    CHECK(lines_of(reports_to_csv(reports)).size() == 18);
    CHECK_THROWS(sweep({}));

    // Same answers regardless of the worker count.
    const auto serial = sweep({arcs[1], arcs[9]}, 1);
    CHECK(serial[0].error_percent == reports[1].error_percent);
    CHECK(serial[1].error_percent == reports[9].error_percent);
}

TEST_CASE("artifact directories") {
    const auto dir = scratch_dir("runs");
    auto c = small_config();
    c.out_dir = dir.string();
    c.gamma_index = 4;
    run_experiment(c);
    const auto run = dir / c.label();
    for (const char* name : {"reconstruction.vtk", "forward.vtk", "figures.vtk", "report.csv", "log_h11.csv",
                             "logsym_h12.csv", "log_h22.csv", "log_det_h.csv", "sigma_rec.csv", "sigma_true.csv"}) {
        CAPTURE(name);
        CHECK(fs::exists(run / name));
    }
    CHECK(csv_data_rows(run / "report.csv") == 1);
}

TEST_CASE("figure export") {
    MeshCache cache;
    auto c = small_config();
    c.phantom = "sigma1";
    c.gamma_index = 4;
    RunArtifacts art;
    run_experiment(c, cache, &art);
    const auto dir = scratch_dir("export");
    const auto paths = export_figures(art, dir.string());
    REQUIRE(paths.size() == 6);
    const auto nodes = art.h.mesh->node_count();
    for (const auto& p : paths) {
        CAPTURE(p);
        CHECK(csv_data_rows(p) == nodes);
    }
    CHECK(fs::exists(dir / "figures.vtk"));
    CHECK_THROWS(export_figures(RunArtifacts{}, dir.string()));

    for (double x : {1e-5, 1e-3, 0.7, 42.0}) CHECK(log_sym(-x) == -log_sym(x));
    CHECK(log_sym(0.0) == 0.0);

    // With the arc [0, pi], the weakest data sits on the uncontrolled half.
    const auto det = art.h.determinant();
    const auto k = static_cast<std::size_t>(std::min_element(det.begin(), det.end()) - det.begin());
    const auto p = art.h.mesh->node(k);
    double t = std::atan2(p.y, p.x);
    if (t < 0) t += 2 * std::numbers::pi;
    const double ell = std::numbers::pi;
    CHECK(t > ell);
}
