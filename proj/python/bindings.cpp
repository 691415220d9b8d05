#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aet/boundary.hpp"
#include "aet/driver.hpp"
#include "aet/forward.hpp"
#include "aet/mesh.hpp"
#include "aet/perturb.hpp"
#include "aet/phantoms.hpp"

namespace py = pybind11;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<double> from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
    return {a.data(), a.data() + a.size()};
}

py::dict report_dict(const aet::RunReport& r) {
    py::dict d;
    d["label"] = r.config.label();
    d["status"] = r.status;
    d["message"] = r.message;
    d["data_nodes"] = r.data_nodes;
    d["recon_nodes"] = r.recon_nodes;
    d["error_percent"] = r.error_percent;
    d["theta_max_error"] = r.theta_max_error;
    d["theta_l2_error"] = r.theta_l2_error;
    d["identity_residual"] = r.identity_residual;
    d["min_abs_det_j"] = r.min_abs_det_j;
    d["median_abs_det_j"] = r.median_abs_det_j;
    d["p1_abs_det_j_uncontrolled"] = r.p1_abs_det_j_uncontrolled;
    d["det_j_single_sign"] = r.det_j_single_sign;
    d["min_eigenvalue"] = r.min_eigenvalue;
    d["index"] = r.admissibility.index;
    d["admissible"] = r.admissibility.admissible;
    d["wall_seconds"] = r.wall_seconds;
    return d;
}

aet::ExperimentConfig config_from_kwargs(const py::kwargs& kw) {
    aet::ExperimentConfig c;
    for (const auto& item : kw) {
        aet::apply_config_entry(c, py::str(item.first), py::str(item.second));
    }
    c.validate();
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Limited-view acousto-electric tomography core";

    py::register_exception<aet::AdmissibilityError>(m, "AdmissibilityError", PyExc_ValueError);
    py::register_exception<aet::SolverError>(m, "SolverError", PyExc_RuntimeError);

    py::class_<aet::TriangleMesh, std::shared_ptr<aet::TriangleMesh>>(m, "Mesh")
        .def_property_readonly("node_count", &aet::TriangleMesh::node_count)
        .def_property_readonly("triangle_count", &aet::TriangleMesh::triangle_count)
        .def_property_readonly("nodes",
                               [](const aet::TriangleMesh& mesh) {
                                   py::array_t<double> out({static_cast<py::ssize_t>(mesh.node_count()), py::ssize_t{2}});
                                   auto v = out.mutable_unchecked<2>();
                                   for (std::size_t i = 0; i < mesh.node_count(); ++i) {
                                       v(i, 0) = mesh.node(i).x;
                                       v(i, 1) = mesh.node(i).y;
                                   }
                                   return out;
                               })
        .def_property_readonly("triangles",
                               [](const aet::TriangleMesh& mesh) {
                                   py::array_t<std::int64_t> out(
                                       {static_cast<py::ssize_t>(mesh.triangle_count()), py::ssize_t{3}});
                                   auto v = out.mutable_unchecked<2>();
                                   for (std::size_t c = 0; c < mesh.triangle_count(); ++c) {
                                       for (int k = 0; k < 3; ++k) v(c, k) = static_cast<std::int64_t>(mesh.triangle(c)[k]);
                                   }
                                   return out;
                               })
        .def_property_readonly("boundary_loop", &aet::TriangleMesh::boundary_loop)
        .def("validate", [](const aet::TriangleMesh& mesh) { return aet::validate_mesh(mesh); });

    m.def("disk_mesh", [](double h) { return std::make_shared<aet::TriangleMesh>(aet::build_disk_mesh(h)); },
          py::arg("h"), "Concentric-ring mesh of the unit disk");

    py::class_<aet::BoundaryPair>(m, "BoundaryPair")
        .def_readonly("ell", &aet::BoundaryPair::ell)
        .def_readonly("gamma_index", &aet::BoundaryPair::gamma_index)
        .def_property_readonly("family", [](const aet::BoundaryPair& p) { return aet::to_string(p.family); })
        .def("__call__", [](const aet::BoundaryPair& p, double t) { return py::make_tuple(p.f1(t), p.f2(t)); });

    m.def("adapted_pair", &aet::adapted_pair, py::arg("i"));
    m.def("cutoff_pair", &aet::cutoff_pair, py::arg("i"));
    m.def(
        "pair_from_samples",
        [](const py::array_t<double>& t, const py::array_t<double>& f1, const py::array_t<double>& f2) {
            return aet::pair_from_samples(from_array(t), from_array(f1), from_array(f2));
        },
        py::arg("t"), py::arg("f1"), py::arg("f2"));
    m.def("winding_index", &aet::winding_index, py::arg("pair"));
    m.def(
        "check_admissibility",
        [](const aet::BoundaryPair& p) {
            const auto r = aet::check_admissibility(p);
            py::dict d;
            d["admissible"] = r.admissible;
            d["index"] = r.index;
            d["index_defined"] = r.index_defined;
            d["min_norm"] = r.min_norm;
            d["monotone"] = r.monotone;
            d["zero_mean_residuals"] = py::make_tuple(r.zero_mean_residuals.first, r.zero_mean_residuals.second);
            d["gram_condition"] = r.gram_condition;
            d["failure"] = r.failure_summary();
            return d;
        },
        py::arg("pair"));

    m.def(
        "phantom",
        [](const std::string& name, const py::array_t<double>& x, const py::array_t<double>& y) {
            const auto ph = aet::phantom_from_name(name);
            const auto xs = from_array(x);
            const auto ys = from_array(y);
            if (xs.size() != ys.size()) throw std::invalid_argument("x and y differ in length");
            std::vector<double> out(xs.size());
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = ph(xs[i], ys[i]);
            return to_array(out);
        },
        py::arg("name"), py::arg("x"), py::arg("y"));

    m.def(
        "eigen_floor",
        [](const py::array_t<double>& h11, const py::array_t<double>& h12, const py::array_t<double>& h22,
           double floor_l) {
            if (!(floor_l > 0.0)) throw std::invalid_argument("eigen_floor: L must be positive");
            auto a = from_array(h11);
            auto b = from_array(h12);
            auto c = from_array(h22);
            if (a.size() != b.size() || a.size() != c.size()) throw std::invalid_argument("h arrays differ in length");
            for (std::size_t i = 0; i < a.size(); ++i) {
                const auto f = aet::floor_eigenvalues(a[i], b[i], c[i], floor_l);
                a[i] = f[0];
                b[i] = f[1];
                c[i] = f[2];
            }
            return py::make_tuple(to_array(a), to_array(b), to_array(c));
        },
        py::arg("h11"), py::arg("h12"), py::arg("h22"), py::arg("floor") = 1e-6);

    m.def("log_sym", py::vectorize([](double x, double c) { return aet::log_sym(x, c); }), py::arg("x"),
          py::arg("c") = 1e-3);

    m.def(
        "run_experiment",
        [](const py::kwargs& kw) {
            const auto c = config_from_kwargs(kw);
            aet::RunReport r;
            {
                py::gil_scoped_release release;
                r = aet::run_experiment(c);
            }
            return report_dict(r);
        },
        "Run one experiment. Keyword arguments use the config-file keys "
        "(phantom, family, gamma, alpha, seed, floor, data_h, recon_h, out, noise_norm, f_clamp).");

    m.def(
        "sweep_csv",
        [](const std::string& kind, const py::kwargs& kw) {
            const auto base = config_from_kwargs(kw);
            std::vector<aet::ExperimentConfig> configs;
            if (kind == "arcs") {
                configs = aet::arc_sweep_configs(base);
            } else if (kind == "noise") {
                configs = aet::noise_study_configs(base);
            } else {
                throw std::invalid_argument("kind must be 'arcs' or 'noise'");
            }
            std::string csv;
            {
                py::gil_scoped_release release;
                csv = aet::reports_to_csv(aet::sweep(configs));
            }
            return csv;
        },
        py::arg("kind"));
}
