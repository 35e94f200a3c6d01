#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "heisflow/experiments.hpp"
#include "heisflow/io.hpp"
#include "heisflow/oracles.hpp"

namespace py = pybind11;
using namespace heisflow;

namespace {

py::array_t<cplx> to_array(const std::vector<cplx>& v) { return py::array_t<cplx>(v.size(), v.data()); }

std::vector<cplx> from_array(py::array_t<cplx, py::array::c_style | py::array::forcecast> a, std::size_t expected) {
    if (static_cast<std::size_t>(a.size()) != expected)
        throw ConfigError("expected " + std::to_string(expected) + " values, got " + std::to_string(a.size()));
    return {a.data(), a.data() + a.size()};
}

py::dict series_dict(const std::vector<SeriesRow>& s) {
    std::vector<double> t, p, e, l4, w, up, dtn, d;
    for (const auto& r : s) {
        t.push_back(r.t);
        p.push_back(r.momentum);
        e.push_back(r.energy);
        l4.push_back(r.l4);
        w.push_back(r.w_norm);
        up.push_back(r.uplus_norm);
        dtn.push_back(r.dt_norm);
        d.push_back(r.dist_orbit);
    }
    py::dict out;
    out["t"] = py::array_t<double>(t.size(), t.data());
    out["momentum"] = py::array_t<double>(p.size(), p.data());
    out["energy"] = py::array_t<double>(e.size(), e.data());
    out["l4"] = py::array_t<double>(l4.size(), l4.data());
    out["w_norm"] = py::array_t<double>(w.size(), w.data());
    out["uplus_norm"] = py::array_t<double>(up.size(), up.data());
    out["dt_norm"] = py::array_t<double>(dtn.size(), dtn.data());
    out["dist_orbit"] = py::array_t<double>(d.size(), d.data());
    return out;
}

IntegratorConfig make_config(const std::string& scheme, double dt, double t_final, std::size_t sample_every) {
    IntegratorConfig c;
    if (scheme == "rk4")
        c.scheme = Scheme::rk4;
    else if (scheme == "ifrk4")
        c.scheme = Scheme::ifrk4;
    else if (scheme == "etdrk4")
        c.scheme = Scheme::etdrk4;
    else
        throw ConfigError("unknown scheme " + scheme);
    c.dt = dt;
    c.t_final = t_final;
    c.sample_every = sample_every;
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hardy-space and Heisenberg-group spectral kernels, flows and orbit diagnostics";
    m.attr("__version__") = HEISFLOW_VERSION;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    py::class_<FrequencyGrid>(m, "FrequencyGrid")
        .def(py::init<>())
        .def_static("trapezoid", &FrequencyGrid::trapezoid, py::arg("sigma_min"), py::arg("sigma_max"), py::arg("n"))
        .def_static("cell_centered", &FrequencyGrid::cell_centered, py::arg("spacing"), py::arg("n"))
        .def_property_readonly("size", &FrequencyGrid::size)
        .def_property_readonly("spacing", &FrequencyGrid::spacing)
        .def_property_readonly("nodes", [](const FrequencyGrid& g) {
            auto n = g.nodes();
            return py::array_t<double>(n.size(), n.data());
        })
        .def("__len__", &FrequencyGrid::size)
        .def("__eq__", &FrequencyGrid::operator==);

    py::class_<HardyFunction>(m, "HardyFunction")
        .def(py::init<FrequencyGrid>())
        .def(py::init([](FrequencyGrid g, py::array_t<cplx, py::array::c_style | py::array::forcecast> v) {
                 return HardyFunction(g, from_array(v, g.size()));
             }),
             py::arg("grid"), py::arg("values"))
        .def_property_readonly("grid", &HardyFunction::grid)
        .def_property(
            "values", [](const HardyFunction& f) { return to_array(f.values()); },
            [](HardyFunction& f, py::array_t<cplx, py::array::c_style | py::array::forcecast> v) {
                f.values() = from_array(v, f.size());
            })
        .def("__len__", &HardyFunction::size)
        .def(py::self + py::self)
        .def(py::self - py::self)
        .def("__mul__", [](const HardyFunction& f, cplx c) { return c * f; })
        .def("__rmul__", [](const HardyFunction& f, cplx c) { return c * f; });

    py::class_<SymmetryElement>(m, "SymmetryElement")
        .def(py::init([](double s, double theta, double alpha) { return SymmetryElement{s, theta, alpha}; }),
             py::arg("s") = 0.0, py::arg("theta") = 0.0, py::arg("alpha") = 1.0)
        .def_readwrite("s", &SymmetryElement::s)
        .def_readwrite("theta", &SymmetryElement::theta)
        .def_readwrite("alpha", &SymmetryElement::alpha)
        .def("inverse", &SymmetryElement::inverse)
        .def("norm", &SymmetryElement::norm)
        .def("__repr__", [](const SymmetryElement& x) {
            return "SymmetryElement(s=" + std::to_string(x.s) + ", theta=" + std::to_string(x.theta) +
                   ", alpha=" + std::to_string(x.alpha) + ")";
        });
    m.def("compose", &compose);

    m.def("ground_state_profile", &hardy::ground_state_profile, py::arg("grid") = FrequencyGrid());
    m.def("sobolev2", py::overload_cast<const HardyFunction&, double>(&hardy::sobolev2), py::arg("u"), py::arg("k") = 1.0);
    m.def("l4norm4", py::overload_cast<const HardyFunction&>(&hardy::l4norm4));
    m.def("cubic_projection", &hardy::cubic_projection);
    m.def("apply_symmetry", py::overload_cast<const HardyFunction&, const SymmetryElement&>(&hardy::apply_symmetry));
    m.def("synthesize", [](const HardyFunction& u, py::array_t<cplx, py::array::c_style | py::array::forcecast> z) {
        std::vector<cplx> pts(z.data(), z.data() + z.size());
        return to_array(hardy::synthesize(u, pts));
    });

    py::class_<OrbitFit>(m, "OrbitFit")
        .def_readonly("distance", &OrbitFit::distance)
        .def_readonly("x_star", &OrbitFit::x_star)
        .def_readonly("converged", &OrbitFit::converged)
        .def("anchor", &OrbitFit::anchor);
    py::class_<HeisOrbitFit>(m, "HeisOrbitFit")
        .def_readonly("plus", &HeisOrbitFit::plus)
        .def_readonly("w_norm", &HeisOrbitFit::w_norm)
        .def_readonly("distance", &HeisOrbitFit::distance);
    m.def("gap_closed_form", &modulation::gap_closed_form);
    m.def("distance_to_orbit",
          [](const HardyFunction& u) { return modulation::distance_to_orbit(u, OrbitReference::analytic()); });
    m.def("delta_functional", [](const HardyFunction& u) { return modulation::delta_functional(u); });

    m.def(
        "evolve_limit",
        [](const HardyFunction& u0, double dt, double t_final, std::size_t sample_every) {
            auto tr = evolve_limit(u0, make_config("rk4", dt, t_final, sample_every));
            return py::make_tuple(tr.snapshots, series_dict(tr.series));
        },
        py::arg("u0"), py::arg("dt") = 1e-3, py::arg("t_final") = 1.0, py::arg("sample_every") = 100,
        "Returns (snapshots, series) for i u_t = cubic_projection(u).");

    py::class_<RadialGridSpec>(m, "RadialGridSpec")
        .def(py::init([](std::size_t k_max, std::size_t n_sigma, double sigma_max) {
                 RadialGridSpec s;
                 s.k_max = k_max;
                 s.n_sigma = n_sigma;
                 s.sigma_max = sigma_max;
                 return s;
             }),
             py::arg("k_max") = 8, py::arg("n_sigma") = 160, py::arg("sigma_max") = 20.0)
        .def_readwrite("k_max", &RadialGridSpec::k_max)
        .def_readwrite("n_sigma", &RadialGridSpec::n_sigma)
        .def_readwrite("sigma_max", &RadialGridSpec::sigma_max);

    py::class_<RadialSpectralGrid>(m, "RadialSpectralGrid")
        .def(py::init<const RadialGridSpec&>(), py::arg("spec") = RadialGridSpec())
        .def_property_readonly("k_max", &RadialSpectralGrid::k_max)
        .def_property_readonly("n_sigma", &RadialSpectralGrid::n_sigma)
        .def_property_readonly("spacing", &RadialSpectralGrid::spacing)
        .def("hardy_grid", &RadialSpectralGrid::hardy_grid);

    // coefficients exposed with shape (k_max + 1, 2, n_sigma); sign index 0 is +
    py::class_<RadialField>(m, "RadialField")
        .def(py::init<RadialSpectralGrid>())
        .def_property_readonly("grid", &RadialField::grid)
        .def_property(
            "coeffs",
            [](const RadialField& u) {
                const auto& g = u.grid();
                py::array_t<cplx> a({g.k_max() + 1, std::size_t{2}, g.n_sigma()});
                std::copy(u.coeffs().begin(), u.coeffs().end(), a.mutable_data());
                return a;
            },
            [](RadialField& u, py::array_t<cplx, py::array::c_style | py::array::forcecast> v) {
                u.coeffs() = from_array(v, u.coeffs().size());
            })
        .def(py::self + py::self)
        .def(py::self - py::self)
        .def("__mul__", [](const RadialField& f, cplx c) { return c * f; })
        .def("__rmul__", [](const RadialField& f, cplx c) { return c * f; });

    auto h = m.def_submodule("heis", "Heisenberg-side operations on radial fields");
    h.def("embed_hardy", &heis::embed_hardy);
    h.def("extract_hardy", &heis::extract_hardy);
    h.def("sobolev2", py::overload_cast<const RadialField&, int>(&heis::sobolev2), py::arg("u"), py::arg("j") = 1);
    h.def("momentum", &heis::momentum);
    h.def("l4norm4", py::overload_cast<const RadialField&>(&heis::l4norm4));
    h.def("energy", &heis::energy);
    h.def("energy_gamma", &heis::energy_gamma);
    h.def("apply_symmetry", py::overload_cast<const RadialField&, const SymmetryElement&>(&heis::apply_symmetry));
    h.def("cubic", [](const RadialField& u) { return heis::cubic_truncated(u, Truncation::none()); });
    h.def("w_norm", [](const RadialField& u) { return std::sqrt(heis::sobolev2(heis::split_plus(u).rest, 1)); });
    h.def("distance_to_orbit", [](const RadialField& u) {
        return modulation::distance_to_orbit(u, OrbitReference::discrete(u.grid().hardy_grid()));
    });
    h.def("distance_to_reference",
          [](const RadialField& u, const RadialField& r) { return modulation::distance_to_orbit(u, r); });
    h.def(
        "evolve",
        [](const RadialField& u0, double gamma, double dt, double t_final, std::size_t sample_every,
           const std::string& scheme) {
            auto tr = evolve_heis(u0, gamma, Truncation::none(), make_config(scheme, dt, t_final, sample_every));
            return py::make_tuple(tr.snapshots, series_dict(tr.series));
        },
        py::arg("u0"), py::arg("gamma"), py::arg("dt") = 1e-3, py::arg("t_final") = 1.0, py::arg("sample_every") = 100,
        py::arg("scheme") = "etdrk4");
    h.def("initial_family", &experiments::initial_family, py::arg("u0"), py::arg("beta"), py::arg("gamma"));

    m.def(
        "solve_ground_state",
        [](double beta, const RadialSpectralGrid& grid, double tol) {
            PetviashviliOptions o;
            o.tol = tol;
            auto r = groundstate::solve(beta, groundstate::initial_guess(grid), Truncation::none(), o);
            return py::make_tuple(r.profile, r.residual, r.iterations);
        },
        py::arg("beta"), py::arg("grid"), py::arg("tol") = 1e-9, "Returns (Q_beta, residual, iterations).");

    m.def("oracle_suite", [] {
        py::list out;
        for (const auto& c : oracle::run_suite()) {
            py::dict d;
            d["name"] = c.name;
            d["error"] = c.error;
            d["tolerance"] = c.tolerance;
            d["pass"] = c.pass;
            out.append(d);
        }
        return out;
    });

    m.def("write_hardy", [](const std::string& p, const HardyFunction& f) { io::write_hardy(p, f); });
    m.def("read_hardy", [](const std::string& p) { return io::read_hardy(p); });
    m.def("write_radial", [](const std::string& p, const RadialField& u) { io::write_radial(p, u); });
    m.def("read_radial", [](const std::string& p) { return io::read_radial(p); });
}
