#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "specden/asymptotics.hpp"
#include "specden/clt_harness.hpp"
#include "specden/ensembles.hpp"
#include "specden/errors.hpp"
#include "specden/kernel.hpp"
#include "specden/kernel_estimation.hpp"
#include "specden/spectral_law.hpp"

namespace py = pybind11;
using namespace specden;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
    return {a.data(), a.data() + a.size()};
}

template <class F>
Array map_points(const Array& xs, F&& f) {
    Array out(xs.request().shape);
    const double* in = xs.data();
    double* o = out.mutable_data();
    for (py::ssize_t i = 0; i < xs.size(); ++i) o[i] = f(in[i]);
    return out;
}

EntryLaw entry_law(const std::string& name) {
    if (name == "normal") return EntryLaw::standard_normal();
    if (name == "rademacher4") return EntryLaw::rademacher4();
    throw DomainError("python", "entry_law", "unknown entry distribution '" + name + "'");
}

py::list intervals(const std::vector<Interval>& s) {
    py::list out;
    for (const auto& i : s) out.append(py::make_tuple(i.lo, i.hi));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "C++ core of specden";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.attr("GAUSSIAN_SIGMA2") = kGaussianSigma2;

    py::class_<SpectralMeasure>(m, "SpectralMeasure")
        .def(py::init([](const std::vector<std::pair<double, double>>& atoms) {
                 std::vector<Atom> a;
                 for (const auto& [t, w] : atoms) a.push_back({t, w});
                 return SpectralMeasure(std::move(a));
             }),
             py::arg("atoms"), "Atoms as (location, weight) pairs; weights must sum to one.")
        .def_static("identity", &SpectralMeasure::identity)
        .def_static("point_mass", &SpectralMeasure::point_mass, py::arg("t"))
        .def_property_readonly("atoms",
                               [](const SpectralMeasure& h) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const auto& a : h.atoms()) out.emplace_back(a.t, a.w);
                                   return out;
                               })
        .def("__len__", &SpectralMeasure::size)
        .def("__repr__", [](const SpectralMeasure& h) {
            return "SpectralMeasure(" + std::to_string(h.size()) + " atoms)";
        });

    py::class_<LawSolution>(m, "LawSolution")
        .def_readonly("c", &LawSolution::c)
        .def_readonly("epsilon", &LawSolution::epsilon)
        .def_property_readonly("support", [](const LawSolution& l) { return intervals(l.support); })
        .def_property_readonly("x",
                               [](const LawSolution& l) {
                                   std::vector<double> x;
                                   for (const auto& p : l.density_grid) x.push_back(p.x);
                                   return py::array(py::cast(x));
                               })
        .def_property_readonly("f", [](const LawSolution& l) {
            std::vector<double> f;
            for (const auto& p : l.density_grid) f.push_back(p.f);
            return py::array(py::cast(f));
        });

    m.def(
        "simulate",
        [](int n, int p, std::uint64_t seed, std::uint64_t replication, const std::string& dist,
           std::optional<SpectralMeasure> t) {
            EnsembleConfig cfg;
            cfg.n = n;
            cfg.p = p;
            cfg.seed = seed;
            cfg.entry = entry_law(dist);
            if (t) cfg.t_spectrum = *t;
            cfg.validate();
            SpectrumSample s;
            {
                py::gil_scoped_release release;
                s = generate_sample(cfg, replication);
            }
            return py::array(py::cast(s.eigenvalues));
        },
        py::arg("n"), py::arg("p"), py::arg("seed") = 0, py::arg("replication") = 0, py::arg("dist") = "normal",
        py::arg("t_spectrum") = py::none(), "Ascending eigenvalues of one sample covariance draw.");

    m.def(
        "stieltjes",
        [](double c, const SpectralMeasure& h, std::complex<double> z) {
            const auto v = solve_stieltjes(c, h, z);
            return py::make_tuple(v.m_under, v.m);
        },
        py::arg("c"), py::arg("h"), py::arg("z"), "(m_under, m) at z in the upper half plane.");

    m.def(
        "find_support", [](double c, const SpectralMeasure& h) { return intervals(find_support(c, h)); },
        py::arg("c"), py::arg("h") = SpectralMeasure::identity());

    m.def(
        "density",
        [](double c, const SpectralMeasure& h, const Array& xs, std::optional<double> eps) {
            const auto support = find_support(c, h);
            const double e = eps.value_or(default_epsilon(support));
            return map_points(xs, [&](double x) { return density(c, h, x, e, support); });
        },
        py::arg("c"), py::arg("h"), py::arg("x"), py::arg("eps") = py::none());

    m.def("solve_law", &solve_law, py::arg("c"), py::arg("h"), py::arg("spacing"), py::arg("eps") = py::none(),
          "Support and density on a uniform grid of the given spacing.");

    m.def(
        "kernel_density",
        [](const Array& eig, const Array& xs, double h, const std::string& kernel) {
            auto e = to_vector(eig);
            std::sort(e.begin(), e.end());
            const auto k = kernel_by_name(kernel);
            return map_points(xs, [&](double x) { return kernel_density_at(e, k, h, x); });
        },
        py::arg("eigenvalues"), py::arg("x"), py::arg("h"), py::arg("kernel") = "gaussian");

    m.def(
        "kernel_cdf",
        [](const Array& eig, const Array& xs, double h, const std::string& kernel) {
            auto e = to_vector(eig);
            std::sort(e.begin(), e.end());
            const auto k = kernel_by_name(kernel);
            return map_points(xs, [&](double x) { return kernel_cdf_at(e, k, h, x); });
        },
        py::arg("eigenvalues"), py::arg("x"), py::arg("h"), py::arg("kernel") = "gaussian");

    m.def(
        "smoothed_target",
        [](const LawSolution& law, const Array& xs, double h, const std::string& kernel) {
            const auto k = kernel_by_name(kernel);
            const DensityInterpolant f(law);
            return map_points(xs, [&](double x) { return smoothed_target(f, k, h, x); });
        },
        py::arg("law"), py::arg("x"), py::arg("h"), py::arg("kernel") = "gaussian");

    m.def(
        "check_kernel",
        [](const std::string& kernel) {
            const auto r = check_kernel(kernel_by_name(kernel));
            py::dict checks;
            for (const auto& c : r.checks) checks[py::str(c.name)] = to_string(c.status);
            return py::dict(py::arg("kernel") = r.kernel_id, py::arg("all_passed") = r.all_passed(),
                            py::arg("checks") = checks);
        },
        py::arg("kernel"));

    m.def(
        "sigma2",
        [](const std::string& kernel, double tol) {
            Sigma2Options opt;
            opt.tol = tol;
            VarianceResult r;
            {
                py::gil_scoped_release release;
                r = sigma2(kernel_by_name(kernel), opt);
            }
            return py::dict(py::arg("kernel") = r.kernel_id, py::arg("sigma2") = r.sigma2,
                            py::arg("reduced_scheme") = r.reduced_scheme, py::arg("tensor_scheme") = r.tensor_scheme,
                            py::arg("quad_error_estimate") = r.quad_error_estimate);
        },
        py::arg("kernel") = "gaussian", py::arg("tol") = 1e-8);

    m.def("cdf_variance", &cdf_variance);

    m.def(
        "optimal_bandwidth",
        [](double c, const SpectralMeasure& h, int n, const std::string& kernel, std::optional<double> x0) {
            const auto support = find_support(c, h);
            const auto law = solve_law(c, h, (support.back().hi - support.front().lo) / 4000.0);
            const auto k = kernel_by_name(kernel);
            MiseOptions opt;
            opt.x0 = x0;
            if (k.id == "gaussian") opt.sigma2 = kGaussianSigma2;
            const auto r = mise_and_optimal_bandwidth(k, law, n, opt);
            return py::dict(py::arg("h_star") = r.h_star, py::arg("c1") = r.c1, py::arg("curvature") = r.curvature,
                            py::arg("x0") = r.x0, py::arg("sigma2") = r.sigma2,
                            py::arg("support_width") = r.support_width, py::arg("numeric_argmin") = r.numeric_argmin);
        },
        py::arg("c"), py::arg("h"), py::arg("n"), py::arg("kernel") = "gaussian", py::arg("x0") = py::none());

    m.def(
        "run_clt",
        [](const std::string& mode, int n, int p, int reps, const std::vector<double>& points,
           std::optional<double> bandwidth, std::uint64_t seed, const std::string& target,
           const std::string& normalization, const std::string& kernel, unsigned threads) {
            if (mode != "density" && mode != "cdf") throw DomainError("python", "run_clt", "mode must be density or cdf");
            CltExperimentConfig cfg;
            cfg.ensemble.n = n;
            cfg.ensemble.p = p;
            cfg.ensemble.seed = seed;
            cfg.reps = reps;
            cfg.estimator.kernel = kernel_by_name(kernel);
            cfg.estimator.bandwidth = bandwidth.value_or(default_bandwidth(n));
            cfg.estimator.eval_points = points;
            cfg.target = centering_from_string(target.empty() ? (mode == "density" ? "smoothed" : "smoothed-cdf")
                                                              : target);
            if (normalization == "p")
                cfg.normalization = Normalization::Dimension;
            else if (normalization != "n")
                throw DomainError("python", "run_clt", "normalization must be n or p");
            cfg.threads = threads;
            CltExperimentResult r;
            {
                py::gil_scoped_release release;
                r = mode == "density" ? run_clt_density(cfg) : run_clt_cdf(cfg);
            }
            py::list verdicts;
            for (const auto& v : r.verdicts)
                verdicts.append(py::dict(py::arg("name") = v.name, py::arg("passed") = v.passed,
                                         py::arg("statistic") = v.statistic, py::arg("threshold") = v.threshold,
                                         py::arg("informational") = v.informational));
            std::vector<double> means, variances;
            for (const auto& s : r.summary) {
                means.push_back(s.mean);
                variances.push_back(s.variance);
            }
            return py::dict(py::arg("z") = r.z_matrix, py::arg("eval_points") = r.eval_points,
                            py::arg("targets") = r.targets, py::arg("mean") = means, py::arg("variance") = variances,
                            py::arg("cross_corr") = r.cross_corr, py::arg("reference_variance") = r.reference_variance,
                            py::arg("scale") = r.scale, py::arg("bandwidth") = r.bandwidth,
                            py::arg("passed") = r.passed(), py::arg("verdicts") = verdicts,
                            py::arg("warnings") = r.warnings);
        },
        py::arg("mode"), py::arg("n"), py::arg("p"), py::arg("reps"), py::arg("points"),
        py::arg("bandwidth") = py::none(), py::arg("seed") = 0, py::arg("target") = "",
        py::arg("normalization") = "n", py::arg("kernel") = "gaussian", py::arg("threads") = 0);

    m.def(
        "check_contour_conditions",
        [](double c, const SpectralMeasure& h, int n, double bandwidth, double v0, int grid, double bound) {
            ContourCheckOptions opt;
            opt.bound = bound;
            const auto r = check_contour_conditions(c, h, n, bandwidth, v0, grid, opt);
            return py::dict(py::arg("all_ok") = r.all_ok(), py::arg("min_d1_ratio") = r.min_d1_ratio,
                            py::arg("max_g38") = r.max_g38, py::arg("max_f11") = r.max_f11,
                            py::arg("d1_ok") = r.d1_ok, py::arg("f11_ok") = r.f11_ok, py::arg("g38_ok") = r.g38_ok,
                            py::arg("notes") = r.notes);
        },
        py::arg("c"), py::arg("h"), py::arg("n"), py::arg("bandwidth"), py::arg("v0") = 1.0, py::arg("grid") = 200,
        py::arg("bound") = 100.0);
}
