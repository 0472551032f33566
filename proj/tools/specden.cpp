// specden command line tool.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli_support.hpp"
#include "specden/asymptotics.hpp"
#include "specden/clt_harness.hpp"
#include "specden/ensembles.hpp"
#include "specden/errors.hpp"
#include "specden/kernel_estimation.hpp"
#include "specden/spectral_law.hpp"

using namespace specden;
using namespace specden::cli;

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SPECDEN_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw DomainError("cli", "SPECDEN_SEED", std::string("not an unsigned integer: ") + env);
        }
    }
    return 0;
}

struct Globals {
    bool json_stdout = false;
    unsigned threads = 0;
    std::vector<std::string> argv;
};

void emit(const Globals& g, const json& j, bool always = false) {
    if (g.json_stdout || always) std::cout << j.dump(2) << std::endl;
}

SpectralMeasure spectrum_from(const std::string& path, Manifest& manifest) {
    if (path.empty()) return SpectralMeasure::identity();
    manifest.add_input(path);
    return load_spectral_measure(path);
}

json intervals_json(const std::vector<Interval>& support) {
    json out = json::array();
    for (const auto& i : support) out.push_back({i.lo, i.hi});
    return out;
}

EntryLaw entry_law(const std::string& name) {
    if (name == "normal") return EntryLaw::standard_normal();
    if (name == "rademacher4") return EntryLaw::rademacher4();
    throw DomainError("cli", "entry_law", "unknown entry distribution '" + name + "'");
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    int n = 0, p = 0, reps = 1;
    std::string dist = "normal", t_spectrum, out;
    std::uint64_t seed = 0;
};

int run_simulate(const SimulateArgs& a, const CLI::App& sub, const Globals& g) {
    Manifest manifest("simulate", g.argv);
    EnsembleConfig cfg;
    cfg.n = a.n;
    cfg.p = a.p;
    cfg.entry = entry_law(a.dist);
    cfg.t_spectrum = spectrum_from(a.t_spectrum, manifest);
    cfg.seed = a.seed;
    cfg.validate();
    if (a.reps < 1) throw DomainError("cli", "simulate", "reps must be >= 1");
    const fs::path dir = a.out;
    fs::create_directories(dir);
    json files = json::array();
    for (int r = 0; r < a.reps; ++r) {
        const auto sample = generate_sample(cfg, static_cast<std::uint64_t>(r));
        const auto path = dir / ("eig_" + std::to_string(r) + ".csv");
        {
            CsvWriter csv(path, {"lambda"});
            for (double l : sample.eigenvalues) csv.row({l});
        }
        manifest.add_output(path);
        files.push_back(path.filename().string());
    }
    auto config = resolved_options(sub);
    config["t_spectrum_atoms"] = cfg.t_spectrum;
    config["seed"] = a.seed;
    manifest.set_config(config);
    manifest.add_seed("seed", a.seed);
    manifest.write(dir);
    std::cerr << "simulate: wrote " << a.reps << " spectra to " << dir << "\n";
    emit(g, {{"outputs", files}, {"n", a.n}, {"p", a.p}, {"reps", a.reps}});
    return 0;
}

// ----------------------------------------------------------------- density

struct DensityArgs {
    double c = 0.0;
    std::string t_spectrum, grid, out;
    std::optional<double> eps;
};

int run_density(const DensityArgs& a, const CLI::App& sub, const Globals& g) {
    Manifest manifest("density", g.argv);
    const auto h = spectrum_from(a.t_spectrum, manifest);
    if (!(a.c > 0.0 && a.c < 1.0)) throw DomainError("spectral-law", "density", "c must lie in (0, 1)");
    const auto support = find_support(a.c, h);
    const double eps = a.eps.value_or(default_epsilon(support));
    std::vector<double> xs;
    if (a.grid.empty()) {
        const double step = (support.back().hi - support.front().lo) / 1000.0;
        xs = parse_grid(std::to_string(support.front().lo) + ":" + std::to_string(support.back().hi) + ":" +
                        std::to_string(step));
    } else {
        xs = parse_grid(a.grid);
    }
    const fs::path out = a.out;
    ensure_parent(out);
    double mass = 0.0, prev_x = 0.0, prev_f = 0.0;
    {
        CsvWriter csv(out, {"x", "f"});
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double f = density(a.c, h, xs[i], eps, support);
            csv.row({xs[i], f});
            if (i > 0) mass += 0.5 * (f + prev_f) * (xs[i] - prev_x);
            prev_x = xs[i];
            prev_f = f;
        }
    }
    manifest.add_output(out);
    auto config = resolved_options(sub);
    config["eps"] = eps;
    manifest.set_config(config);
    manifest.write(out.parent_path().empty() ? fs::path(".") : out.parent_path());
    std::cerr << "density: " << xs.size() << " points, trapezoid mass " << mass << "\n";
    emit(g, {{"support", intervals_json(support)}, {"epsilon", eps}, {"points", xs.size()}, {"grid_mass", mass},
             {"out", out.string()}});
    return 0;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
    std::string eig, kernel = "gaussian", grid, t_spectrum, out;
    double h = 0.0;
    std::optional<double> c;
};

int run_estimate(const EstimateArgs& a, const CLI::App& sub, const Globals& g) {
    Manifest manifest("estimate", g.argv);
    manifest.add_input(a.eig);
    auto eig = read_column_csv(a.eig);
    if (eig.empty()) throw DomainError("kernel-estimation", "estimate", "no eigenvalues in " + a.eig);
    std::sort(eig.begin(), eig.end());
    const auto k = kernel_by_name(a.kernel);
    if (!(a.h > 0.0)) throw DomainError("kernel-estimation", "estimate", "--h must be > 0");

    // the law: explicit flags, else the simulate manifest next to the spectrum
    double c = 0.0;
    SpectralMeasure t;
    if (a.c) {
        c = *a.c;
        t = spectrum_from(a.t_spectrum, manifest);
    } else {
        const auto sibling = fs::path(a.eig).parent_path() / "manifest.json";
        if (!fs::exists(sibling))
            throw DomainError("kernel-estimation", "estimate", "need --c (and --t-spectrum) or a simulate manifest next to --eig");
        json m;
        std::ifstream(sibling) >> m;
        const auto& cfg = m.at("config");
        const int n = std::stoi(cfg.at("n").get<std::string>());
        const int p = std::stoi(cfg.at("p").get<std::string>());
        c = static_cast<double>(p) / n;
        t = cfg.at("t_spectrum_atoms").get<SpectralMeasure>().discretized(static_cast<std::size_t>(p));
        manifest.add_input(sibling);
    }
    const auto law = solve_law(c, t, a.h / 20.0);
    const DensityInterpolant f(law);
    const auto xs = parse_grid(a.grid);
    const fs::path out = a.out;
    ensure_parent(out);
    {
        CsvWriter csv(out, {"x", "fn", "Fn", "smoothed_target", "f_limit"});
        for (double x : xs)
            csv.row({x, kernel_density_at(eig, k, a.h, x), kernel_cdf_at(eig, k, a.h, x), smoothed_target(f, k, a.h, x),
                     f(x)});
    }
    manifest.add_output(out);
    auto config = resolved_options(sub);
    config["c"] = c;
    config["t_spectrum_atoms"] = t;
    manifest.set_config(config);
    manifest.write(out.parent_path().empty() ? fs::path(".") : out.parent_path());
    std::cerr << "estimate: " << xs.size() << " points from " << eig.size() << " eigenvalues\n";
    emit(g, {{"c", c}, {"support", intervals_json(law.support)}, {"points", xs.size()}, {"out", out.string()}});
    return 0;
}

// ------------------------------------------------------------------ sigma2

struct Sigma2Args {
    std::string kernel = "gaussian", out;
    double tol = 1e-8;
};

int run_sigma2(const Sigma2Args& a, const CLI::App& sub, const Globals& g) {
    Sigma2Options opt;
    opt.tol = a.tol;
    const auto r = sigma2(kernel_by_name(a.kernel), opt);
    const json j = {{"kernel", r.kernel_id},
                    {"sigma2", r.sigma2},
                    {"quad_error_estimate", r.quad_error_estimate},
                    {"reduced_scheme", r.reduced_scheme},
                    {"tensor_scheme", r.tensor_scheme},
                    {"cdf_variance", cdf_variance()}};
    if (!a.out.empty()) {
        Manifest manifest("sigma2", g.argv);
        const fs::path out = a.out;
        ensure_parent(out);
        std::ofstream(out) << std::setprecision(17) << j.dump(2) << '\n';
        manifest.add_output(out);
        manifest.set_config(resolved_options(sub));
        manifest.write(out.parent_path().empty() ? fs::path(".") : out.parent_path());
    }
    emit(g, j, true);
    return 0;
}

// --------------------------------------------------------------- bandwidth

struct BandwidthArgs {
    int n = 0;
    double c = 0.0;
    std::string t_spectrum, kernel = "gaussian", out;
    std::optional<double> x0;
};

int run_bandwidth(const BandwidthArgs& a, const CLI::App& sub, const Globals& g) {
    Manifest manifest("bandwidth", g.argv);
    const auto h = spectrum_from(a.t_spectrum, manifest);
    const auto k = kernel_by_name(a.kernel);
    const auto support = find_support(a.c, h);
    const double width = support.back().hi - support.front().lo;
    const auto law = solve_law(a.c, h, width / 4000.0);
    MiseOptions opt;
    opt.x0 = a.x0;
    if (k.id == "gaussian") opt.sigma2 = kGaussianSigma2;
    const auto r = mise_and_optimal_bandwidth(k, law, a.n, opt);
    const json j = {{"h_star", r.h_star},       {"sigma2", r.sigma2},
                    {"c1", r.c1},               {"x0", r.x0},
                    {"curvature", r.curvature}, {"support_width", r.support_width},
                    {"n", r.n},                 {"numeric_argmin", r.numeric_argmin}};
    if (!a.out.empty()) {
        const fs::path dir = a.out;
        fs::create_directories(dir);
        std::ofstream(dir / "bandwidth.json") << j.dump(2) << '\n';
        {
            CsvWriter csv(dir / "mise_curve.csv", {"h", "mise"});
            for (const auto& p : r.mise_curve) csv.row({p.h, p.loss});
        }
        manifest.add_output(dir / "bandwidth.json");
        manifest.add_output(dir / "mise_curve.csv");
        manifest.set_config(resolved_options(sub));
        manifest.write(dir);
    }
    emit(g, j, true);
    return 0;
}

// --------------------------------------------------------------------- clt

struct CltArgs {
    std::string mode = "density", kernel = "gaussian", points, target, normalization = "n", dist = "normal",
                t_spectrum, out;
    int n = 800, p = 160, reps = 500;
    double h_exponent = kDefaultBandwidthExponent;
    std::optional<double> h;
    std::uint64_t seed = 0;
    VerdictSlack slack;
};

json result_json(const CltExperimentResult& r) {
    json summary = json::array();
    for (std::size_t j = 0; j < r.summary.size(); ++j) {
        const auto& s = r.summary[j];
        summary.push_back({{"x", r.eval_points[j]},
                           {"target", r.targets[j]},
                           {"mean", s.mean},
                           {"variance", s.variance},
                           {"variance_ratio", s.variance / r.reference_variance},
                           {"skewness", s.skewness},
                           {"excess_kurtosis", s.excess_kurtosis}});
    }
    json verdicts = json::array();
    for (const auto& v : r.verdicts)
        verdicts.push_back({{"name", v.name},
                            {"passed", v.passed},
                            {"statistic", v.statistic},
                            {"threshold", v.threshold},
                            {"informational", v.informational}});
    json corr = json::array();
    for (Eigen::Index i = 0; i < r.cross_corr.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < r.cross_corr.cols(); ++j) row.push_back(r.cross_corr(i, j));
        corr.push_back(row);
    }
    return {{"passed", r.passed()},
            {"target", to_string(r.target)},
            {"normalization", to_string(r.normalization)},
            {"bandwidth", r.bandwidth},
            {"scale", r.scale},
            {"reference_variance", r.reference_variance},
            {"reps", r.z_matrix.rows()},
            {"summary", summary},
            {"cross_corr", corr},
            {"verdicts", verdicts},
            {"warnings", r.warnings},
            {"bias_diagnostic", r.bias_diagnostic}};
}

int run_clt(const CltArgs& a, const CLI::App& sub, const Globals& g) {
    Manifest manifest("clt", g.argv);
    if (a.mode != "density" && a.mode != "cdf")
        throw DomainError("clt-harness", "clt", "--mode must be density or cdf");
    CltExperimentConfig cfg;
    cfg.ensemble.n = a.n;
    cfg.ensemble.p = a.p;
    cfg.ensemble.entry = entry_law(a.dist);
    cfg.ensemble.t_spectrum = spectrum_from(a.t_spectrum, manifest);
    cfg.ensemble.seed = a.seed;
    cfg.reps = a.reps;
    cfg.estimator.kernel = kernel_by_name(a.kernel);
    cfg.estimator.bandwidth = a.h.value_or(default_bandwidth(a.n, a.h_exponent));
    cfg.estimator.eval_points = a.points.empty() ? std::vector<double>{} : parse_list(a.points);
    cfg.target = centering_from_string(a.target.empty() ? (a.mode == "density" ? "smoothed" : "smoothed-cdf") : a.target);
    if (a.normalization == "n")
        cfg.normalization = Normalization::SampleSize;
    else if (a.normalization == "p")
        cfg.normalization = Normalization::Dimension;
    else
        throw DomainError("clt-harness", "clt", "--normalization must be n or p");
    cfg.slack = a.slack;
    cfg.threads = g.threads;

    const auto r = a.mode == "density" ? run_clt_density(cfg) : run_clt_cdf(cfg);
    for (const auto& w : r.warnings) std::cerr << "clt: warning: " << w << "\n";

    const fs::path out = a.out;
    ensure_parent(out);
    const fs::path dir = out.parent_path().empty() ? fs::path(".") : out.parent_path();
    const auto j = result_json(r);
    std::ofstream(out) << j.dump(2) << '\n';
    {
        std::vector<std::string> header;
        for (double x : r.eval_points) {
            std::ostringstream s;
            s << "x=" << x;
            header.push_back(s.str());
        }
        CsvWriter csv(dir / "z_matrix.csv", header);
        for (Eigen::Index i = 0; i < r.z_matrix.rows(); ++i) {
            std::vector<double> row(r.z_matrix.cols());
            for (Eigen::Index c = 0; c < r.z_matrix.cols(); ++c) row[c] = r.z_matrix(i, c);
            csv.row(row);
        }
    }
    manifest.add_output(out);
    manifest.add_output(dir / "z_matrix.csv");
    auto config = resolved_options(sub);
    config["bandwidth"] = cfg.estimator.bandwidth;
    config["target"] = to_string(cfg.target);
    manifest.set_config(config);
    manifest.add_seed("seed", a.seed);
    manifest.write(dir);
    for (const auto& v : r.verdicts)
        std::cerr << "clt: " << v.name << (v.informational ? " [info] " : " ") << (v.passed ? "ok" : "FAIL")
                  << " statistic=" << v.statistic << " threshold=" << v.threshold << "\n";
    emit(g, j);
    return 0;
}

// -------------------------------------------------------- check-conditions

struct ConditionsArgs {
    double c = 0.0, h = 0.0, v0 = 1.0;
    int n = 0, grid = 200;
    std::string t_spectrum, out;
    ContourCheckOptions options;
};

int run_conditions(const ConditionsArgs& a, const CLI::App& sub, const Globals& g) {
    Manifest manifest("check-conditions", g.argv);
    const auto h = spectrum_from(a.t_spectrum, manifest);
    const auto r = check_contour_conditions(a.c, h, a.n, a.h, a.v0, a.grid, a.options);
    json failed = json::array();
    for (const auto& z : r.failed_points) failed.push_back({z.real(), z.imag()});
    const json j = {{"contour", {{"a_l", r.contour.a_l}, {"a_r", r.contour.a_r}, {"height", r.contour.height}}},
                    {"grid", r.grid},
                    {"min_d1_ratio", r.min_d1_ratio},
                    {"argmin_d1", {r.argmin_d1.real(), r.argmin_d1.imag()}},
                    {"max_f11", r.max_f11},
                    {"max_g38", r.max_g38},
                    {"f11_uses_proxy", r.f11_uses_proxy},
                    {"bound", r.bound},
                    {"d1_ok", r.d1_ok},
                    {"f11_ok", r.f11_ok},
                    {"g38_ok", r.g38_ok},
                    {"all_ok", r.all_ok()},
                    {"failed_points", failed},
                    {"notes", r.notes}};
    const fs::path out = a.out;
    ensure_parent(out);
    std::ofstream(out) << j.dump(2) << '\n';
    manifest.add_output(out);
    manifest.set_config(resolved_options(sub));
    manifest.add_seed("seed", a.options.seed);
    manifest.write(out.parent_path().empty() ? fs::path(".") : out.parent_path());
    std::cerr << "check-conditions: " << (r.all_ok() ? "all conditions hold" : "condition failure") << "\n";
    emit(g, j);
    return 0;
}

int dispatch(std::vector<std::string> args);

// ------------------------------------------------------------------ replay

struct ReplayArgs {
    std::string manifest, out;
};

int run_replay(const ReplayArgs& a, const Globals& g) {
    json m;
    {
        std::ifstream in(a.manifest);
        if (!in) throw DomainError("cli", "replay", "cannot open " + a.manifest);
        try {
            in >> m;
        } catch (const json::exception& e) {
            throw DomainError("cli", "replay", std::string("invalid manifest: ") + e.what());
        }
    }
    auto argv = m.at("argv").get<std::vector<std::string>>();
    const fs::path target = a.out.empty() ? fs::path(a.manifest).parent_path() / "replay" : fs::path(a.out);
    // point --out into the replay directory and keep the rerun quiet on stdout
    std::vector<std::string> rerun;
    for (std::size_t i = 0; i < argv.size(); ++i) {
        if (argv[i] == "--json") continue;
        if (argv[i] == "--out" && i + 1 < argv.size()) {
            const fs::path original = argv[++i];
            const bool is_dir = m.at("subcommand") == "simulate" || m.at("subcommand") == "bandwidth";
            rerun.push_back("--out");
            rerun.push_back((is_dir ? target : target / original.filename()).string());
            continue;
        }
        rerun.push_back(argv[i]);
    }
    fs::create_directories(target);
    if (const int code = dispatch(rerun); code != 0) return code;

    bool matched = true;
    json files = json::array();
    for (const auto& o : m.at("outputs")) {
        const auto name = o.at("path").get<std::string>();
        const auto path = target / name;
        const auto actual = fs::exists(path) ? sha256_file(path) : std::string("missing");
        const bool same = actual == o.at("sha256").get<std::string>();
        matched = matched && same;
        files.push_back({{"path", name}, {"expected", o.at("sha256")}, {"actual", actual}, {"matched", same}});
    }
    std::cerr << "replay: " << (matched ? "all outputs reproduced" : "outputs differ") << "\n";
    emit(g, {{"matched", matched}, {"files", files}, {"replay_dir", target.string()}});
    if (!matched) throw NumericalError("cli", "replay", "re-run outputs differ from the manifest digests");
    return 0;
}

// ------------------------------------------------------------------- setup

int dispatch(std::vector<std::string> args) {
    CLI::App app{"Kernel estimation of limiting spectral densities of sample covariance matrices", "specden"};
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file; flags override it, it overrides defaults");
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    Globals g;
    g.argv = args;
    app.add_flag("--json", g.json_stdout, "Print a JSON summary on stdout");
    app.add_option("--threads", g.threads, "Cap on worker threads (0 = hardware concurrency)");
    const std::uint64_t seed0 = default_seed();

    SimulateArgs sim;
    sim.seed = seed0;
    auto* s = app.add_subcommand("simulate", "Draw sample covariance spectra");
    s->add_option("--n", sim.n, "Sample size n")->required();
    s->add_option("--p", sim.p, "Dimension p (< n)")->required();
    s->add_option("--dist", sim.dist, "Entry law: normal or rademacher4")->capture_default_str();
    s->add_option("--t-spectrum", sim.t_spectrum, "Population spectrum JSON (default: identity)");
    s->add_option("--seed", sim.seed, "Base seed (default: $SPECDEN_SEED or 0)")->capture_default_str();
    s->add_option("--reps", sim.reps, "Number of replications")->capture_default_str();
    s->add_option("--out", sim.out, "Output directory")->required();

    DensityArgs den;
    auto* d = app.add_subcommand("density", "Limiting spectral density on a grid");
    d->add_option("--c", den.c, "Aspect ratio p/n in (0, 1)")->required();
    d->add_option("--t-spectrum", den.t_spectrum, "Population spectrum JSON (default: identity)");
    d->add_option("--grid", den.grid, "a:b:step (default: 1001 points over the support)");
    d->add_option("--eps", den.eps, "Imaginary offset for the boundary evaluation");
    d->add_option("--out", den.out, "Output CSV (x, f)")->required();

    EstimateArgs est;
    auto* e = app.add_subcommand("estimate", "Kernel estimate of the density and CDF from a spectrum");
    e->set_help_flag("--help", "Print this help message and exit");  // -h is not free: --h is the bandwidth
    e->add_option("--eig", est.eig, "Eigenvalue CSV (column lambda)")->required();
    e->add_option("--kernel", est.kernel, "gaussian, epanechnikov or biweight")->capture_default_str();
    e->add_option("--h", est.h, "Bandwidth")->required();
    e->add_option("--grid", est.grid, "a:b:step")->required();
    e->add_option("--c", est.c, "Aspect ratio for the limiting law (default: from the simulate manifest)");
    e->add_option("--t-spectrum", est.t_spectrum, "Population spectrum JSON used with --c");
    e->add_option("--out", est.out, "Output CSV (x, fn, Fn, smoothed_target, f_limit)")->required();

    Sigma2Args sig;
    auto* v = app.add_subcommand("sigma2", "Limiting variance constant of the density estimator");
    v->add_option("--kernel", sig.kernel, "gaussian, epanechnikov or biweight")->capture_default_str();
    v->add_option("--tol", sig.tol, "Quadrature tolerance")->capture_default_str();
    v->add_option("--out", sig.out, "Also write the JSON to this file");

    BandwidthArgs bw;
    auto* b = app.add_subcommand("bandwidth", "Leading-order MISE and its optimal bandwidth");
    b->add_option("--n", bw.n, "Sample size")->required();
    b->add_option("--c", bw.c, "Aspect ratio in (0, 1)")->required();
    b->add_option("--t-spectrum", bw.t_spectrum, "Population spectrum JSON (default: identity)");
    b->add_option("--kernel", bw.kernel, "Kernel name")->capture_default_str();
    b->add_option("--x0", bw.x0, "Point where the curvature is taken (default: support midpoint)");
    b->add_option("--out", bw.out, "Directory for bandwidth.json and mise_curve.csv");

    CltArgs clt;
    clt.seed = seed0;
    auto* c = app.add_subcommand("clt", "Monte Carlo check of the estimator's limiting normal law");
    c->set_help_flag("--help", "Print this help message and exit");  // -h is not free: --h is the bandwidth
    c->add_option("--mode", clt.mode, "density or cdf")->capture_default_str();
    c->add_option("--n", clt.n, "Sample size")->capture_default_str();
    c->add_option("--p", clt.p, "Dimension")->capture_default_str();
    c->add_option("--reps", clt.reps, "Replications R")->capture_default_str();
    c->add_option("--kernel", clt.kernel, "Kernel name")->capture_default_str();
    c->add_option("--h-exponent", clt.h_exponent, "Bandwidth h = n^-exponent")->capture_default_str();
    c->add_option("--h", clt.h, "Explicit bandwidth (overrides --h-exponent)");
    c->add_option("--points", clt.points, "Comma separated evaluation points")->required();
    c->add_option("--target", clt.target, "smoothed, limit, self, smoothed-cdf or limit-cdf");
    c->add_option("--normalization", clt.normalization, "Scale by n or by p")->capture_default_str();
    c->add_option("--dist", clt.dist, "Entry law")->capture_default_str();
    c->add_option("--t-spectrum", clt.t_spectrum, "Population spectrum JSON (default: identity)");
    c->add_option("--seed", clt.seed, "Base seed (default: $SPECDEN_SEED or 0)")->capture_default_str();
    c->add_option("--slack-mean-se", clt.slack.mean_standard_errors, "Mean verdict, in standard errors")->capture_default_str();
    c->add_option("--slack-variance", clt.slack.variance, "Density variance verdict |ratio - 1| bound")->capture_default_str();
    c->add_option("--slack-correlation", clt.slack.correlation, "Density cross-correlation bound")->capture_default_str();
    c->add_option("--slack-cdf-variance-lo", clt.slack.cdf_variance_lo, "CDF variance ratio lower bound")->capture_default_str();
    c->add_option("--slack-cdf-variance-hi", clt.slack.cdf_variance_hi, "CDF variance ratio upper bound")->capture_default_str();
    c->add_option("--slack-cdf-correlation", clt.slack.cdf_correlation, "CDF cross-correlation bound")->capture_default_str();
    c->add_option("--slack-skewness", clt.slack.skewness_factor, "Skewness bound factor on sqrt(6/R)")->capture_default_str();
    c->add_option("--slack-kurtosis", clt.slack.kurtosis_factor, "Kurtosis bound factor on sqrt(24/R)")->capture_default_str();
    c->add_option("--out", clt.out, "Result JSON; z_matrix.csv goes next to it")->required();

    ConditionsArgs cc;
    cc.options.seed = seed0;
    auto* k = app.add_subcommand("check-conditions", "Scan the regularity conditions along the integration contour");
    k->set_help_flag("--help", "Print this help message and exit");  // -h is not free: --h is the bandwidth
    k->add_option("--c", cc.c, "Aspect ratio in (0, 1)")->required();
    k->add_option("--t-spectrum", cc.t_spectrum, "Population spectrum JSON (default: identity)");
    k->add_option("--n", cc.n, "Sample size")->required();
    k->add_option("--h", cc.h, "Bandwidth")->required();
    k->add_option("--v0", cc.v0, "Contour height factor")->capture_default_str();
    k->add_option("--grid", cc.grid, "Points per side")->capture_default_str();
    k->add_option("--bound", cc.options.bound, "Bound M for the integral conditions")->capture_default_str();
    k->add_option("--a-l", cc.options.a_l, "Left side of the contour");
    k->add_option("--a-r", cc.options.a_r, "Right side of the contour");
    k->add_option("--expectation-reps", cc.options.expectation_reps,
                  "Simulated draws for the expected transform (0 = use the limit)")->capture_default_str();
    k->add_option("--seed", cc.options.seed, "Seed for the simulated expectation")->capture_default_str();
    k->add_option("--out", cc.out, "Report JSON")->required();

    ReplayArgs rp;
    auto* r = app.add_subcommand("replay", "Re-run a manifest and compare output digests");
    r->add_option("manifest", rp.manifest, "manifest.json to replay")->required();
    r->add_option("--out", rp.out, "Directory for the re-run (default: <manifest dir>/replay)");

    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, std::cerr, std::cerr) == 0 ? 0 : 1;
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, std::cerr, std::cerr) == 0 ? 0 : 1;
    } catch (const CLI::CallForVersion& e) {
        std::cout << kToolVersion << std::endl;
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "specden: error in cli::parse: " << e.what() << "\n";
        return 1;
    }

    if (s->parsed()) return run_simulate(sim, *s, g);
    if (d->parsed()) return run_density(den, *d, g);
    if (e->parsed()) return run_estimate(est, *e, g);
    if (v->parsed()) return run_sigma2(sig, *v, g);
    if (b->parsed()) return run_bandwidth(bw, *b, g);
    if (c->parsed()) return run_clt(clt, *c, g);
    if (k->parsed()) return run_conditions(cc, *k, g);
    if (r->parsed()) return run_replay(rp, g);
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(std::vector<std::string>(argv, argv + argc));
    } catch (const Error& e) {
        std::cerr << "specden: error in " << e.module() << "::" << e.operation() << ": " << e.detail() << "\n";
        return e.exit_code();
    } catch (const json::exception& e) {
        std::cerr << "specden: error in cli::json: " << e.what() << "\n";
        return 1;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "specden: error in cli::filesystem: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "specden: error in numerics::unknown: " << e.what() << "\n";
        return 2;
    }
}
