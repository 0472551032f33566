#include "specden/spectral_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace specden {
namespace {

constexpr double kPoleTol = 1e-14;

void check_ratio(double c, const char* op) {
    if (!(c >= 0.0 && c < 1.0)) throw DomainError("spectral-law", op, "aspect ratio c must lie in [0, 1)");
}

// S1 = int t / (1 + t m) dH,  S2 = int t^2 / (1 + t m)^2 dH
struct Moments {
    cplx s1;
    cplx s2;
};

Moments resolvent_moments(const SpectralMeasure& h, cplx m) {
    Moments out{};
    for (const auto& a : h.atoms()) {
        const cplx q = 1.0 / (1.0 + a.t * m);
        out.s1 += a.w * a.t * q;
        out.s2 += a.w * a.t * a.t * q * q;
    }
    return out;
}

struct Step {
    cplx g;         // G(m)
    double residual;
    cplx slope;     // d/dm (m - G(m))
};

Step evaluate(double c, const SpectralMeasure& h, cplx z, cplx m) {
    const auto mom = resolvent_moments(h, m);
    const cplx g = -1.0 / (z - c * mom.s1);
    return {g, std::abs(m - g), 1.0 - c * g * g * mom.s2};
}

struct IterateResult {
    cplx m;
    double residual;
    int iterations;
    bool converged;
};

IterateResult iterate(double c, const SpectralMeasure& h, cplx z, cplx m, const SolverOptions& opt, int budget) {
    IterateResult best{m, std::numeric_limits<double>::infinity(), 0, false};
    for (int it = 0; it < budget; ++it) {
        const auto s = evaluate(c, h, z, m);
        if (s.residual < best.residual) best = {m, s.residual, it, false};
        if (s.residual < opt.tol) return {m, s.residual, it, true};

        if (s.residual < opt.newton_switch && std::abs(s.slope) > 0.0) {
            const cplx trial = m - (m - s.g) / s.slope;
            if (trial.imag() > 0.0 && std::isfinite(trial.real())) {
                const auto t = evaluate(c, h, z, trial);
                if (t.residual < s.residual) {
                    m = trial;
                    continue;
                }
            }
        }
        cplx next = (1.0 - opt.damping) * m + opt.damping * s.g;
        if (!(next.imag() > 0.0)) next = cplx(next.real(), std::abs(next.imag()) + 1e-300);
        m = next;
    }
    best.iterations = budget;
    return best;
}

StieltjesValue make_value(double c, const SpectralMeasure& h, cplx z, cplx m_under, int iterations) {
    StieltjesValue out;
    out.z = z;
    out.m_under = m_under;
    out.m = law_transform(c, h, z, m_under);
    out.residual = evaluate(c, h, z, m_under).residual;
    out.iterations = iterations;
    return out;
}

}  // namespace

StieltjesValue solve_stieltjes(double c, const SpectralMeasure& h, cplx z, const SolverOptions& options) {
    check_ratio(c, "solve_stieltjes");
    if (!(z.imag() > 0.0)) throw DomainError("spectral-law", "solve_stieltjes", "requires Im z > 0");
    if (!(options.tol > 0.0)) throw DomainError("spectral-law", "solve_stieltjes", "tol must be > 0");

    int used = 0;
    if (options.warm_start && options.warm_start->imag() > 0.0) {
        const auto r = iterate(c, h, z, *options.warm_start, options, options.max_iter);
        used += r.iterations;
        if (r.converged) return make_value(c, h, z, r.m, used);
    }

    // Continuation in Im z: start high where the damped map contracts fast,
    // then walk down to the requested height, warm-starting each level.
    const double scale = std::max(1.0, std::abs(z.real()));
    std::vector<double> heights;
    for (double y = scale; y > z.imag(); y *= 0.25) heights.push_back(y);
    heights.push_back(z.imag());

    cplx m = -1.0 / cplx(z.real(), heights.front());
    IterateResult r{};
    for (std::size_t k = 0; k < heights.size(); ++k) {
        const cplx zk(z.real(), heights[k]);
        const int budget = std::max(1, options.max_iter - used);
        r = iterate(c, h, zk, m, options, budget);
        used += r.iterations;
        m = r.m;
        if (!r.converged && k + 1 == heights.size()) break;
        if (used >= options.max_iter && k + 1 < heights.size()) {
            r.converged = false;
            break;
        }
    }
    if (!r.converged) {
        auto best = make_value(c, h, z, r.m, used);
        throw MaxIterExceeded(best, "no convergence after " + std::to_string(used) +
                                        " iterations (residual " + std::to_string(best.residual) + ")");
    }
    return make_value(c, h, z, m, used);
}

StieltjesValue companion_transform(double c, const SpectralMeasure& h, cplx z, const SolverOptions& options) {
    check_ratio(c, "companion_transform");
    if (z.imag() == 0.0) throw DomainError("spectral-law", "companion_transform", "z must be off the real axis");
    if (z.imag() < 0.0) {
        auto up = companion_transform(c, h, std::conj(z), options);
        up.z = z;
        up.m_under = std::conj(up.m_under);
        up.m = std::conj(up.m);
        return up;
    }
    if (h.is_point_mass()) {
        const double t = h.min_location();
        const cplx m_under = identity_T_closed_form(c, z / t).m_under / t;
        return make_value(c, h, z, m_under, 0);
    }
    return solve_stieltjes(c, h, z, options);
}

cplx law_transform(double c, const SpectralMeasure& h, cplx z, cplx m_under) {
    if (c == 0.0) {
        cplx m{};
        for (const auto& a : h.atoms()) m += a.w / (a.t - z);
        return m;
    }
    return (m_under + (1.0 - c) / z) / c;
}

cplx inverse_map(double c, const SpectralMeasure& h, cplx m_under) {
    if (std::abs(m_under) == 0.0) throw PoleError("spectral-law", "inverse_map", "m_under = 0 is a pole");
    cplx sum{};
    for (const auto& a : h.atoms()) {
        const cplx d = 1.0 + a.t * m_under;
        if (std::abs(d) < kPoleTol)
            throw PoleError("spectral-law", "inverse_map", "1 + t m_under vanishes at atom t = " + std::to_string(a.t));
        sum += a.w * a.t / d;
    }
    return -1.0 / m_under + c * sum;
}

double inverse_map_derivative(double c, const SpectralMeasure& h, double m_under) {
    double s2 = 0.0;
    for (const auto& a : h.atoms()) {
        const double d = 1.0 + a.t * m_under;
        s2 += a.w * a.t * a.t / (d * d);
    }
    return 1.0 / (m_under * m_under) - c * s2;
}

Interval support_bracket(double c, const SpectralMeasure& h) {
    const double r = std::sqrt(c);
    return {h.min_location() * (1 - r) * (1 - r), h.max_location() * (1 + r) * (1 + r)};
}

namespace {

// One pole-free stretch of the real m axis, parametrised by u in (0, 1).
struct Stretch {
    double lo;
    double hi;
    bool unbounded_left;  // (-inf, hi): m = hi / u

    double at(double u) const { return unbounded_left ? hi / u : lo + (hi - lo) * u; }
};

double refine(double c, const SpectralMeasure& h, const Stretch& s, double u0, double u1, double tol) {
    double f0 = inverse_map_derivative(c, h, s.at(u0));
    while (std::abs(s.at(u1) - s.at(u0)) > tol * std::max(1.0, std::abs(s.at(u0)))) {
        const double um = 0.5 * (u0 + u1);
        const double fm = inverse_map_derivative(c, h, s.at(um));
        if ((fm > 0) == (f0 > 0)) {
            u0 = um;
            f0 = fm;
        } else {
            u1 = um;
        }
        if (u1 - u0 < 1e-17) break;
    }
    return s.at(0.5 * (u0 + u1));
}

}  // namespace

std::vector<Interval> find_support(double c, const SpectralMeasure& h, const SupportScanOptions& options) {
    check_ratio(c, "find_support");
    if (c == 0.0) {
        std::vector<Interval> out;
        for (const auto& a : h.atoms()) out.push_back({a.t, a.t});
        return out;
    }
    if (options.points_per_gap < 16) throw DomainError("spectral-law", "find_support", "scan grid too small");

    std::vector<Stretch> stretches;
    const auto& atoms = h.atoms();
    stretches.push_back({0.0, -1.0 / atoms.front().t, true});
    for (std::size_t k = 0; k + 1 < atoms.size(); ++k)
        stretches.push_back({-1.0 / atoms[k].t, -1.0 / atoms[k + 1].t, false});
    stretches.push_back({-1.0 / atoms.back().t, 0.0, false});

    double left_edge = std::numeric_limits<double>::quiet_NaN();
    double right_edge = std::numeric_limits<double>::quiet_NaN();
    std::vector<Interval> gaps;

    const int n = options.points_per_gap;
    for (std::size_t si = 0; si < stretches.size(); ++si) {
        const auto& s = stretches[si];
        const bool first = si == 0;
        const bool last = si + 1 == stretches.size();

        std::vector<double> u(static_cast<std::size_t>(n));
        std::vector<bool> positive(u.size());
        for (int k = 0; k < n; ++k) {
            // cosine spacing clusters samples at the poles
            u[k] = 0.5 * (1.0 - std::cos(std::numbers::pi * (k + 0.5) / n));
            positive[k] = inverse_map_derivative(c, h, s.at(u[k])) > 0.0;
        }

        std::vector<double> ups, downs;  // m at - -> + and + -> - changes
        std::vector<int> change_cells;
        for (int k = 0; k + 1 < n; ++k) {
            if (positive[k] == positive[k + 1]) continue;
            const double m = refine(c, h, s, u[k], u[k + 1], options.refine_tol);
            (positive[k + 1] ? ups : downs).push_back(m);
            change_cells.push_back(k);
        }
        for (std::size_t j = 1; j < change_cells.size(); ++j) {
            if (change_cells[j] - change_cells[j - 1] <= 1)
                throw ResolutionError("spectral-law", "find_support",
                                      "sign changes of z'(m) closer than the scan grid; refine points_per_gap");
        }

        if (first) {
            // (-inf, m*) has z' > 0 and maps onto (0, a)
            if (!positive.front() || downs.empty())
                throw ResolutionError("spectral-law", "find_support", "left support edge not resolved");
            left_edge = inverse_map(c, h, downs.front()).real();
            downs.erase(downs.begin());
        }
        if (last) {
            if (!positive.back() || ups.empty())
                throw ResolutionError("spectral-law", "find_support", "right support edge not resolved");
            right_edge = inverse_map(c, h, ups.back()).real();
            ups.pop_back();
        }
        if (ups.size() != downs.size())
            throw ResolutionError("spectral-law", "find_support", "unpaired sign change of z'(m)");
        for (std::size_t j = 0; j < ups.size(); ++j) {
            const double lo = inverse_map(c, h, ups[j]).real();
            const double hi = inverse_map(c, h, downs[j]).real();
            gaps.push_back({std::min(lo, hi), std::max(lo, hi)});
        }
    }

    std::sort(gaps.begin(), gaps.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> support;
    double cursor = left_edge;
    for (const auto& g : gaps) {
        if (g.lo <= cursor || g.hi >= right_edge)
            throw ResolutionError("spectral-law", "find_support", "gap outside the support hull");
        support.push_back({cursor, g.lo});
        cursor = g.hi;
    }
    support.push_back({cursor, right_edge});
    return support;
}

double default_epsilon(std::span<const Interval> support) {
    const double width = support.empty() ? 0.0 : support.back().hi - support.front().lo;
    return std::max(1e-6, 1e-3 * width);
}

namespace {

double smoothed_density(double c, const SpectralMeasure& h, double x, double eps, cplx& warm) {
    SolverOptions opt;
    if (warm.imag() > 0.0) opt.warm_start = warm;
    const auto v = companion_transform(c, h, cplx(x, eps), opt);
    warm = v.m_under;
    return v.m.imag() / std::numbers::pi;
}

double richardson_density(double c, const SpectralMeasure& h, double x, double eps, cplx& warm_full, cplx& warm_half) {
    const double full = smoothed_density(c, h, x, eps, warm_full);
    const double half = smoothed_density(c, h, x, 0.5 * eps, warm_half);
    return std::max(0.0, 2.0 * half - full);
}

}  // namespace

double density(double c, const SpectralMeasure& h, double x, double eps, std::span<const Interval> support) {
    if (!(eps > 0.0)) throw DomainError("spectral-law", "density", "epsilon must be > 0");
    if (!(c > 0.0 && c < 1.0)) throw DomainError("spectral-law", "density", "aspect ratio c must lie in (0, 1)");
    const bool inside = std::any_of(support.begin(), support.end(), [x](const Interval& i) { return i.contains(x); });
    if (!inside) return 0.0;
    cplx w1{}, w2{};
    return richardson_density(c, h, x, eps, w1, w2);
}

double density(double c, const SpectralMeasure& h, double x, double eps) {
    const auto support = find_support(c, h);
    return density(c, h, x, eps, support);
}

ClosedFormValue identity_T_closed_form(double c, cplx z) {
    check_ratio(c, "identity_T_closed_form");
    if (z == cplx(0.0, 0.0)) throw DomainError("spectral-law", "identity_T_closed_form", "z = 0 is a pole");
    if (z.imag() < 0.0) {
        const auto up = identity_T_closed_form(c, std::conj(z));
        return {std::conj(up.m_under), std::conj(up.m)};
    }

    auto roots = [c](cplx w) {
        const cplx s = std::sqrt((w - 1.0 - c) * (w - 1.0 - c) - 4.0 * c);
        const cplx b = -(w + 1.0 - c);
        return std::array<cplx, 2>{(b + s) / (2.0 * w), (b - s) / (2.0 * w)};
    };

    constexpr double kBranchTol = 1e-12;
    std::size_t pick = 0;
    cplx m_under;
    if (z.imag() > 0.0) {
        const auto r = roots(z);
        pick = r[0].imag() >= r[1].imag() ? 0 : 1;
        m_under = r[pick];
    } else {
        // real z: follow the branch that is the limit from above
        const double lift = 1e-9 * std::max(1.0, std::abs(z.real()));
        const auto above = roots(cplx(z.real(), lift));
        const std::size_t k = above[0].imag() >= above[1].imag() ? 0 : 1;
        const auto r = roots(z);
        pick = std::abs(r[0] - above[k]) <= std::abs(r[1] - above[k]) ? 0 : 1;
        m_under = r[pick];
    }
    if (m_under.imag() < -kBranchTol * std::max(1.0, std::abs(m_under)))
        throw BranchError("spectral-law", "identity_T_closed_form", "no square-root branch gives Im m_under >= 0");

    cplx m;
    if (c == 0.0) {
        m = 1.0 / (1.0 - z);
    } else {
        // m = (1 - c - z + sqrt((z-1-c)^2 - 4c)) / (2 c z) on the matching branch
        m = (m_under + (1.0 - c) / z) / c;
    }
    return {m_under, m};
}

double LawSolution::grid_spacing() const noexcept {
    if (density_grid.size() < 2) return std::numeric_limits<double>::infinity();
    return density_grid[1].x - density_grid[0].x;
}

bool LawSolution::in_support(double x) const noexcept {
    return std::any_of(support.begin(), support.end(), [x](const Interval& i) { return i.contains(x); });
}

LawSolution solve_law(double c, const SpectralMeasure& h, double spacing, std::optional<double> eps) {
    if (!(spacing > 0.0)) throw DomainError("spectral-law", "solve_law", "grid spacing must be > 0");
    LawSolution law;
    law.c = c;
    law.h = h;
    law.support = find_support(c, h);
    law.epsilon = eps.value_or(default_epsilon(law.support));
    if (!(law.epsilon > 0.0)) throw DomainError("spectral-law", "solve_law", "epsilon must be > 0");

    const double a = law.lower();
    const double b = law.upper();
    const auto cells = static_cast<std::size_t>(std::ceil((b - a) / spacing));
    const std::size_t count = std::max<std::size_t>(cells, 1) + 1;
    law.density_grid.resize(count);
    cplx warm_full{}, warm_half{};
    for (std::size_t i = 0; i < count; ++i) {
        const double x = i + 1 == count ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
        double f = 0.0;
        if (law.in_support(x)) f = richardson_density(c, h, x, law.epsilon, warm_full, warm_half);
        law.density_grid[i] = {x, f};
    }
    return law;
}

}  // namespace specden
