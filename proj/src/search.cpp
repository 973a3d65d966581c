#include "thermoctl/search.hpp"

#include "thermoctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace thermoctl::search {

ScalarMinimum golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(lo <= hi)) throw ValidationError("golden_section: require lo <= hi");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

ScalarMinimum bracketed_minimum(const std::function<double(double)>& f, double lo, double hi, int grid_points,
                                double tol) {
    if (!(lo <= hi)) throw ValidationError("bracketed_minimum: require lo <= hi");
    if (lo == hi) return {lo, f(lo)};
    if (grid_points < 2) throw ValidationError("bracketed_minimum: need at least two grid points");
    const double h = (hi - lo) / static_cast<double>(grid_points - 1);
    ScalarMinimum best{lo, f(lo)};
    int best_k = 0;
    for (int k = 1; k < grid_points; ++k) {
        const double x = (k == grid_points - 1) ? hi : lo + h * k;
        const double v = f(x);
        if (v < best.value) {
            best = {x, v};
            best_k = k;
        }
    }
    const double a = std::max(lo, lo + h * (best_k - 1));
    const double b = std::min(hi, lo + h * (best_k + 1));
    const ScalarMinimum refined = golden_section(f, a, b, tol);
    return refined.value < best.value ? refined : best;
}

PointMinimum coordinate_descent(const Objective& f, std::vector<double> start, const PatternOptions& options) {
    for (double& v : start) v = std::clamp(v, options.lower, options.upper);
    PointMinimum cur{std::move(start), 0.0};
    cur.value = f(cur.x);
    long evaluations = 1;
    double step = options.initial_step;
    while (step >= options.min_step && evaluations < options.max_evaluations) {
        bool improved = false;
        for (std::size_t k = 0; k < cur.x.size(); ++k) {
            for (double dir : {1.0, -1.0}) {
                const double original = cur.x[k];
                const double trial = std::clamp(original + dir * step, options.lower, options.upper);
                if (trial == original) continue;
                cur.x[k] = trial;
                const double v = f(cur.x);
                ++evaluations;
                if (v < cur.value) {
                    cur.value = v;
                    improved = true;
                    break;
                }
                cur.x[k] = original;
            }
        }
        if (!improved) step *= 0.5;
    }
    return cur;
}

PointMinimum multistart_minimum(const Objective& f, std::size_t dim, int starts, std::uint64_t seed, double box_lo,
                                double box_hi, const PatternOptions& options, bool include_origin) {
    if (starts < 0) throw ValidationError("multistart_minimum: negative start count");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(box_lo, box_hi);
    std::vector<std::vector<double>> points;
    if (include_origin) points.emplace_back(dim, 0.0);
    for (int s = 0; s < starts; ++s) {
        std::vector<double> p(dim);
        for (double& v : p) v = coord(rng);
        points.push_back(std::move(p));
    }
    if (points.empty()) throw ValidationError("multistart_minimum: no start points");
    PointMinimum best = coordinate_descent(f, points.front(), options);
    for (std::size_t i = 1; i < points.size(); ++i) {
        PointMinimum candidate = coordinate_descent(f, points[i], options);
        if (candidate.value < best.value) best = std::move(candidate);
    }
    return best;
}

}  // namespace thermoctl::search
