#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace thermoctl::search {

struct ScalarMinimum {
    double x;
    double value;
};

// Golden-section search on [lo, hi] until the bracket is below `tol`.
ScalarMinimum golden_section(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-8);

// Evaluates f on `grid_points` equally spaced points (endpoints included),
// then refines around the best one with golden-section search. Returns the
// better of the refined point and the best grid point.
ScalarMinimum bracketed_minimum(const std::function<double(double)>& f, double lo, double hi,
                                int grid_points = 1000, double tol = 1e-8);

struct PointMinimum {
    std::vector<double> x;
    double value;
};

struct PatternOptions {
    double initial_step = 0.5;
    double min_step = 1e-9;
    long max_evaluations = 200000;
    // Box constraint applied to every coordinate.
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
};

using Objective = std::function<double(const std::vector<double>&)>;

// Compass search: try +/- step along each coordinate, accept strict
// improvements, halve the step when a full sweep fails.
PointMinimum coordinate_descent(const Objective& f, std::vector<double> start, const PatternOptions& options = {});

// coordinate_descent from the origin (when `include_origin`) plus `starts`
// points drawn uniformly from [box_lo, box_hi]^dim with a seeded generator.
// The lowest value wins; ties go to the earliest start.
PointMinimum multistart_minimum(const Objective& f, std::size_t dim, int starts, std::uint64_t seed, double box_lo,
                                double box_hi, const PatternOptions& options = {}, bool include_origin = true);

}  // namespace thermoctl::search
