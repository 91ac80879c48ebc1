#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "leontief/parallel.hpp"
#include "leontief/production.hpp"

namespace leontief {

struct Point {
    double w = 0.0;
    double c = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Output as a function of the two inputs (w, c). Must be safe to call concurrently.
using PlanarSurface = std::function<double(double, double)>;

/// Output as a function of a full input bundle.
using BundleSurface = std::function<double(std::span<const double>)>;

enum class TraceMethod { AnalyticKink, RayRootFind, GridContour };
std::string_view to_string(TraceMethod method) noexcept;

/// A traced level set. Points are ordered by polar angle around the origin.
/// `chains` holds the start index of every connected piece (always {0} for
/// a single polyline).
struct IsoquantTrace {
    double level = 0.0;
    std::vector<Point> points;
    TraceMethod method = TraceMethod::AnalyticKink;
    std::vector<std::size_t> chains{0};
    std::vector<double> omitted_angles;  // ray scan only: rays where the level was not bracketed
};

/// Exact L-shaped isoquant of min(w/a1, c/a2) at `level`: the kink
/// (a1 L, a2 L) with arms out to `extent` along each axis direction.
IsoquantTrace trace_isoquant_analytic(const TechnologyMatrix& tech, double level, double extent);

/// Translates every point by `offset`.
IsoquantTrace shift_trace(IsoquantTrace trace, Point offset);

/// Angle of ray i (0-based) out of `angles`, evenly spaced strictly inside (0, pi/2).
double ray_angle(std::size_t i, std::size_t angles) noexcept;

/// Bisection along `angles` rays from the origin for the radius where the
/// surface reaches `level`. Rays whose bracket does not contain the level are
/// skipped and listed in omitted_angles; a bracket that stops being monotone
/// during bisection throws NonMonotoneRay.
IsoquantTrace trace_isoquant_rayscan(const PlanarSurface& surface, double level, std::size_t angles,
                                     std::pair<double, double> bracket, double rel_tol = 1e-10,
                                     Execution exec = {});

struct GridSpec {
    double w_lo = 0.0;
    double w_hi = 1.0;
    double c_lo = 0.0;
    double c_hi = 1.0;
    std::size_t resolution = 64;  // grid nodes per axis
};

/// Marching squares over a resolution x resolution node grid. Edge
/// crossings start from linear interpolation and are then refined on the
/// edge by bisection against the surface, so emitted points are on-level.
/// Saddle cells are split according to the mean of their corner values.
IsoquantTrace trace_isoquant_grid(const PlanarSurface& surface, double level, const GridSpec& grid,
                                  Execution exec = {});

/// Symmetric Hausdorff distance between two traces viewed as polylines
/// (segments only join consecutive points of the same chain).
double hausdorff_distance(const IsoquantTrace& a, const IsoquantTrace& b);

/// Output along the ray t * base with d ln f / d ln t estimates: centred
/// differences inside, one-sided at the ends. An elasticity is absent when
/// an output it depends on is not positive.
struct ScaleProfile {
    std::vector<double> direction;
    std::vector<double> t_values;
    std::vector<double> outputs;
    std::vector<std::optional<double>> elasticities;
};

ScaleProfile scale_profile(const BundleSurface& surface, const InputBundle& base, std::vector<double> t_values);

enum class RtsClassification { Constant, Decreasing, Increasing, Mixed };
std::string_view to_string(RtsClassification c) noexcept;

struct RtsClass {
    RtsClassification classification = RtsClassification::Mixed;
    double tolerance = 1e-6;
};

RtsClass classify_rts(const ScaleProfile& profile, double tolerance = 1e-6);

}  // namespace leontief
