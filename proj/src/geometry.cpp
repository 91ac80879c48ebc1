#include "leontief/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "leontief/error.hpp"

namespace leontief {

std::string_view to_string(TraceMethod method) noexcept {
    switch (method) {
        case TraceMethod::AnalyticKink: return "analytic";
        case TraceMethod::RayRootFind: return "rayscan";
        case TraceMethod::GridContour: return "grid";
    }
    return "unknown";
}

std::string_view to_string(RtsClassification c) noexcept {
    switch (c) {
        case RtsClassification::Constant: return "Constant";
        case RtsClassification::Decreasing: return "Decreasing";
        case RtsClassification::Increasing: return "Increasing";
        case RtsClassification::Mixed: return "Mixed";
    }
    return "Unknown";
}

IsoquantTrace trace_isoquant_analytic(const TechnologyMatrix& tech, double level, double extent) {
    if (tech.outputs() != 1 || tech.inputs() != 2) {
        throw Error(ErrorCode::ParamDomain, "analytic isoquant needs a one-output, two-input technology");
    }
    const double a1 = tech.at(0, 0);
    const double a2 = tech.at(0, 1);
    if (!(a1 > 0.0 && a2 > 0.0)) throw Error(ErrorCode::ParamDomain, "analytic isoquant needs positive requirements");
    if (!(std::isfinite(level) && level > 0.0)) throw Error(ErrorCode::ParamDomain, "level must be > 0");
    const Point kink{a1 * level, a2 * level};
    if (!(extent >= kink.w && extent >= kink.c)) {
        throw Error(ErrorCode::ParamDomain, "extent must reach past the kink");
    }
    IsoquantTrace trace;
    trace.level = level;
    trace.method = TraceMethod::AnalyticKink;
    trace.points = {{extent, kink.c}, kink, {kink.w, extent}};
    return trace;
}

IsoquantTrace shift_trace(IsoquantTrace trace, Point offset) {
    for (auto& p : trace.points) {
        p.w += offset.w;
        p.c += offset.c;
    }
    return trace;
}

double ray_angle(std::size_t i, std::size_t angles) noexcept {
    return 0.5 * std::numbers::pi * static_cast<double>(i + 1) / static_cast<double>(angles + 1);
}

IsoquantTrace trace_isoquant_rayscan(const PlanarSurface& surface, double level, std::size_t angles,
                                     std::pair<double, double> bracket, double rel_tol, Execution exec) {
    if (angles < 3) throw Error(ErrorCode::ParamDomain, "ray scan needs at least 3 angles");
    const auto [r_min, r_max] = bracket;
    if (!(r_min >= 0.0 && r_max > r_min && std::isfinite(r_max))) {
        throw Error(ErrorCode::ParamDomain, "ray bracket must satisfy 0 <= r_lo < r_hi");
    }
    if (!std::isfinite(level)) throw Error(ErrorCode::ParamDomain, "level must be finite");

    std::vector<std::optional<Point>> hits(angles);
    detail::parallel_for(angles, exec.workers, [&](std::size_t i) {
        const double phi = ray_angle(i, angles);
        const double dw = std::cos(phi);
        const double dc = std::sin(phi);
        auto along = [&](double r) { return surface(r * dw, r * dc); };

        double lo = r_min, hi = r_max;
        double f_lo = along(lo);
        double f_hi = along(hi);
        if (!(f_lo <= level && level <= f_hi)) return;  // not bracketed on this ray

        double best_r = std::abs(f_lo - level) <= std::abs(f_hi - level) ? lo : hi;
        double best_gap = std::min(std::abs(f_lo - level), std::abs(f_hi - level));
        while (best_gap > 0.0 && hi - lo > rel_tol * hi) {
            const double mid = 0.5 * (lo + hi);
            const double f_mid = along(mid);
            if (f_mid < f_lo || f_mid > f_hi || !std::isfinite(f_mid)) {
                throw Error(ErrorCode::NonMonotoneRay,
                            "surface is not monotone along the ray at angle " + std::to_string(phi));
            }
            if (std::abs(f_mid - level) < best_gap) {
                best_gap = std::abs(f_mid - level);
                best_r = mid;
            }
            if (f_mid < level) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
                f_hi = f_mid;
            }
        }
        hits[i] = Point{best_r * dw, best_r * dc};
    });

    IsoquantTrace trace;
    trace.level = level;
    trace.method = TraceMethod::RayRootFind;
    for (std::size_t i = 0; i < angles; ++i) {
        if (hits[i]) trace.points.push_back(*hits[i]);
        else trace.omitted_angles.push_back(ray_angle(i, angles));
    }
    return trace;
}

namespace {

// Illinois-style false position on the segment p0 -> p1 with f(p0) < level <= f(p1).
Point refine_on_edge(const PlanarSurface& surface, double level, Point p0, Point p1, double f0, double f1) {
    auto at = [&](double s) { return Point{p0.w + s * (p1.w - p0.w), p0.c + s * (p1.c - p0.c)}; };
    if (f1 == level) return p1;
    const double tol = 1e-12 * std::max(1.0, std::abs(level));
    double s_lo = 0.0, s_hi = 1.0;
    double g_lo = f0 - level, g_hi = f1 - level;
    int side = 0;
    Point best = p1;
    double best_gap = std::abs(g_hi);
    for (int iter = 0; iter < 200 && s_hi - s_lo > 1e-15; ++iter) {
        double s = s_lo - g_lo * (s_hi - s_lo) / (g_hi - g_lo);
        if (!(s > s_lo && s < s_hi)) s = 0.5 * (s_lo + s_hi);
        const Point p = at(s);
        const double g = surface(p.w, p.c) - level;
        if (std::abs(g) < best_gap) {
            best_gap = std::abs(g);
            best = p;
        }
        if (best_gap <= tol) break;
        if (g < 0.0) {
            s_lo = s;
            g_lo = g;
            if (side == -1) g_hi *= 0.5;
            side = -1;
        } else {
            s_hi = s;
            g_hi = g;
            if (side == 1) g_lo *= 0.5;
            side = 1;
        }
    }
    return best;
}

struct PointLess {
    bool operator()(const Point& a, const Point& b) const noexcept {
        return a.w < b.w || (a.w == b.w && a.c < b.c);
    }
};

double polar(const Point& p) noexcept { return std::atan2(p.c, p.w); }

}  // namespace

IsoquantTrace trace_isoquant_grid(const PlanarSurface& surface, double level, const GridSpec& grid, Execution exec) {
    const std::size_t n = grid.resolution;
    if (n < 8) throw Error(ErrorCode::ParamDomain, "grid resolution must be >= 8 per axis");
    if (!(grid.w_hi > grid.w_lo && grid.c_hi > grid.c_lo)) throw Error(ErrorCode::ParamDomain, "empty grid range");

    auto node = [&](std::size_t i, std::size_t j) {
        return Point{grid.w_lo + (grid.w_hi - grid.w_lo) * static_cast<double>(i) / static_cast<double>(n - 1),
                     grid.c_lo + (grid.c_hi - grid.c_lo) * static_cast<double>(j) / static_cast<double>(n - 1)};
    };
    std::vector<double> values(n * n);
    detail::parallel_for(n, exec.workers, [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j) {
            const Point p = node(i, j);
            values[i * n + j] = surface(p.w, p.c);
        }
    });
    auto value = [&](std::size_t i, std::size_t j) { return values[i * n + j]; };
    auto inside = [&](std::size_t i, std::size_t j) { return value(i, j) >= level; };

    // Crossing on the edge between two nodes, cached per edge.
    std::map<std::uint64_t, Point> crossings;
    auto crossing = [&](std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) {
        const std::uint64_t key = ((static_cast<std::uint64_t>(i0) * n + j0) << 32) | (i1 * n + j1);
        if (auto it = crossings.find(key); it != crossings.end()) return it->second;
        Point p0 = node(i0, j0), p1 = node(i1, j1);
        double f0 = value(i0, j0), f1 = value(i1, j1);
        if (f0 >= level) {
            std::swap(p0, p1);
            std::swap(f0, f1);
        }
        const double t = (level - f0) / (f1 - f0);
        Point guess = t >= 1.0 ? p1 : Point{p0.w + t * (p1.w - p0.w), p0.c + t * (p1.c - p0.c)};
        const double fg = guess == p1 ? f1 : surface(guess.w, guess.c);
        Point result = guess;
        if (std::abs(fg - level) > 1e-12 * std::max(1.0, std::abs(level))) {
            result = refine_on_edge(surface, level, p0, p1, f0, f1);
        }
        crossings.emplace(key, result);
        return result;
    };

    // Edges: 0 bottom, 1 right, 2 top, 3 left.
    std::vector<std::pair<Point, Point>> segments;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const int code = (inside(i, j) ? 1 : 0) | (inside(i + 1, j) ? 2 : 0) | (inside(i + 1, j + 1) ? 4 : 0) |
                             (inside(i, j + 1) ? 8 : 0);
            if (code == 0 || code == 15) continue;
            auto edge = [&](int e) {
                switch (e) {
                    case 0: return crossing(i, j, i + 1, j);
                    case 1: return crossing(i + 1, j, i + 1, j + 1);
                    case 2: return crossing(i, j + 1, i + 1, j + 1);
                    default: return crossing(i, j, i, j + 1);
                }
            };
            auto emit = [&](int e0, int e1) {
                const Point a = edge(e0), b = edge(e1);
                if (!(a == b)) segments.emplace_back(a, b);
            };
            if (code == 5 || code == 10) {
                const double centre = 0.25 * (value(i, j) + value(i + 1, j) + value(i + 1, j + 1) + value(i, j + 1));
                const bool centre_in = centre >= level;
                // Cut off the corners that are not joined through the centre.
                if ((code == 5) == centre_in) {
                    emit(0, 1);  // corner 1
                    emit(2, 3);  // corner 3
                } else {
                    emit(3, 0);  // corner 0
                    emit(1, 2);  // corner 2
                }
                continue;
            }
            int found[2] = {-1, -1};
            int count = 0;
            const bool corner[4] = {inside(i, j), inside(i + 1, j), inside(i + 1, j + 1), inside(i, j + 1)};
            for (int e = 0; e < 4 && count < 2; ++e) {
                if (corner[e] != corner[(e + 1) % 4]) found[count++] = e;
            }
            emit(found[0], found[1]);
        }
    }
    if (segments.empty()) {
        throw Error(ErrorCode::EmptyLevelSet, "no grid cell brackets level " + std::to_string(level));
    }

    // Stitch segments sharing endpoints into chains.
    std::map<Point, std::vector<std::size_t>, PointLess> incident;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        incident[segments[s].first].push_back(s);
        incident[segments[s].second].push_back(s);
    }
    std::vector<bool> used(segments.size(), false);
    auto extend = [&](std::vector<Point>& chain) {
        for (;;) {
            const Point tail = chain.back();
            bool advanced = false;
            for (std::size_t s : incident[tail]) {
                if (used[s]) continue;
                used[s] = true;
                chain.push_back(segments[s].first == tail ? segments[s].second : segments[s].first);
                advanced = true;
                break;
            }
            if (!advanced) return;
        }
    };
    std::vector<std::vector<Point>> chains;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (used[s]) continue;
        used[s] = true;
        std::vector<Point> forward{segments[s].first, segments[s].second};
        extend(forward);
        std::vector<Point> backward{segments[s].first};
        extend(backward);
        std::vector<Point> chain(backward.rbegin(), backward.rend());
        chain.insert(chain.end(), forward.begin() + 1, forward.end());
        if (polar(chain.front()) > polar(chain.back())) std::reverse(chain.begin(), chain.end());
        chains.push_back(std::move(chain));
    }
    std::sort(chains.begin(), chains.end(),
              [](const auto& a, const auto& b) { return polar(a.front()) < polar(b.front()); });

    IsoquantTrace trace;
    trace.level = level;
    trace.method = TraceMethod::GridContour;
    trace.chains.clear();
    for (auto& chain : chains) {
        trace.chains.push_back(trace.points.size());
        trace.points.insert(trace.points.end(), chain.begin(), chain.end());
    }
    return trace;
}

namespace {

double point_segment_distance(Point p, Point a, Point b) noexcept {
    const double dw = b.w - a.w, dc = b.c - a.c;
    const double len2 = dw * dw + dc * dc;
    double t = len2 > 0.0 ? ((p.w - a.w) * dw + (p.c - a.c) * dc) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.w - (a.w + t * dw), p.c - (a.c + t * dc));
}

std::vector<std::pair<Point, Point>> trace_segments(const IsoquantTrace& t) {
    std::vector<std::pair<Point, Point>> out;
    for (std::size_t k = 0; k < t.chains.size(); ++k) {
        const std::size_t begin = t.chains[k];
        const std::size_t end = k + 1 < t.chains.size() ? t.chains[k + 1] : t.points.size();
        if (end - begin == 1) out.emplace_back(t.points[begin], t.points[begin]);
        for (std::size_t i = begin; i + 1 < end; ++i) out.emplace_back(t.points[i], t.points[i + 1]);
    }
    return out;
}

// Largest distance from (densely sampled) `from` to the polyline `to`.
double directed_hausdorff(const std::vector<std::pair<Point, Point>>& from,
                          const std::vector<std::pair<Point, Point>>& to) {
    double worst = 0.0;
    for (const auto& [a, b] : from) {
        const int steps = std::max(1, static_cast<int>(std::ceil(std::hypot(b.w - a.w, b.c - a.c) / 1e-3)));
        for (int s = 0; s <= steps; ++s) {
            const double t = static_cast<double>(s) / steps;
            const Point p{a.w + t * (b.w - a.w), a.c + t * (b.c - a.c)};
            double nearest = std::numeric_limits<double>::infinity();
            for (const auto& [c, d] : to) nearest = std::min(nearest, point_segment_distance(p, c, d));
            worst = std::max(worst, nearest);
        }
    }
    return worst;
}

}  // namespace

double hausdorff_distance(const IsoquantTrace& a, const IsoquantTrace& b) {
    const auto sa = trace_segments(a);
    const auto sb = trace_segments(b);
    if (sa.empty() || sb.empty()) return std::numeric_limits<double>::infinity();
    return std::max(directed_hausdorff(sa, sb), directed_hausdorff(sb, sa));
}

ScaleProfile scale_profile(const BundleSurface& surface, const InputBundle& base, std::vector<double> t_values) {
    base.validate();
    if (t_values.size() < 2) throw Error(ErrorCode::ParamDomain, "scale profile needs at least two t values");
    for (std::size_t i = 0; i < t_values.size(); ++i) {
        if (!(std::isfinite(t_values[i]) && t_values[i] > 0.0)) {
            throw Error(ErrorCode::ParamDomain, "t values must be finite and > 0");
        }
        if (i > 0 && !(t_values[i] > t_values[i - 1])) {
            throw Error(ErrorCode::ParamDomain, "t values must be strictly increasing");
        }
    }

    ScaleProfile profile;
    profile.direction = base.quantities;
    profile.t_values = std::move(t_values);
    std::vector<double> scaled(base.size());
    for (double t : profile.t_values) {
        for (std::size_t j = 0; j < scaled.size(); ++j) scaled[j] = t * base.quantities[j];
        const double y = surface(scaled);
        if (!std::isfinite(y)) throw Error(ErrorCode::ParamDomain, "surface is not finite along the ray");
        profile.outputs.push_back(y);
    }

    const std::size_t n = profile.t_values.size();
    auto slope = [&](std::size_t i0, std::size_t i1) -> std::optional<double> {
        if (!(profile.outputs[i0] > 0.0 && profile.outputs[i1] > 0.0)) return std::nullopt;
        return (std::log(profile.outputs[i1]) - std::log(profile.outputs[i0])) /
               (std::log(profile.t_values[i1]) - std::log(profile.t_values[i0]));
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) profile.elasticities.push_back(slope(0, 1));
        else if (i + 1 == n) profile.elasticities.push_back(slope(n - 2, n - 1));
        else profile.elasticities.push_back(slope(i - 1, i + 1));
    }
    return profile;
}

RtsClass classify_rts(const ScaleProfile& profile, double tolerance) {
    bool all_constant = true, all_below = true, all_above = true, any = false;
    for (const auto& e : profile.elasticities) {
        if (!e) continue;
        any = true;
        all_constant = all_constant && std::abs(*e - 1.0) <= tolerance;
        all_below = all_below && *e < 1.0 - tolerance;
        all_above = all_above && *e > 1.0 + tolerance;
    }
    RtsClass out{RtsClassification::Mixed, tolerance};
    if (!any) return out;
    if (all_constant) out.classification = RtsClassification::Constant;
    else if (all_below) out.classification = RtsClassification::Decreasing;
    else if (all_above) out.classification = RtsClassification::Increasing;
    return out;
}

}  // namespace leontief
