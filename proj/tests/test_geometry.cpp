#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "leontief/error.hpp"
#include "leontief/expectation.hpp"
#include "leontief/geometry.hpp"

using namespace leontief;

namespace {

PlanarSurface leontief_planar(std::vector<double> a) {
    const auto tech = TechnologyMatrix::focal(std::move(a));
    return [tech](double w, double c) {
        const double x[] = {w, c};
        return leontief_eval(tech, x);
    };
}

PlanarSurface expected_planar(TechnologyMatrix tech, ClampPolicy clamp = ClampPolicy::Raw) {
    return [tech, clamp](double w, double c) {
        const double x[] = {w, c};
        return expected_output_closed_form(tech, x, clamp).value;
    };
}

}  // namespace

TEST_CASE("analytic isoquant kinks") {
    auto t = trace_isoquant_analytic(TechnologyMatrix::focal({1, 2}), 3.0, 10.0);
    REQUIRE(t.points.size() == 3);
    CHECK(t.points[1] == Point{3, 6});
    CHECK(t.points[0] == Point{10, 6});
    CHECK(t.points[2] == Point{3, 10});
    CHECK(t.method == TraceMethod::AnalyticKink);

    CHECK(trace_isoquant_analytic(TechnologyMatrix::focal({1, 1}), 1.0, 2.0).points[1] == Point{1, 1});
    const auto tech = TechnologyMatrix::focal({2, 5});
    const auto kinked = trace_isoquant_analytic(tech, 2.0, 20.0);
    CHECK(kinked.points[1] == Point{4, 10});
    CHECK(leontief_eval(tech, InputBundle{10, 10}) == 2.0);
    for (const auto& p : kinked.points) CHECK(leontief_planar({2, 5})(p.w, p.c) == doctest::Approx(2.0).epsilon(1e-15));

    CHECK_THROWS_AS(trace_isoquant_analytic(tech, 2.0, 5.0), Error);
    CHECK_THROWS_AS(trace_isoquant_analytic(tech, -1.0, 50.0), Error);
    CHECK_THROWS_AS(trace_isoquant_analytic(TechnologyMatrix::focal({1, 0}), 1.0, 5.0), Error);
}

TEST_CASE("ray scan finds the Leontief kink on the diagonal") {
    const auto t = trace_isoquant_rayscan(leontief_planar({1, 1}), 1.0, 3, {0.0, 5.0});
    REQUIRE(t.points.size() == 3);
    CHECK(ray_angle(1, 3) == doctest::Approx(std::numbers::pi / 4));
    CHECK(t.points[1].w == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(t.points[1].c == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ray scan on the closed-form expected surface") {
    // E[min(w - y, c - y)] = min(w, c) - 1/2.
    const auto surface = expected_planar(TechnologyMatrix({{1, 1}, {1, 1}}));
    const auto diag = trace_isoquant_rayscan(surface, 0.5, 3, {0.0, 10.0});
    REQUIRE(diag.points.size() == 3);
    CHECK(diag.points[1].w == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(diag.points[1].c == doctest::Approx(1.0).epsilon(1e-9));
    // Near-axis ray (c >> w): w alone binds.
    const auto steep = trace_isoquant_rayscan(surface, 0.5, 99, {0.0, 50.0});
    CHECK(steep.points.back().c > 10 * steep.points.back().w);
    CHECK(steep.points.back().w == doctest::Approx(1.0).epsilon(1e-8));
    for (const auto& p : steep.points) CHECK(std::abs(surface(p.w, p.c) - 0.5) <= 1e-8);
}

TEST_CASE("ray scan reports rays where the level is not bracketed") {
    const auto t = trace_isoquant_rayscan(leontief_planar({1, 1}), 3.0, 5, {0.0, 4.0});
    CHECK(t.points.empty());
    CHECK(t.omitted_angles.size() == 5);
    const auto partial = trace_isoquant_rayscan(leontief_planar({1, 1}), 1.0, 9, {0.0, 2.0});
    CHECK(partial.points.size() + partial.omitted_angles.size() == 9);
    CHECK_FALSE(partial.omitted_angles.empty());
    CHECK_FALSE(partial.points.empty());
}

TEST_CASE("ray scan detects a non-monotone ray") {
    // Drops from 2 to 0.5 on [2, 4): the first midpoint falls below the lower end.
    const PlanarSurface bumpy = [](double w, double c) {
        const double r = std::hypot(w, c);
        return r < 2.0 || r >= 4.0 ? r : 0.5;
    };
    try {
        trace_isoquant_rayscan(bumpy, 2.5, 3, {1.5, 6.0});
        FAIL("expected NonMonotoneRay");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonMonotoneRay);
    }
}

TEST_CASE("grid contour of the Leontief L-shape") {
    const auto surface = leontief_planar({1, 1});
    const auto grid = trace_isoquant_grid(surface, 1.0, {0.0, 2.0, 0.0, 2.0, 64});
    CHECK(grid.method == TraceMethod::GridContour);
    CHECK(grid.chains.size() == 1);
    for (const auto& p : grid.points) CHECK(std::abs(surface(p.w, p.c) - 1.0) <= 1e-8);
    const auto exact = trace_isoquant_analytic(TechnologyMatrix::focal({1, 1}), 1.0, 2.0);
    CHECK(hausdorff_distance(grid, exact) <= 1.0 / 64.0);
    // Ordered by polar angle.
    for (std::size_t i = 1; i < grid.points.size(); ++i) {
        CHECK(std::atan2(grid.points[i].c, grid.points[i].w) >= std::atan2(grid.points[i - 1].c, grid.points[i - 1].w));
    }
}

TEST_CASE("grid contour handles a level sitting exactly on grid nodes") {
    // Nodes at multiples of 1/32 put the kink (1, 1) on a node.
    const auto surface = leontief_planar({1, 1});
    const auto grid = trace_isoquant_grid(surface, 1.0, {0.0, 2.0, 0.0, 2.0, 65});
    CHECK(grid.chains.size() == 1);
    const auto exact = trace_isoquant_analytic(TechnologyMatrix::focal({1, 1}), 1.0, 2.0);
    CHECK(hausdorff_distance(grid, exact) <= 1e-9);
}

TEST_CASE("grid contour of a constant surface is an empty level set") {
    const PlanarSurface flat = [](double, double) { return 2.0; };
    for (double level : {2.0, 3.0, 1.0}) {
        try {
            trace_isoquant_grid(flat, level, {0.0, 1.0, 0.0, 1.0, 16});
            FAIL("expected EmptyLevelSet");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::EmptyLevelSet);
        }
    }
    CHECK_THROWS_AS(trace_isoquant_grid(flat, 2.0, {0.0, 1.0, 0.0, 1.0, 4}), Error);
}

TEST_CASE("grid contour resolves saddle cells by the corner mean") {
    // f = (w - 0.5)(c - 0.5): with 8 nodes the centre cell is a saddle for
    // small levels of either sign, and the true level set has two branches.
    const PlanarSurface saddle = [](double w, double c) { return (w - 0.5) * (c - 0.5); };
    for (double level : {0.001, -0.001}) {
        const auto t = trace_isoquant_grid(saddle, level, {0.0, 1.0, 0.0, 1.0, 8});
        CHECK(t.chains.size() == 2);
        for (const auto& p : t.points) CHECK(std::abs(saddle(p.w, p.c) - level) <= 1e-8);
    }
}

TEST_CASE("ray scan and grid contour agree on the expected surface") {
    const auto surface = expected_planar(TechnologyMatrix({{1, 1}, {1, 0.2}}));
    const auto rays = trace_isoquant_rayscan(surface, 1.0, 721, {0.0, 10.0});
    const GridSpec spec{0.0, 4.0, 0.0, 4.0, 81};
    const auto grid = trace_isoquant_grid(surface, 1.0, spec);
    // Rays close to the axes need radii past the bracket and are reported.
    CHECK_FALSE(rays.omitted_angles.empty());
    CHECK(rays.points.size() + rays.omitted_angles.size() == 721);
    // Compare over the part of the ray trace inside the grid window.
    IsoquantTrace clipped = rays;
    clipped.points.clear();
    for (const auto& p : rays.points) {
        if (p.w <= 4.0 && p.c <= 4.0) clipped.points.push_back(p);
    }
    const double cell = 4.0 / 80.0;
    CHECK(hausdorff_distance(clipped, grid) <= 2 * cell);
}

TEST_CASE("property: expected isoquants have convex upper level sets") {
    const auto surface = expected_planar(TechnologyMatrix({{1, 1}, {1, 0.2}}));
    const auto t = trace_isoquant_rayscan(surface, 1.0, 61, {0.0, 10.0});
    for (std::size_t i = 0; i < t.points.size(); ++i) {
        for (std::size_t j = i + 1; j < t.points.size(); j += 7) {
            const Point m{0.5 * (t.points[i].w + t.points[j].w), 0.5 * (t.points[i].c + t.points[j].c)};
            CHECK(surface(m.w, m.c) >= 1.0 - 1e-9);
        }
    }
}

TEST_CASE("scale profiles and RTS classes") {
    const auto tech = TechnologyMatrix::focal({1, 2});
    const BundleSurface leontief = [tech](std::span<const double> x) { return leontief_eval(tech, x); };
    const auto flat = scale_profile(leontief, InputBundle{1.0, 3.0}, {0.5, 1.0, 2.0});
    CHECK(*flat.elasticities[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(classify_rts(flat).classification == RtsClassification::Constant);
    CHECK(classify_rts(flat, 1e-8).classification == RtsClassification::Constant);

    const CesParams ces{1.0, 0.4, -0.5, 0.7};
    const BundleSurface ces_surface = [ces](std::span<const double> x) { return ces_eval(ces, x[0], x[1]); };
    const auto dec = scale_profile(ces_surface, InputBundle{1.0, 2.0}, {0.5, 1.0, 2.0, 4.0});
    for (const auto& e : dec.elasticities) CHECK(*e == doctest::Approx(0.7).epsilon(1e-6));
    CHECK(classify_rts(dec).classification == RtsClassification::Decreasing);

    const TechnologyMatrix residual({{1, 2}, {0.5, 0.5}});
    const BundleSurface drained = [residual](std::span<const double> x) {
        const double y[] = {1.0};
        return residual_leontief(residual, x, y);
    };
    const auto inc = scale_profile(drained, InputBundle{2.0, 4.0}, {1.0, 1.5, 2.0, 3.0});
    for (const auto& e : inc.elasticities) CHECK(*e > 1.0);
    CHECK(classify_rts(inc).classification == RtsClassification::Increasing);
}

TEST_CASE("scale profile gaps and mixed classes") {
    const TechnologyMatrix residual({{1, 1}, {1, 1}});
    const BundleSurface drained = [residual](std::span<const double> x) {
        const double y[] = {1.0};
        return residual_leontief(residual, x, y);
    };
    const auto p = scale_profile(drained, InputBundle{1.0, 1.0}, {0.5, 1.0, 2.0, 3.0, 4.0});
    CHECK_FALSE(p.elasticities[0].has_value());
    CHECK_FALSE(p.elasticities[1].has_value());
    CHECK(p.elasticities[3].has_value());

    ScaleProfile mixed;
    mixed.t_values = {1, 2, 3};
    mixed.outputs = {1, 2, 3};
    mixed.elasticities = {0.5, 1.0, 1.5};
    CHECK(classify_rts(mixed).classification == RtsClassification::Mixed);

    CHECK_THROWS_AS(scale_profile(drained, InputBundle{1.0, 1.0}, {1.0, 1.0, 2.0}), Error);
    CHECK_THROWS_AS(scale_profile(drained, InputBundle{1.0, 1.0}, {0.0, 1.0, 2.0}), Error);
}

TEST_CASE("ray scan results do not depend on worker count") {
    const auto surface = expected_planar(TechnologyMatrix({{1, 1}, {1, 0.2}}));
    const auto a = trace_isoquant_rayscan(surface, 1.0, 40, {0.0, 10.0}, 1e-10, Execution{1});
    const auto b = trace_isoquant_rayscan(surface, 1.0, 40, {0.0, 10.0}, 1e-10, Execution{4});
    CHECK(a.points == b.points);
    const auto ga = trace_isoquant_grid(surface, 1.0, {0, 3, 0, 3, 30}, Execution{1});
    const auto gb = trace_isoquant_grid(surface, 1.0, {0, 3, 0, 3, 30}, Execution{4});
    CHECK(ga.points == gb.points);
}
