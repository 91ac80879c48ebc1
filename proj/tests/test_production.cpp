#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "leontief/error.hpp"
#include "leontief/production.hpp"

using namespace leontief;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected leontief::Error");
    return ErrorCode::ParamDomain;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("ces_eval worked values") {
    CHECK(ces_eval({1.0, 0.5, 1.0, 1.0}, 4.0, 4.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(ces_eval({2.0, 0.5, 1.0, 1.0}, 1.0, 3.0) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("ces_eval matches a 50-digit re-evaluation") {
    using big = boost::multiprecision::cpp_bin_float_50;
    const big a("0.3"), rho(-1), v("0.8"), w(2), c(5);
    const big expected = pow(a * pow(w, rho) + (big(1) - a) * pow(c, rho), v / rho);
    const double got = ces_eval({1.0, 0.3, -1.0, 0.8}, 2.0, 5.0);
    CHECK(rel_err(got, expected.convert_to<double>()) < 1e-14);
    // Frozen from an independent mpmath evaluation.
    CHECK(rel_err(got, 2.6920405768724504662) < 1e-14);
}

TEST_CASE("ces_eval rejects bad parameters and zero inputs with rho < 0") {
    CHECK(code_of([] { ces_eval({1.0, 0.5, -1.0, 1.0}, 0.0, 2.0); }) == ErrorCode::NonPositiveInput);
    CHECK(code_of([] { ces_eval({0.0, 0.5, 1.0, 1.0}, 1.0, 1.0); }) == ErrorCode::ParamDomain);
    CHECK(code_of([] { ces_eval({1.0, 1.0, 1.0, 1.0}, 1.0, 1.0); }) == ErrorCode::ParamDomain);
    CHECK(code_of([] { ces_eval({1.0, 0.5, 0.0, 1.0}, 1.0, 1.0); }) == ErrorCode::ParamDomain);
    CHECK(code_of([] { ces_eval({1.0, 0.5, 1.0, -1.0}, 1.0, 1.0); }) == ErrorCode::ParamDomain);
    CHECK(code_of([] { ces_eval({1.0, 0.5, 1.0, 1.0}, InputBundle{1.0, 2.0, 3.0}); }) == ErrorCode::DimensionMismatch);
    // rho > 0 tolerates a zero input.
    CHECK(ces_eval({1.0, 0.5, 1.0, 1.0}, 0.0, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("leontief_eval worked values") {
    CHECK(leontief_eval(TechnologyMatrix::focal({2, 5}), InputBundle{10, 10}) == 2.0);
    CHECK(leontief_eval(TechnologyMatrix::focal({1, 1}), InputBundle{3, 3}) == 3.0);
    CHECK(leontief_eval(TechnologyMatrix::focal({1, 2, 4}), InputBundle{5, 8, 12}) == 3.0);
}

TEST_CASE("zero requirements impose no constraint") {
    CHECK(leontief_eval(TechnologyMatrix::focal({0, 2}), InputBundle{0, 8}) == 4.0);
}

TEST_CASE("technology validation") {
    CHECK(code_of([] { TechnologyMatrix::focal({0, 0}); }) == ErrorCode::DegenerateTechnology);
    CHECK(code_of([] { TechnologyMatrix::focal({1, -1}); }) == ErrorCode::ParamDomain);
    CHECK(code_of([] { TechnologyMatrix({{1, 1}, {1}}); }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([] { TechnologyMatrix::focal({1, std::numeric_limits<double>::infinity()}); }) ==
          ErrorCode::ParamDomain);
    CHECK(code_of([] { leontief_eval(TechnologyMatrix::focal({1, 1}), InputBundle{1, 2, 3}); }) ==
          ErrorCode::DimensionMismatch);
    CHECK(code_of([] { leontief_eval(TechnologyMatrix({{1, 1}, {1, 1}}), InputBundle{1, 2}); }) ==
          ErrorCode::DimensionMismatch);
    CHECK(code_of([] { leontief_eval(TechnologyMatrix::focal({1, 1}), InputBundle{-1, 2}); }) ==
          ErrorCode::ParamDomain);
    CHECK(code_of([] { InputBundle({1, 2}, {"w"}).validate(); }) == ErrorCode::ParamDomain);
}

TEST_CASE("residual_leontief worked values") {
    const TechnologyMatrix same({{1, 1}, {1, 1}});
    const double zero[] = {0.0};
    CHECK(residual_leontief(same, InputBundle{1, 1}, zero) == 1.0);

    const TechnologyMatrix tech({{1, 1}, {0.6, 0.3}});
    const double half[] = {0.5};
    CHECK(residual_leontief(tech, InputBundle{1, 0.8}, half) == doctest::Approx(0.65).epsilon(1e-15));

    const TechnologyMatrix heavy({{1, 1}, {2, 2}});
    const double one[] = {1.0};
    CHECK(residual_leontief(heavy, InputBundle{1, 1}, one, ClampPolicy::Raw) == -1.0);
    CHECK(residual_leontief(heavy, InputBundle{1, 1}, one, ClampPolicy::ClampAtZero) == 0.0);
}

TEST_CASE("residual_leontief dimension and domain errors") {
    const TechnologyMatrix tech({{1, 1}, {0.6, 0.3}});
    const double two[] = {0.1, 0.2};
    const double neg[] = {-0.1};
    CHECK(code_of([&] { residual_leontief(tech, InputBundle{1, 1}, two); }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([&] { residual_leontief(tech, InputBundle{1, 1, 1}, neg); }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([&] { residual_leontief(tech, InputBundle{1, 1}, neg); }) == ErrorCode::ParamDomain);
}

TEST_CASE("property: monotone in every input") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const auto tech = TechnologyMatrix::focal({0.1 + unit(rng), 0.1 + unit(rng), unit(rng)});
        std::vector<double> x{5 * unit(rng), 5 * unit(rng), 5 * unit(rng)};
        std::vector<double> bigger = x;
        bigger[trial % 3] += unit(rng);
        CHECK(leontief_eval(tech, x) <= leontief_eval(tech, bigger));

        const CesParams p{0.5 + unit(rng), 0.05 + 0.9 * unit(rng), unit(rng) < 0.5 ? -2 * unit(rng) - 0.1 : unit(rng) + 0.1,
                          0.3 + unit(rng)};
        const double w = 0.1 + unit(rng), c = 0.1 + unit(rng);
        CHECK(ces_eval(p, w, c) <= ces_eval(p, w + unit(rng), c));
        CHECK(ces_eval(p, w, c) <= ces_eval(p, w, c + unit(rng)));
    }
}

TEST_CASE("property: CES is homogeneous of degree v") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const CesParams p{0.5 + unit(rng), 0.05 + 0.9 * unit(rng), unit(rng) < 0.5 ? -2 * unit(rng) - 0.1 : unit(rng) + 0.1,
                          0.3 + unit(rng)};
        const double w = 0.1 + 3 * unit(rng), c = 0.1 + 3 * unit(rng), t = 0.1 + 5 * unit(rng);
        CHECK(rel_err(ces_eval(p, t * w, t * c), std::pow(t, p.scale) * ces_eval(p, w, c)) <= 1e-10);
    }
}

TEST_CASE("property: residual Leontief is concave in inputs under Raw") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const TechnologyMatrix tech({{0.2 + unit(rng), 0.2 + unit(rng)}, {unit(rng), unit(rng)}});
        const double y[] = {2 * unit(rng)};
        const double x0[] = {3 * unit(rng), 3 * unit(rng)};
        const double x1[] = {3 * unit(rng), 3 * unit(rng)};
        const double mid[] = {0.5 * (x0[0] + x1[0]), 0.5 * (x0[1] + x1[1])};
        const double f0 = residual_leontief(tech, x0, y), f1 = residual_leontief(tech, x1, y);
        CHECK(residual_leontief(tech, mid, y) >= 0.5 * (f0 + f1) - 1e-12);
    }
}

TEST_CASE("evaluation is safe from concurrent callers") {
    const TechnologyMatrix tech({{1, 2}, {0.5, 0.25}});
    std::vector<double> results(8);
    {
        std::vector<std::jthread> threads;
        for (std::size_t t = 0; t < results.size(); ++t) {
            threads.emplace_back([&, t] {
                double acc = 0.0;
                for (int i = 0; i < 10000; ++i) {
                    const double x[] = {1.0 + i * 1e-4, 2.0};
                    const double y[] = {0.5};
                    acc += residual_leontief(tech, x, y);
                }
                results[t] = acc;
            });
        }
    }
    for (double r : results) CHECK(r == results.front());
}
