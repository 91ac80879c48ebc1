#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "leontief/demand.hpp"
#include "leontief/parallel.hpp"
#include "leontief/production.hpp"

namespace leontief {

enum class ExpectationMethod { MonteCarlo, Quadrature, ClosedForm };

std::string_view to_string(ExpectationMethod method) noexcept;

/// E[y_1] over the random competing demand. std_error and n_samples are 0
/// for the deterministic methods.
struct ExpectationEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    ExpectationMethod method = ExpectationMethod::ClosedForm;
};

/// Sample mean of residual_leontief over n counter-based draws. Samples are
/// reduced in fixed blocks in index order, so the result is bit-identical
/// for every worker count.
ExpectationEstimate expected_output_mc(const TechnologyMatrix& tech, std::span<const double> inputs,
                                       const DemandModel& model, ClampPolicy clamp, std::size_t n,
                                       std::uint64_t seed, Execution exec = {});

/// Gauss-Legendre quadrature with `nodes` points on every piece between
/// analytically located kinks. Supports one exogenous output, or two with
/// either dependence model (the AMH density weights the 2-D integral).
ExpectationEstimate expected_output_quadrature(const TechnologyMatrix& tech, std::span<const double> inputs,
                                               const DemandModel& model, ClampPolicy clamp,
                                               std::size_t nodes = 64);

/// Exact integral for one exogenous output distributed U[0, 1]: the
/// integrand is piecewise linear, so each piece is integrated exactly.
ExpectationEstimate expected_output_closed_form(const TechnologyMatrix& tech, std::span<const double> inputs,
                                                ClampPolicy clamp);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussLegendreRule& gauss_legendre(std::size_t n);

}  // namespace leontief
