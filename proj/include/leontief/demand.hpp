#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "leontief/parallel.hpp"

namespace leontief {

struct Independent {};

/// Ali-Mikhail-Haq copula C(u, v) = uv / (1 - theta (1 - u)(1 - v)).
struct AmhCopula {
    double theta = 0.0;
};

using Dependence = std::variant<Independent, AmhCopula>;

/// Support [lo, hi] of one exogenous output; the uniform marginal is mapped
/// affinely onto it. lo == hi is a point mass.
struct Support {
    double lo = 0.0;
    double hi = 1.0;

    double width() const noexcept { return hi - lo; }
    double map(double u) const noexcept { return lo + (hi - lo) * u; }
};

/// Distribution of the exogenous competing outputs y_2..y_K.
struct DemandModel {
    std::size_t count = 1;
    Dependence dependence = Independent{};
    std::vector<Support> bounds;  // empty means [0, 1] for every output

    static DemandModel independent(std::size_t count, std::vector<Support> bounds = {});
    static DemandModel amh(double theta, std::vector<Support> bounds = {});

    Support support(std::size_t k) const { return bounds.empty() ? Support{} : bounds.at(k); }
    bool is_amh() const noexcept { return std::holds_alternative<AmhCopula>(dependence); }
    double theta() const noexcept;

    /// Throws Error(ParamDomain) on an invalid model.
    void validate() const;
};

/// Counter-based stream position: draw i of seed s is a pure function of
/// (s, i), so any partition of the index range reproduces the same samples.
struct SampleStream {
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
};

/// Uniform [0, 1) variate number `dim` of sample `index` under `seed`.
double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint32_t dim) noexcept;

double amh_cdf(double theta, double u, double v);

/// Copula density d^2 C / du dv.
double amh_density(double theta, double u, double v);

/// Conditional distribution dC/du (u, v) as a function of v.
double amh_conditional(double theta, double u, double v);

/// Solves amh_conditional(theta, u, v) = p for v in [0, 1].
double amh_conditional_inverse(double theta, double u, double p);

/// Kendall's tau of the AMH family (closed form).
double amh_kendall_tau(double theta);

/// One (u, v) pair with AMH(theta) dependence and uniform marginals.
std::pair<double, double> sample_amh_pair(double theta, SampleStream stream);

/// Row-major n x count sample matrix.
struct DemandSamples {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    double at(std::size_t i, std::size_t k) const { return data[i * cols + k]; }
};

/// Writes the exogenous outputs of sample `index` into `out` (length model.count).
/// The model must already be validated.
void draw_demand(const DemandModel& model, std::uint64_t seed, std::uint64_t index, std::span<double> out) noexcept;

/// Rows are samples stream.index .. stream.index + n - 1.
DemandSamples sample_demand(const DemandModel& model, SampleStream stream, std::size_t n,
                            Execution exec = {});

}  // namespace leontief
