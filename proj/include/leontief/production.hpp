#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace leontief {

/// Non-negative input quantities, optionally labelled (e.g. "w", "c").
struct InputBundle {
    std::vector<double> quantities;
    std::vector<std::string> labels;

    InputBundle() = default;
    InputBundle(std::initializer_list<double> q) : quantities(q) {}
    explicit InputBundle(std::vector<double> q, std::vector<std::string> l = {})
        : quantities(std::move(q)), labels(std::move(l)) {}

    std::size_t size() const noexcept { return quantities.size(); }

    /// Throws Error(ParamDomain) unless non-empty, finite, >= 0 and labels match.
    void validate() const;
};

/// Fixed input requirements: entry (k, j) is the amount of input j consumed
/// per unit of output k. Row 0 is the focal output; rows 1..K-1 are the
/// exogenous competing outputs that drain resources.
class TechnologyMatrix {
public:
    TechnologyMatrix() = default;

    /// Rows must all have the same non-zero length, entries finite and >= 0,
    /// and row 0 must contain a strictly positive entry.
    explicit TechnologyMatrix(std::vector<std::vector<double>> rows);

    /// Focal-only technology (K = 1).
    static TechnologyMatrix focal(std::vector<double> requirements);

    std::size_t outputs() const noexcept { return outputs_; }
    std::size_t inputs() const noexcept { return inputs_; }

    double at(std::size_t output, std::size_t input) const { return data_[output * inputs_ + input]; }
    std::span<const double> row(std::size_t output) const {
        return {data_.data() + output * inputs_, inputs_};
    }

    /// Copy holding only rows [0, count).
    TechnologyMatrix leading_rows(std::size_t count) const;

    std::vector<std::vector<double>> to_rows() const;

private:
    std::size_t outputs_ = 0;
    std::size_t inputs_ = 0;
    std::vector<double> data_;
};

/// Parameters of f(w, c) = F * (a w^rho + (1 - a) c^rho)^(v / rho).
struct CesParams {
    double tfp = 1.0;    // F
    double share = 0.5;  // a
    double rho = 1.0;
    double scale = 1.0;  // v

    void validate() const;
};

enum class ClampPolicy { Raw, ClampAtZero };

double ces_eval(const CesParams& params, double w, double c);
double ces_eval(const CesParams& params, const InputBundle& inputs);

/// min over inputs with positive requirement of x_j / a_j. Requires K = 1.
double leontief_eval(const TechnologyMatrix& tech, std::span<const double> inputs);
double leontief_eval(const TechnologyMatrix& tech, const InputBundle& inputs);

/// Focal output given that the exogenous outputs y_2..y_K have already
/// consumed their share of every input. `exogenous` has length K - 1.
double residual_leontief(const TechnologyMatrix& tech, std::span<const double> inputs,
                         std::span<const double> exogenous, ClampPolicy clamp = ClampPolicy::Raw);
double residual_leontief(const TechnologyMatrix& tech, const InputBundle& inputs,
                         std::span<const double> exogenous, ClampPolicy clamp = ClampPolicy::Raw);

namespace detail {
// Unchecked kernel shared by the expectation engines; dimensions are the
// caller's responsibility.
double residual_unchecked(const TechnologyMatrix& tech, std::span<const double> inputs,
                          std::span<const double> exogenous, ClampPolicy clamp) noexcept;
void check_inputs(std::span<const double> inputs);
void check_residual_dims(const TechnologyMatrix& tech, std::span<const double> inputs,
                         std::size_t exogenous_count);
}  // namespace detail

}  // namespace leontief
