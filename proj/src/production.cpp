#include "leontief/production.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "leontief/error.hpp"

namespace leontief {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ParamDomain: return "ParamDomain";
        case ErrorCode::NonPositiveInput: return "NonPositiveInput";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DegenerateTechnology: return "DegenerateTechnology";
        case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
        case ErrorCode::LevelNotBracketed: return "LevelNotBracketed";
        case ErrorCode::NonMonotoneRay: return "NonMonotoneRay";
        case ErrorCode::EmptyLevelSet: return "EmptyLevelSet";
        case ErrorCode::UnknownFigure: return "UnknownFigure";
    }
    return "Unknown";
}

namespace detail {

void check_inputs(std::span<const double> inputs) {
    if (inputs.empty()) throw Error(ErrorCode::ParamDomain, "input bundle is empty");
    for (std::size_t j = 0; j < inputs.size(); ++j) {
        if (!std::isfinite(inputs[j]) || inputs[j] < 0.0) {
            throw Error(ErrorCode::ParamDomain,
                        "input " + std::to_string(j) + " must be finite and >= 0");
        }
    }
}

void check_residual_dims(const TechnologyMatrix& tech, std::span<const double> inputs,
                         std::size_t exogenous_count) {
    if (tech.outputs() == 0) throw Error(ErrorCode::DegenerateTechnology, "empty technology");
    if (inputs.size() != tech.inputs()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "technology has " + std::to_string(tech.inputs()) + " inputs, bundle has " +
                        std::to_string(inputs.size()));
    }
    if (exogenous_count + 1 != tech.outputs()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "technology has " + std::to_string(tech.outputs()) + " outputs, expected " +
                        std::to_string(tech.outputs() - 1) + " exogenous values, got " +
                        std::to_string(exogenous_count));
    }
}

double residual_unchecked(const TechnologyMatrix& tech, std::span<const double> inputs,
                          std::span<const double> exogenous, ClampPolicy clamp) noexcept {
    const auto focal = tech.row(0);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < inputs.size(); ++j) {
        if (!(focal[j] > 0.0)) continue;  // unused input: no constraint
        double drained = 0.0;
        for (std::size_t k = 0; k < exogenous.size(); ++k) drained += tech.at(k + 1, j) * exogenous[k];
        best = std::min(best, (inputs[j] - drained) / focal[j]);
    }
    if (clamp == ClampPolicy::ClampAtZero) best = std::max(best, 0.0);
    return best;
}

}  // namespace detail

void InputBundle::validate() const {
    detail::check_inputs(quantities);
    if (!labels.empty() && labels.size() != quantities.size()) {
        throw Error(ErrorCode::ParamDomain, "labels and quantities differ in length");
    }
}

TechnologyMatrix::TechnologyMatrix(std::vector<std::vector<double>> rows) {
    if (rows.empty() || rows.front().empty()) {
        throw Error(ErrorCode::DimensionMismatch, "technology needs at least one output and one input");
    }
    outputs_ = rows.size();
    inputs_ = rows.front().size();
    data_.reserve(outputs_ * inputs_);
    for (std::size_t k = 0; k < outputs_; ++k) {
        if (rows[k].size() != inputs_) {
            throw Error(ErrorCode::DimensionMismatch, "technology row " + std::to_string(k) +
                                                          " has " + std::to_string(rows[k].size()) +
                                                          " entries, expected " + std::to_string(inputs_));
        }
        for (double v : rows[k]) {
            if (!std::isfinite(v) || v < 0.0) {
                throw Error(ErrorCode::ParamDomain, "requirement in row " + std::to_string(k) +
                                                        " must be finite and >= 0");
            }
            data_.push_back(v);
        }
    }
    const auto focal = row(0);
    if (std::none_of(focal.begin(), focal.end(), [](double v) { return v > 0.0; })) {
        throw Error(ErrorCode::DegenerateTechnology, "focal output requires no input; output is unbounded");
    }
}

TechnologyMatrix TechnologyMatrix::focal(std::vector<double> requirements) {
    return TechnologyMatrix(std::vector<std::vector<double>>{std::move(requirements)});
}

TechnologyMatrix TechnologyMatrix::leading_rows(std::size_t count) const {
    auto rows = to_rows();
    rows.resize(std::min(count, rows.size()));
    return TechnologyMatrix(std::move(rows));
}

std::vector<std::vector<double>> TechnologyMatrix::to_rows() const {
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < outputs_; ++k) {
        auto r = row(k);
        rows.emplace_back(r.begin(), r.end());
    }
    return rows;
}

void CesParams::validate() const {
    if (!(std::isfinite(tfp) && tfp > 0.0)) throw Error(ErrorCode::ParamDomain, "CES tfp must be > 0");
    if (!(share > 0.0 && share < 1.0)) throw Error(ErrorCode::ParamDomain, "CES share must lie in (0, 1)");
    if (!std::isfinite(rho) || rho == 0.0) {
        throw Error(ErrorCode::ParamDomain, "CES rho must be finite and non-zero");
    }
    if (!(std::isfinite(scale) && scale > 0.0)) throw Error(ErrorCode::ParamDomain, "CES scale must be > 0");
}

double ces_eval(const CesParams& params, double w, double c) {
    params.validate();
    const double in[2] = {w, c};
    detail::check_inputs(in);
    if (params.rho < 0.0 && (w == 0.0 || c == 0.0)) {
        throw Error(ErrorCode::NonPositiveInput, "zero input with rho < 0");
    }
    const double inner = params.share * std::pow(w, params.rho) + (1.0 - params.share) * std::pow(c, params.rho);
    const double out = params.tfp * std::pow(inner, params.scale / params.rho);
    if (!std::isfinite(out)) throw Error(ErrorCode::ParamDomain, "CES evaluation overflowed");
    return out;
}

double ces_eval(const CesParams& params, const InputBundle& inputs) {
    if (inputs.size() != 2) throw Error(ErrorCode::DimensionMismatch, "CES takes exactly two inputs");
    inputs.validate();
    return ces_eval(params, inputs.quantities[0], inputs.quantities[1]);
}

double leontief_eval(const TechnologyMatrix& tech, std::span<const double> inputs) {
    if (tech.outputs() != 1) {
        throw Error(ErrorCode::DimensionMismatch, "leontief_eval needs a single-output technology");
    }
    detail::check_residual_dims(tech, inputs, 0);
    detail::check_inputs(inputs);
    return detail::residual_unchecked(tech, inputs, {}, ClampPolicy::Raw);
}

double leontief_eval(const TechnologyMatrix& tech, const InputBundle& inputs) {
    inputs.validate();
    return leontief_eval(tech, std::span<const double>(inputs.quantities));
}

double residual_leontief(const TechnologyMatrix& tech, std::span<const double> inputs,
                         std::span<const double> exogenous, ClampPolicy clamp) {
    detail::check_residual_dims(tech, inputs, exogenous.size());
    detail::check_inputs(inputs);
    for (double y : exogenous) {
        if (!std::isfinite(y) || y < 0.0) throw Error(ErrorCode::ParamDomain, "exogenous outputs must be >= 0");
    }
    return detail::residual_unchecked(tech, inputs, exogenous, clamp);
}

double residual_leontief(const TechnologyMatrix& tech, const InputBundle& inputs,
                         std::span<const double> exogenous, ClampPolicy clamp) {
    inputs.validate();
    return residual_leontief(tech, std::span<const double>(inputs.quantities), exogenous, clamp);
}

}  // namespace leontief
