#include "leontief/demand.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "leontief/error.hpp"

namespace leontief {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void check_theta(double theta) {
    if (!(theta >= -1.0 && theta < 1.0)) {
        throw Error(ErrorCode::ParamDomain, "AMH theta must lie in [-1, 1), got " + std::to_string(theta));
    }
}

void check_unit(double x, const char* name) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw Error(ErrorCode::ParamDomain, std::string(name) + " must lie in [0, 1]");
    }
}

}  // namespace

DemandModel DemandModel::independent(std::size_t count, std::vector<Support> bounds) {
    return DemandModel{count, Independent{}, std::move(bounds)};
}

DemandModel DemandModel::amh(double theta, std::vector<Support> bounds) {
    return DemandModel{2, AmhCopula{theta}, std::move(bounds)};
}

double DemandModel::theta() const noexcept {
    if (const auto* amh = std::get_if<AmhCopula>(&dependence)) return amh->theta;
    return 0.0;
}

void DemandModel::validate() const {
    if (count < 1) throw Error(ErrorCode::ParamDomain, "demand model needs at least one exogenous output");
    if (is_amh()) {
        check_theta(theta());
        if (count != 2) {
            throw Error(ErrorCode::ParamDomain, "AMH dependence couples exactly two exogenous outputs");
        }
    }
    if (!bounds.empty() && bounds.size() != count) {
        throw Error(ErrorCode::ParamDomain, "scale_bounds must have one entry per exogenous output");
    }
    for (const auto& b : bounds) {
        if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || b.lo > b.hi) {
            throw Error(ErrorCode::ParamDomain, "scale_bounds must be finite with lo <= hi");
        }
    }
}

double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint32_t dim) noexcept {
    std::uint64_t h = mix64(seed + kGolden);
    h = mix64(h ^ (index * kGolden + 0xD1B54A32D192ED03ULL));
    h = mix64(h + (static_cast<std::uint64_t>(dim) + 1) * 0x8CB92BA72F3D8DD7ULL);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double amh_cdf(double theta, double u, double v) {
    check_theta(theta);
    check_unit(u, "u");
    check_unit(v, "v");
    return u * v / (1.0 - theta * (1.0 - u) * (1.0 - v));
}

double amh_density(double theta, double u, double v) {
    check_theta(theta);
    check_unit(u, "u");
    check_unit(v, "v");
    const double d = 1.0 - theta * (1.0 - u) * (1.0 - v);
    // dC/du = N / D^2 with N = v (1 - theta (1 - v)); differentiate in v.
    const double n = v * (1.0 - theta * (1.0 - v));
    const double dn = 1.0 - theta + 2.0 * theta * v;
    return (dn * d - 2.0 * n * theta * (1.0 - u)) / (d * d * d);
}

double amh_conditional(double theta, double u, double v) {
    check_theta(theta);
    check_unit(u, "u");
    check_unit(v, "v");
    const double d = 1.0 - theta * (1.0 - u) * (1.0 - v);
    return v * (1.0 - theta * (1.0 - v)) / (d * d);
}

double amh_conditional_inverse(double theta, double u, double p) {
    check_theta(theta);
    check_unit(u, "u");
    check_unit(p, "p");
    // v (1 - theta + theta v) = p ((1 - b) + b v)^2 with b = theta (1 - u):
    // A v^2 + B v + C = 0.
    const double b = theta * (1.0 - u);
    const double q = p * (1.0 - b) * (1.0 - b);  // -C
    const double a = theta - p * b * b;
    const double bb = 1.0 - theta - 2.0 * p * b * (1.0 - b);
    const double disc = std::max(0.0, bb * bb + 4.0 * a * q);
    // Root written as 2q / (B + sqrt(disc)): stable and reduces to v = p at theta = 0.
    const double denom = bb + std::sqrt(disc);
    if (!(denom > 0.0)) return 1.0;
    return std::clamp(2.0 * q / denom, 0.0, 1.0);
}

double amh_kendall_tau(double theta) {
    check_theta(theta);
    if (std::abs(theta) < 1e-4) {
        return theta * (2.0 / 9.0 + theta * (1.0 / 18.0 + theta * (1.0 / 45.0 + theta / 90.0)));
    }
    const double one_minus = 1.0 - theta;
    return 1.0 - 2.0 * (one_minus * one_minus * std::log1p(-theta) + theta) / (3.0 * theta * theta);
}

std::pair<double, double> sample_amh_pair(double theta, SampleStream stream) {
    check_theta(theta);
    const double u = counter_uniform(stream.seed, stream.index, 0);
    const double p = counter_uniform(stream.seed, stream.index, 1);
    return {u, amh_conditional_inverse(theta, u, p)};
}

void draw_demand(const DemandModel& model, std::uint64_t seed, std::uint64_t index,
                 std::span<double> out) noexcept {
    if (const auto* amh = std::get_if<AmhCopula>(&model.dependence)) {
        const double u = counter_uniform(seed, index, 0);
        const double p = counter_uniform(seed, index, 1);
        out[0] = model.support(0).map(u);
        out[1] = model.support(1).map(amh_conditional_inverse(amh->theta, u, p));
        return;
    }
    for (std::size_t k = 0; k < model.count; ++k) {
        out[k] = model.support(k).map(counter_uniform(seed, index, static_cast<std::uint32_t>(k)));
    }
}

DemandSamples sample_demand(const DemandModel& model, SampleStream stream, std::size_t n, Execution exec) {
    model.validate();
    if (n < 1) throw Error(ErrorCode::ParamDomain, "sample count must be >= 1");
    DemandSamples out{n, model.count, std::vector<double>(n * model.count)};
    constexpr std::size_t kBlock = 8192;
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    detail::parallel_for(blocks, exec.workers, [&](std::size_t blk) {
        const std::size_t end = std::min(n, (blk + 1) * kBlock);
        for (std::size_t i = blk * kBlock; i < end; ++i) {
            draw_demand(model, stream.seed, stream.index + i,
                        std::span<double>(out.data.data() + i * out.cols, out.cols));
        }
    });
    return out;
}

}  // namespace leontief
