#include "leontief/expectation.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "leontief/error.hpp"

namespace leontief {

std::string_view to_string(ExpectationMethod method) noexcept {
    switch (method) {
        case ExpectationMethod::MonteCarlo: return "mc";
        case ExpectationMethod::Quadrature: return "quadrature";
        case ExpectationMethod::ClosedForm: return "closed_form";
    }
    return "unknown";
}

const GaussLegendreRule& gauss_legendre(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<GaussLegendreRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        auto rule = std::make_unique<GaussLegendreRule>();
        std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
            gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
        if (!table) throw Error(ErrorCode::ParamDomain, "cannot build Gauss-Legendre rule");
        rule->nodes.resize(n);
        rule->weights.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            gsl_integration_glfixed_point(-1.0, 1.0, i, &rule->nodes[i], &rule->weights[i], table.get());
        }
        slot = std::move(rule);
    }
    return *slot;
}

namespace {

void check_expectation_args(const TechnologyMatrix& tech, std::span<const double> inputs,
                            const DemandModel& model) {
    model.validate();
    detail::check_residual_dims(tech, inputs, model.count);
    detail::check_inputs(inputs);
}

// Running mean / sum of squared deviations, merged in a fixed order.
struct Moments {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) noexcept {
        count += 1.0;
        const double delta = x - mean;
        mean += delta / count;
        m2 += delta * (x - mean);
    }

    void merge(const Moments& other) noexcept {
        if (other.count == 0.0) return;
        const double total = count + other.count;
        const double delta = other.mean - mean;
        mean += delta * (other.count / total);
        m2 += other.m2 + delta * delta * (count * other.count / total);
        count = total;
    }
};

// Focal capacity of input j as an affine function of the unit-cube
// coordinates: value = constant + sum_k slope[k] * u_k.
struct AffineCapacity {
    double constant = 0.0;
    double slope[2] = {0.0, 0.0};

    double at(double u, double v) const noexcept { return constant + slope[0] * u + slope[1] * v; }
};

std::vector<AffineCapacity> affine_capacities(const TechnologyMatrix& tech, std::span<const double> inputs,
                                              const DemandModel& model) {
    std::vector<AffineCapacity> caps;
    for (std::size_t j = 0; j < tech.inputs(); ++j) {
        const double a = tech.at(0, j);
        if (!(a > 0.0)) continue;
        AffineCapacity cap;
        double drained_at_lo = 0.0;
        for (std::size_t k = 0; k < model.count; ++k) {
            const Support s = model.support(k);
            drained_at_lo += tech.at(k + 1, j) * s.lo;
            cap.slope[k] = -tech.at(k + 1, j) * s.width() / a;
        }
        cap.constant = (inputs[j] - drained_at_lo) / a;
        caps.push_back(cap);
    }
    return caps;
}

double min_capacity(const std::vector<AffineCapacity>& caps, double u, double v, ClampPolicy clamp) noexcept {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : caps) best = std::min(best, c.at(u, v));
    return clamp == ClampPolicy::ClampAtZero ? std::max(best, 0.0) : best;
}

// Lines constant + su*u + sv*v = 0 across which the integrand can kink.
std::vector<AffineCapacity> kink_lines(const std::vector<AffineCapacity>& caps, ClampPolicy clamp) {
    std::vector<AffineCapacity> lines;
    for (std::size_t i = 0; i < caps.size(); ++i) {
        for (std::size_t j = i + 1; j < caps.size(); ++j) {
            AffineCapacity d;
            d.constant = caps[i].constant - caps[j].constant;
            d.slope[0] = caps[i].slope[0] - caps[j].slope[0];
            d.slope[1] = caps[i].slope[1] - caps[j].slope[1];
            lines.push_back(d);
        }
        if (clamp == ClampPolicy::ClampAtZero) lines.push_back(caps[i]);
    }
    return lines;
}

void add_break(std::vector<double>& breaks, double t) {
    if (std::isfinite(t) && t > 0.0 && t < 1.0) breaks.push_back(t);
}

std::vector<double> finish_breaks(std::vector<double> breaks) {
    breaks.push_back(0.0);
    breaks.push_back(1.0);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    return breaks;
}

template <typename F>
double integrate_pieces(const std::vector<double>& breaks, const GaussLegendreRule& rule, F&& f) {
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double half = 0.5 * (breaks[p + 1] - breaks[p]);
        const double mid = 0.5 * (breaks[p + 1] + breaks[p]);
        double piece = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) piece += rule.weights[i] * f(mid + half * rule.nodes[i]);
        total += half * piece;
    }
    return total;
}

}  // namespace

ExpectationEstimate expected_output_mc(const TechnologyMatrix& tech, std::span<const double> inputs,
                                       const DemandModel& model, ClampPolicy clamp, std::size_t n,
                                       std::uint64_t seed, Execution exec) {
    check_expectation_args(tech, inputs, model);
    if (n < 2) throw Error(ErrorCode::ParamDomain, "Monte Carlo needs n >= 2");

    constexpr std::size_t kBlock = 4096;
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<Moments> partial(blocks);
    detail::parallel_for(blocks, exec.workers, [&](std::size_t blk) {
        std::vector<double> y(model.count);
        Moments m;
        const std::size_t end = std::min(n, (blk + 1) * kBlock);
        for (std::size_t i = blk * kBlock; i < end; ++i) {
            draw_demand(model, seed, i, y);
            m.push(detail::residual_unchecked(tech, inputs, y, clamp));
        }
        partial[blk] = m;
    });
    Moments total;
    for (const auto& m : partial) total.merge(m);

    const double variance = total.m2 / (total.count - 1.0);
    return {total.mean, std::sqrt(std::max(variance, 0.0) / total.count), n, ExpectationMethod::MonteCarlo};
}

ExpectationEstimate expected_output_quadrature(const TechnologyMatrix& tech, std::span<const double> inputs,
                                               const DemandModel& model, ClampPolicy clamp, std::size_t nodes) {
    check_expectation_args(tech, inputs, model);
    if (model.count > 2) {
        throw Error(ErrorCode::UnsupportedDimension, "quadrature supports at most two exogenous outputs");
    }
    if (nodes < 8) throw Error(ErrorCode::ParamDomain, "quadrature needs at least 8 nodes per piece");

    bool point_mass = true;
    std::vector<double> at_lo(model.count);
    for (std::size_t k = 0; k < model.count; ++k) {
        at_lo[k] = model.support(k).lo;
        point_mass = point_mass && model.support(k).width() == 0.0;
    }
    if (point_mass) {
        return {detail::residual_unchecked(tech, inputs, at_lo, clamp), 0.0, 0, ExpectationMethod::Quadrature};
    }

    const auto& rule = gauss_legendre(nodes);
    const auto caps = affine_capacities(tech, inputs, model);
    const auto lines = kink_lines(caps, clamp);

    if (model.count == 1) {
        std::vector<double> breaks;
        for (const auto& l : lines) {
            if (l.slope[0] != 0.0) add_break(breaks, -l.constant / l.slope[0]);
        }
        const double value = integrate_pieces(finish_breaks(std::move(breaks)), rule,
                                              [&](double u) { return min_capacity(caps, u, 0.0, clamp); });
        return {value, 0.0, 0, ExpectationMethod::Quadrature};
    }

    // Outer breaks: where a kink line is vertical, meets v = 0 or v = 1, or
    // crosses another kink line. Between them the inner integral is smooth in u.
    std::vector<double> outer;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& l = lines[i];
        if (l.slope[0] != 0.0) {
            add_break(outer, -l.constant / l.slope[0]);
            add_break(outer, -(l.constant + l.slope[1]) / l.slope[0]);
        }
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            const auto& m = lines[j];
            const double det = l.slope[0] * m.slope[1] - l.slope[1] * m.slope[0];
            if (det != 0.0) add_break(outer, (l.slope[1] * m.constant - m.slope[1] * l.constant) / det);
        }
    }

    const double theta = model.theta();
    const bool weighted = model.is_amh() && theta != 0.0;
    const double value = integrate_pieces(finish_breaks(std::move(outer)), rule, [&](double u) {
        std::vector<double> inner;
        for (const auto& l : lines) {
            if (l.slope[1] != 0.0) add_break(inner, -(l.constant + l.slope[0] * u) / l.slope[1]);
        }
        return integrate_pieces(finish_breaks(std::move(inner)), rule, [&](double v) {
            const double g = min_capacity(caps, u, v, clamp);
            return weighted ? g * amh_density(theta, u, v) : g;
        });
    });
    return {value, 0.0, 0, ExpectationMethod::Quadrature};
}

ExpectationEstimate expected_output_closed_form(const TechnologyMatrix& tech, std::span<const double> inputs,
                                                ClampPolicy clamp) {
    if (tech.outputs() != 2) {
        throw Error(ErrorCode::UnsupportedDimension, "closed form needs exactly one exogenous output");
    }
    detail::check_residual_dims(tech, inputs, 1);
    detail::check_inputs(inputs);

    // Capacity of input j as a line in y: intercept - slope * y.
    struct Line {
        double intercept;
        double slope;
    };
    std::vector<Line> lines;
    for (std::size_t j = 0; j < tech.inputs(); ++j) {
        const double a = tech.at(0, j);
        if (a > 0.0) lines.push_back({inputs[j] / a, tech.at(1, j) / a});
    }

    std::vector<double> cuts{0.0, 1.0};
    auto keep = [&cuts](double y) {
        if (std::isfinite(y) && y > 0.0 && y < 1.0) cuts.push_back(y);
    };
    for (std::size_t i = 0; i < lines.size(); ++i) {
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            if (lines[i].slope != lines[j].slope) {
                keep((lines[i].intercept - lines[j].intercept) / (lines[i].slope - lines[j].slope));
            }
        }
        if (clamp == ClampPolicy::ClampAtZero && lines[i].slope > 0.0) {
            keep(lines[i].intercept / lines[i].slope);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // Each piece is linear, so its integral is length times the midpoint value.
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double mid = 0.5 * (cuts[p] + cuts[p + 1]);
        double value = std::numeric_limits<double>::infinity();
        for (const auto& l : lines) value = std::min(value, l.intercept - l.slope * mid);
        if (clamp == ClampPolicy::ClampAtZero) value = std::max(value, 0.0);
        total += (cuts[p + 1] - cuts[p]) * value;
    }
    return {total, 0.0, 0, ExpectationMethod::ClosedForm};
}

}  // namespace leontief
