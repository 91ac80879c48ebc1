// Data tables behind the production-technology figures. The parameter values
// are this tool's own defaults; each table header records them.

#include <cmath>

#include "cli_surfaces.hpp"
#include "leontief/cli.hpp"
#include "leontief/error.hpp"

namespace leontief::cli {

namespace {

using Row = std::vector<Cell>;

Table figure_table(std::string title, std::string x, std::string y, std::string z) {
    Table t;
    t.columns = {"series", "x", "y", "z"};
    t.plot = PlotSpec{"x", "y", {"series"}};
    t.notes.push_back("figure: " + std::move(title));
    t.notes.push_back("columns: x=" + std::move(x) + " y=" + std::move(y) + " z=" + std::move(z));
    return t;
}

std::vector<double> t_grid() {
    std::vector<double> t;
    for (int i = 1; i <= 30; ++i) t.push_back(0.1 * i);
    return t;
}

void add_profile(Table& t, const std::string& series, const BundleSurface& surface) {
    const auto profile = scale_profile(surface, InputBundle{1.0, 1.0}, t_grid());
    for (std::size_t i = 0; i < profile.t_values.size(); ++i) {
        const Cell e = profile.elasticities[i] ? Cell{*profile.elasticities[i]} : Cell{};
        t.rows.push_back({series, profile.t_values[i], profile.outputs[i], e});
    }
}

void add_trace(Table& t, const std::string& series, const IsoquantTrace& trace, const PlanarSurface& surface) {
    for (const auto& p : trace.points) t.rows.push_back({series, p.w, p.c, surface(p.w, p.c)});
    if (!trace.omitted_angles.empty()) {
        t.notes.push_back(series + ": level not bracketed on " + std::to_string(trace.omitted_angles.size()) + " ray(s)");
    }
}

PlanarSurface ces_surface(CesParams p) {
    return [p](double w, double c) { return ces_eval(p, w, c); };
}

PlanarSurface leontief_surface(const TechnologyMatrix& tech) {
    return [tech](double w, double c) {
        const double x[2] = {w, c};
        return leontief_eval(tech, x);
    };
}

PlanarSurface residual_surface(const TechnologyMatrix& tech, std::vector<double> exogenous) {
    return [tech, exogenous](double w, double c) {
        const double x[2] = {w, c};
        return residual_leontief(tech, x, exogenous, ClampPolicy::Raw);
    };
}

constexpr double kFig4Competing[2] = {1.0, 0.2};

PlanarSurface fig4_surface() {
    const TechnologyMatrix tech({{1.0, 1.0}, {kFig4Competing[0], kFig4Competing[1]}});
    return [tech](double w, double c) {
        const double x[2] = {w, c};
        return expected_output_closed_form(tech, x, ClampPolicy::Raw).value;
    };
}

constexpr std::size_t kFig5Nodes = 32;

PlanarSurface fig5_surface(double theta) {
    const TechnologyMatrix tech({{1.0, 1.0}, {1.0, 0.2}, {0.2, 1.0}});
    const auto model = DemandModel::amh(theta);
    return [tech, model](double w, double c) {
        const double x[2] = {w, c};
        return expected_output_quadrature(tech, x, model, ClampPolicy::Raw, kFig5Nodes).value;
    };
}

std::string label(const std::string& name, double v) { return name + "=" + format_double(v); }

}  // namespace

Table run_figure(const RunConfig& config, Execution exec) {
    const std::string& id = config.figure;

    if (id == "1a") {
        auto t = figure_table("1a CES returns to scale", "t", "f(t*(1,1))", "scale elasticity");
        t.notes.push_back("params: F=1 a=0.5 rho=0.5 v in {1, 0.7, 1.3}; t=0.1..3 step 0.1");
        for (double v : {1.0, 0.7, 1.3}) {
            const CesParams p{1.0, 0.5, 0.5, v};
            add_profile(t, label("v", v), [p](std::span<const double> x) { return ces_eval(p, x[0], x[1]); });
        }
        return t;
    }
    if (id == "1b") {
        auto t = figure_table("1b CES isoquants", "w", "c", "f(w,c)");
        t.notes.push_back("params: F=1 a=0.5 rho=-1 v=1; levels {1, 2, 3}; rayscan 91 rays, bracket [1e-9, 20]");
        const auto surface = ces_surface({1.0, 0.5, -1.0, 1.0});
        for (double level : {1.0, 2.0, 3.0}) {
            add_trace(t, label("level", level), trace_isoquant_rayscan(surface, level, 91, {1e-9, 20.0}, 1e-10, exec),
                      surface);
        }
        return t;
    }
    if (id == "2a") {
        auto t = figure_table("2a Leontief returns to scale", "t", "f(t*(1,1))", "scale elasticity");
        t.notes.push_back("params: a=(1, 2); t=0.1..3 step 0.1");
        const auto tech = TechnologyMatrix::focal({1.0, 2.0});
        add_profile(t, "leontief", [tech](std::span<const double> x) { return leontief_eval(tech, x); });
        return t;
    }
    if (id == "2b") {
        auto t = figure_table("2b Leontief isoquants", "w", "c", "f(w,c)");
        t.notes.push_back("params: a=(1, 2); levels {1, 2}; analytic, extent 6");
        const auto tech = TechnologyMatrix::focal({1.0, 2.0});
        for (double level : {1.0, 2.0}) {
            add_trace(t, label("level", level), trace_isoquant_analytic(tech, level, 6.0), leontief_surface(tech));
        }
        return t;
    }
    if (id == "3") {
        auto t = figure_table("3 Leontief isoquants with a second output", "w", "c", "f(w,c; y2)");
        t.notes.push_back("params: a=(1, 2); r2=(0.5, 0.25); y2 in {0, 1}; levels {1, 2}; analytic, extent 6");
        const auto focal = TechnologyMatrix::focal({1.0, 2.0});
        const TechnologyMatrix tech({{1.0, 2.0}, {0.5, 0.25}});
        for (double y2 : {0.0, 1.0}) {
            for (double level : {1.0, 2.0}) {
                const auto trace = shift_trace(trace_isoquant_analytic(focal, level, 6.0),
                                               {tech.at(1, 0) * y2, tech.at(1, 1) * y2});
                add_trace(t, label("y2", y2) + " " + label("level", level), trace, residual_surface(tech, {y2}));
            }
        }
        return t;
    }
    if (id == "4a") {
        auto t = figure_table("4a expected output with a random second output", "w", "c", "E[y1]");
        t.notes.push_back("params: a=(1, 1); r2=(1, 0.2); y2 ~ U[0,1]; raw; closed form; grid [0,3]^2 with 31 nodes");
        t.plot = PlotSpec{"y", "z", {"x"}};
        const auto surface = fig4_surface();
        for (int i = 0; i <= 30; ++i) {
            for (int j = 0; j <= 30; ++j) {
                const double w = 0.1 * i, c = 0.1 * j;
                t.rows.push_back({std::string("surface"), w, c, surface(w, c)});
            }
        }
        return t;
    }
    if (id == "4b") {
        auto t = figure_table("4b isoquants of the expected output", "w", "c", "E[y1]");
        t.notes.push_back("params: a=(1, 1); r2=(1, 0.2); y2 ~ U[0,1]; raw; closed form; levels {0.5, 1, 1.5, 2}; "
                          "rayscan 91 rays, bracket [0, 10]");
        const auto surface = fig4_surface();
        for (double level : {0.5, 1.0, 1.5, 2.0}) {
            add_trace(t, label("level", level), trace_isoquant_rayscan(surface, level, 91, {0.0, 10.0}, 1e-10, exec),
                      surface);
        }
        return t;
    }
    if (id == "5a" || id == "5b") {
        const bool grid = id == "5a";
        auto t = figure_table(grid ? "5a three-output expected isoquants (grid contour)"
                                   : "5b three-output expected isoquants (ray scan)",
                              "w", "c", "E[y1]");
        t.notes.push_back(std::string("params: a=(1, 1); r2=(1, 0.2); r3=(0.2, 1); (y2, y3) uniform with AMH theta in "
                                      "{-0.9, 0, 0.9}; raw; quadrature 32 nodes; levels {0.5, 1}; ") +
                          (grid ? "grid [0,3]^2 with 41 nodes" : "rayscan 61 rays, bracket [0, 10]"));
        for (double theta : {-0.9, 0.0, 0.9}) {
            const auto surface = fig5_surface(theta);
            for (double level : {0.5, 1.0}) {
                const auto trace = grid ? trace_isoquant_grid(surface, level, {0.0, 3.0, 0.0, 3.0, 41}, exec)
                                        : trace_isoquant_rayscan(surface, level, 61, {0.0, 10.0}, 1e-10, exec);
                add_trace(t, label("theta", theta) + " " + label("level", level), trace, surface);
            }
        }
        return t;
    }
    throw Error(ErrorCode::UnknownFigure, "no figure '" + id + "'");
}

}  // namespace leontief::cli
