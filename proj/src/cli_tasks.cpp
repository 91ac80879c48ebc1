#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "cli_surfaces.hpp"
#include "leontief/cli.hpp"
#include "leontief/error.hpp"

namespace leontief::cli {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

ExpectationEstimate estimate_expected(const RunConfig& c, const TechnologyMatrix& tech, std::span<const double> x,
                                      Execution exec) {
    switch (c.method) {
        case ExpectationMethod::MonteCarlo:
            return expected_output_mc(tech, x, *c.demand, c.clamp, c.n, c.seed, exec);
        case ExpectationMethod::Quadrature:
            return expected_output_quadrature(tech, x, *c.demand, c.clamp, c.nodes);
        case ExpectationMethod::ClosedForm:
            return expected_output_closed_form(tech, x, c.clamp);
    }
    throw Error(ErrorCode::ParamDomain, "unknown expectation method");
}

BundleSurface make_bundle_surface(const RunConfig& c) {
    switch (c.model) {
        case SurfaceModel::Leontief: {
            auto tech = c.technology();
            return [tech](std::span<const double> x) { return leontief_eval(tech, x); };
        }
        case SurfaceModel::Residual: {
            auto tech = c.technology();
            return [tech, exo = c.exogenous, clamp = c.clamp](std::span<const double> x) {
                return residual_leontief(tech, x, exo, clamp);
            };
        }
        case SurfaceModel::Ces:
            return [p = *c.ces](std::span<const double> x) { return ces_eval(p, x[0], x[1]); };
        case SurfaceModel::Expected: {
            auto tech = c.technology();
            return [tech, c](std::span<const double> x) { return estimate_expected(c, tech, x, {}).value; };
        }
    }
    throw Error(ErrorCode::ParamDomain, "unknown surface model");
}

PlanarSurface to_planar(BundleSurface surface) {
    return [s = std::move(surface)](double w, double c) {
        const double x[2] = {w, c};
        return s(x);
    };
}

namespace {

Table run_eval(const RunConfig& c) {
    Table t;
    t.columns = c.labels;
    if (c.model == SurfaceModel::Residual) {
        for (std::size_t k = 0; k < c.exogenous.size(); ++k) t.columns.push_back("y" + std::to_string(k + 2));
    }
    t.columns.push_back("output");
    t.columns.push_back("model");
    const auto surface = make_bundle_surface(c);
    for (const auto& p : c.points) {
        std::vector<Cell> row(p.begin(), p.end());
        if (c.model == SurfaceModel::Residual) row.insert(row.end(), c.exogenous.begin(), c.exogenous.end());
        row.emplace_back(surface(p));
        row.emplace_back(std::string(to_string(c.model)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table run_expect(const RunConfig& c, Execution exec) {
    std::vector<std::vector<double>> points;
    if (c.grid) {
        const auto& g = *c.grid;
        const auto n = g.resolution;
        auto node = [n](double lo, double hi, std::size_t i) {
            return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        };
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) points.push_back({node(g.w_lo, g.w_hi, i), node(g.c_lo, g.c_hi, j)});
        }
    }
    points.insert(points.end(), c.points.begin(), c.points.end());

    const auto tech = c.technology();
    std::vector<ExpectationEstimate> results(points.size());
    // One point per worker; a lone point gets every worker for its own samples.
    const Execution inner = points.size() == 1 ? exec : Execution{1};
    detail::parallel_for(points.size(), exec.workers,
                         [&](std::size_t i) { results[i] = estimate_expected(c, tech, points[i], inner); });

    Table t;
    t.columns = c.labels;
    for (const char* col : {"expected", "std_error", "method", "n"}) t.columns.emplace_back(col);
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::vector<Cell> row(points[i].begin(), points[i].end());
        row.emplace_back(results[i].value);
        row.emplace_back(results[i].std_error);
        row.emplace_back(std::string(to_string(results[i].method)));
        row.emplace_back(static_cast<std::int64_t>(results[i].n_samples));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table run_isoquant(const RunConfig& c, Execution exec) {
    Table t;
    t.columns = {"level", "chain", "index", "w", "c", "value", "trace"};
    t.plot = PlotSpec{"w", "c", {"level", "chain"}};
    const auto bundle = make_bundle_surface(c);
    const auto surface = to_planar(bundle);
    for (double level : c.levels) {
        IsoquantTrace trace;
        switch (c.trace) {
            case TraceMethod::AnalyticKink: {
                trace = trace_isoquant_analytic(TechnologyMatrix::focal(c.requirements.front()), level, c.extent);
                if (c.model == SurfaceModel::Residual) {
                    Point shift;
                    for (std::size_t k = 0; k < c.exogenous.size(); ++k) {
                        shift.w += c.requirements[k + 1][0] * c.exogenous[k];
                        shift.c += c.requirements[k + 1][1] * c.exogenous[k];
                    }
                    trace = shift_trace(std::move(trace), shift);
                }
                break;
            }
            case TraceMethod::RayRootFind:
                trace = trace_isoquant_rayscan(surface, level, c.angles, c.bracket, 1e-10, exec);
                break;
            case TraceMethod::GridContour:
                trace = trace_isoquant_grid(surface, level, *c.grid, exec);
                break;
        }
        if (!trace.omitted_angles.empty()) {
            std::string note = "level " + format_double(level) + ": level not bracketed on " +
                               std::to_string(trace.omitted_angles.size()) + " ray(s) at angles";
            for (double a : trace.omitted_angles) note += " " + format_double(a);
            t.notes.push_back(note);
        }
        for (std::size_t k = 0; k < trace.chains.size(); ++k) {
            const std::size_t begin = trace.chains[k];
            const std::size_t end = k + 1 < trace.chains.size() ? trace.chains[k + 1] : trace.points.size();
            for (std::size_t i = begin; i < end; ++i) {
                const auto& p = trace.points[i];
                t.rows.push_back({level, static_cast<std::int64_t>(k), static_cast<std::int64_t>(i - begin), p.w, p.c,
                                  surface(p.w, p.c), std::string(to_string(trace.method))});
            }
        }
    }
    return t;
}

Table run_rts(const RunConfig& c) {
    const auto profile = scale_profile(make_bundle_surface(c), InputBundle(c.base), c.t_values);
    const auto cls = classify_rts(profile, c.tolerance);
    Table t;
    t.columns = {"t", "output", "elasticity", "classification"};
    t.plot = PlotSpec{"t", "output", {}};
    for (std::size_t i = 0; i < profile.t_values.size(); ++i) {
        Cell e = profile.elasticities[i] ? Cell{*profile.elasticities[i]} : Cell{};
        t.rows.push_back({profile.t_values[i], profile.outputs[i], e, std::string(to_string(cls.classification))});
    }
    t.notes.push_back("classification: " + std::string(to_string(cls.classification)));
    return t;
}

std::string csv_cell(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) return "";
            else if constexpr (std::is_same_v<T, double>) return format_double(v);
            else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
            else {
                if (v.find_first_of(",\"\n") == std::string::npos) return v;
                std::string q = "\"";
                for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
                return q + "\"";
            }
        },
        cell);
}

nlohmann::ordered_json json_cell(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
            else return v;
        },
        cell);
}

std::vector<std::string> header_lines(const Table& table, const RunConfig& config) {
    std::vector<std::string> lines;
    lines.push_back(std::string(kToolName) + " " + std::string(kVersion));
    lines.push_back("task: " + std::string(to_string(config.task)));
    lines.push_back("config: " + to_json(config).dump());
    for (const auto& note : table.notes) lines.push_back(note);
    return lines;
}

double numeric(const Cell& cell) {
    if (const auto* d = std::get_if<double>(&cell)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return static_cast<double>(*i);
    return std::nan("");
}

void write_svg(const Table& table, const RunConfig& config, std::ostream& out) {
    if (!table.plot) throw Error(ErrorCode::ParamDomain, "this task has no plottable output");
    const auto& plot = *table.plot;
    const std::size_t xi = table.column(plot.x), yi = table.column(plot.y);
    std::vector<std::size_t> gi;
    for (const auto& g : plot.group) gi.push_back(table.column(g));

    std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series;
    std::map<std::string, std::size_t> index;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& row : table.rows) {
        const double x = numeric(row[xi]), y = numeric(row[yi]);
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        std::string key;
        for (std::size_t g : gi) key += (key.empty() ? "" : " ") + table.columns[g] + "=" + csv_cell(row[g]);
        auto [it, inserted] = index.emplace(key, series.size());
        if (inserted) series.push_back({key, {}});
        series[it->second].second.emplace_back(x, y);
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    if (series.empty()) throw Error(ErrorCode::ParamDomain, "nothing to plot");
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) y1 = y0 + 1.0;

    constexpr double kW = 640, kH = 480, kPad = 40;
    static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!--\n";
    for (auto line : header_lines(table, config)) {
        for (std::size_t p; (p = line.find("--")) != std::string::npos;) line.replace(p, 2, "- -");
        out << line << "\n";
    }
    out << "-->\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        out << "  <polyline fill=\"none\" stroke=\"" << colours[s % 6] << "\" data-series=\"" << series[s].first
            << "\" points=\"";
        for (const auto& [x, y] : series[s].second) {
            const double px = kPad + (x - x0) / (x1 - x0) * (kW - 2 * kPad);
            const double py = kH - kPad - (y - y0) / (y1 - y0) * (kH - 2 * kPad);
            out << format_double(std::round(px * 100) / 100) << "," << format_double(std::round(py * 100) / 100) << " ";
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace

Table run_task(const RunConfig& config, Execution exec) {
    switch (config.task) {
        case Task::Eval: return run_eval(config);
        case Task::Expect: return run_expect(config, exec);
        case Task::Isoquant: return run_isoquant(config, exec);
        case Task::Rts: return run_rts(config);
        case Task::Figure: return run_figure(config, exec);
    }
    throw Error(ErrorCode::ParamDomain, "unknown task");
}

void write_output(const Table& table, const RunConfig& config, std::ostream& out) {
    switch (config.format) {
        case OutputFormat::Csv: {
            for (const auto& line : header_lines(table, config)) out << "# " << line << "\n";
            for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
            out << "\n";
            for (const auto& row : table.rows) {
                for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
                out << "\n";
            }
            break;
        }
        case OutputFormat::Json: {
            nlohmann::ordered_json doc;
            doc["tool"] = kToolName;
            doc["version"] = kVersion;
            doc["task"] = to_string(config.task);
            doc["config"] = to_json(config);
            doc["notes"] = table.notes;
            doc["columns"] = table.columns;
            auto records = nlohmann::ordered_json::array();
            for (const auto& row : table.rows) {
                nlohmann::ordered_json rec = nlohmann::ordered_json::object();
                for (std::size_t i = 0; i < row.size(); ++i) rec[table.columns[i]] = json_cell(row[i]);
                records.push_back(std::move(rec));
            }
            doc["records"] = std::move(records);
            out << doc.dump(2) << "\n";
            break;
        }
        case OutputFormat::Svg: write_svg(table, config, out); break;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Leontief production technology: evaluation, expected output, isoquants and returns to scale"};
    std::string task_name, config_path, out_path, format;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    app.add_option("task", task_name, "eval | expect | isoquant | rts | figure")->required();
    app.add_option("--config", config_path, "YAML configuration file");
    app.add_option("--set", overrides, "Override a config value: dotted.key=value (repeatable)");
    app.add_option("--out", out_path, "Output file (default: output.path or stdout)");
    app.add_option("--format", format, "csv | json | svg");
    app.add_option("--seed", seed, "Monte Carlo seed");
    app.add_option("--workers", workers, "Worker threads (does not change results)")->check(CLI::PositiveNumber);
    app.set_version_flag("--version", std::string(kVersion));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        const auto task = parse_task(task_name);
        if (!task) throw ConfigError("task", "unknown task '" + task_name + "'");
        YAML::Node root = config_path.empty() ? YAML::Node(YAML::NodeType::Map) : load_config_file(config_path);
        for (const auto& o : overrides) apply_override(root, o);
        if (seed) apply_override(root, "seed=" + std::to_string(*seed));
        if (!format.empty()) apply_override(root, "output.format=" + format);
        RunConfig config = resolve_config(root, *task);
        if (!out_path.empty()) config.out_path = out_path;
        if (config.format == OutputFormat::Svg && (config.task == Task::Eval || config.task == Task::Expect)) {
            throw ConfigError("output.format", "svg output is available for isoquant, rts and figure tasks");
        }

        const Table table = run_task(config, Execution{workers});
        if (config.out_path.empty()) {
            write_output(table, config, out);
        } else {
            std::ofstream file(config.out_path, std::ios::binary);
            if (!file) throw std::runtime_error("cannot open output file '" + config.out_path + "'");
            write_output(table, config, file);
            if (!file) throw std::runtime_error("failed writing '" + config.out_path + "'");
        }
        return 0;
    } catch (const ConfigError& e) {
        err << kToolName << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << kToolName << ": " << e.what() << "\n";
        return 1;
    }
}

}  // namespace leontief::cli
