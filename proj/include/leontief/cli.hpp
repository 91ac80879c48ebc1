#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "leontief/demand.hpp"
#include "leontief/expectation.hpp"
#include "leontief/geometry.hpp"
#include "leontief/production.hpp"

namespace leontief::cli {

inline constexpr std::string_view kToolName = "leontief";
inline constexpr std::string_view kVersion = "0.1.0";

/// Invalid or incomplete configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message, int line = -1)
        : std::runtime_error(format(field, message, line)), field_(std::move(field)), line_(line) {}

    const std::string& field() const noexcept { return field_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& field, const std::string& message, int line) {
        std::string out = "config error";
        if (line >= 0) out += " (line " + std::to_string(line) + ")";
        if (!field.empty()) out += " in '" + field + "'";
        return out + ": " + message;
    }
    std::string field_;
    int line_;
};

enum class Task { Eval, Expect, Isoquant, Rts, Figure };
enum class SurfaceModel { Leontief, Residual, Ces, Expected };
enum class OutputFormat { Csv, Json, Svg };

std::string_view to_string(Task task) noexcept;
std::string_view to_string(SurfaceModel model) noexcept;
std::string_view to_string(OutputFormat format) noexcept;
std::optional<Task> parse_task(std::string_view name) noexcept;

/// Every figure id the figure task accepts.
const std::vector<std::string>& figure_ids();

/// Fully resolved run configuration: every default is explicit.
struct RunConfig {
    Task task = Task::Eval;

    std::vector<std::string> labels;
    std::vector<std::vector<double>> requirements;
    std::optional<CesParams> ces;
    std::optional<DemandModel> demand;
    ClampPolicy clamp = ClampPolicy::Raw;
    std::uint64_t seed = 0;

    SurfaceModel model = SurfaceModel::Leontief;
    std::vector<std::vector<double>> points;
    std::vector<double> exogenous;  // fixed y_2..y_K for the residual model
    std::optional<GridSpec> grid;
    ExpectationMethod method = ExpectationMethod::ClosedForm;
    std::size_t n = 100000;
    std::size_t nodes = 64;
    std::vector<double> levels;
    TraceMethod trace = TraceMethod::RayRootFind;
    std::size_t angles = 91;
    std::pair<double, double> bracket{0.0, 10.0};
    double extent = 0.0;  // analytic trace arm length; 0 means 2x the largest kink coordinate
    std::vector<double> base;
    std::vector<double> t_values;
    double tolerance = 1e-6;
    std::string figure;

    std::string out_path;
    OutputFormat format = OutputFormat::Csv;

    TechnologyMatrix technology() const { return TechnologyMatrix(requirements); }
};

/// Parses a config file. Throws ConfigError on YAML syntax errors.
YAML::Node load_config_file(const std::string& path);
YAML::Node load_config_string(const std::string& text);

/// Applies "dotted.key=value"; the value is parsed as YAML.
void apply_override(YAML::Node& root, std::string_view assignment);

/// Resolves and validates the raw document for `task`.
RunConfig resolve_config(const YAML::Node& root, Task task);

/// The resolved configuration as JSON (also valid YAML, so it can be fed back in).
nlohmann::json to_json(const RunConfig& config);

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct PlotSpec {
    std::string x;
    std::string y;
    std::vector<std::string> group;  // one polyline per distinct group key
};

/// One output table: fixed columns per task, plus header notes.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> notes;
    std::optional<PlotSpec> plot;

    std::size_t column(std::string_view name) const;
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

Table run_task(const RunConfig& config, Execution exec = {});
Table run_figure(const RunConfig& config, Execution exec = {});

/// Writes the header block (tool, version, resolved config, notes) and the table.
void write_output(const Table& table, const RunConfig& config, std::ostream& out);

/// Whole command line: parse, resolve, run, write. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace leontief::cli
