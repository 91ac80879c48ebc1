#include <algorithm>
#include <cmath>
#include <set>

#include "leontief/cli.hpp"
#include "leontief/error.hpp"

namespace leontief::cli {

std::string_view to_string(Task task) noexcept {
    switch (task) {
        case Task::Eval: return "eval";
        case Task::Expect: return "expect";
        case Task::Isoquant: return "isoquant";
        case Task::Rts: return "rts";
        case Task::Figure: return "figure";
    }
    return "unknown";
}

std::string_view to_string(SurfaceModel model) noexcept {
    switch (model) {
        case SurfaceModel::Leontief: return "leontief";
        case SurfaceModel::Residual: return "residual";
        case SurfaceModel::Ces: return "ces";
        case SurfaceModel::Expected: return "expected";
    }
    return "unknown";
}

std::string_view to_string(OutputFormat format) noexcept {
    switch (format) {
        case OutputFormat::Csv: return "csv";
        case OutputFormat::Json: return "json";
        case OutputFormat::Svg: return "svg";
    }
    return "unknown";
}

std::optional<Task> parse_task(std::string_view name) noexcept {
    for (Task t : {Task::Eval, Task::Expect, Task::Isoquant, Task::Rts, Task::Figure}) {
        if (to_string(t) == name) return t;
    }
    return std::nullopt;
}

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids{"1a", "1b", "2a", "2b", "3", "4a", "4b", "5a", "5b"};
    return ids;
}

namespace {

int line_of(const YAML::Node& node) {
    const auto mark = node.Mark();
    return mark.is_null() ? -1 : mark.line + 1;
}

template <typename T>
T as(const YAML::Node& node, const std::string& field) {
    if (!node.IsScalar()) throw ConfigError(field, "expected a scalar value", line_of(node));
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(field, "cannot interpret '" + node.Scalar() + "'", line_of(node));
    }
}

double as_number(const YAML::Node& node, const std::string& field) {
    const double v = as<double>(node, field);
    if (!std::isfinite(v)) throw ConfigError(field, "value must be finite", line_of(node));
    return v;
}

std::size_t as_count(const YAML::Node& node, const std::string& field) {
    const auto v = as<long long>(node, field);
    if (v < 0) throw ConfigError(field, "value must be non-negative", line_of(node));
    return static_cast<std::size_t>(v);
}

std::vector<double> as_numbers(const YAML::Node& node, const std::string& field) {
    if (!node.IsSequence()) throw ConfigError(field, "expected a list of numbers", line_of(node));
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        out.push_back(as_number(node[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<std::vector<double>> as_rows(const YAML::Node& node, const std::string& field) {
    if (!node.IsSequence()) throw ConfigError(field, "expected a list of lists", line_of(node));
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        out.push_back(as_numbers(node[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
}

void check_keys(const YAML::Node& section, const std::string& name, const std::set<std::string>& allowed) {
    if (!section) return;
    if (!section.IsMap()) throw ConfigError(name, "expected a mapping", line_of(section));
    for (const auto& kv : section) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) {
            throw ConfigError(name.empty() ? key : name + "." + key, "unknown key", line_of(kv.first));
        }
    }
}

template <typename E>
E as_enum(const YAML::Node& node, const std::string& field, std::initializer_list<std::pair<const char*, E>> choices) {
    const auto text = as<std::string>(node, field);
    std::string names;
    for (const auto& [name, value] : choices) {
        if (text == name) return value;
        names += names.empty() ? name : std::string(", ") + name;
    }
    throw ConfigError(field, "'" + text + "' is not one of: " + names, line_of(node));
}

// Any library contract violation found while resolving becomes a config error.
template <typename F>
auto guarded(const std::string& field, const YAML::Node& node, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw ConfigError(field, e.what(), line_of(node));
    }
}

bool closed_form_applies(const RunConfig& c) {
    if (c.requirements.size() != 2 || !c.demand || c.demand->is_amh()) return false;
    const auto s = c.demand->support(0);
    return s.lo == 0.0 && s.hi == 1.0;
}

}  // namespace

YAML::Node load_config_string(const std::string& text) {
    try {
        YAML::Node root = YAML::Load(text);
        if (root.IsNull()) return YAML::Node(YAML::NodeType::Map);
        if (!root.IsMap()) throw ConfigError("", "top level must be a mapping", line_of(root));
        return root;
    } catch (const YAML::ParserException& e) {
        throw ConfigError("", e.msg, e.mark.line + 1);
    }
}

YAML::Node load_config_file(const std::string& path) {
    try {
        YAML::Node root = YAML::LoadFile(path);
        if (root.IsNull()) return YAML::Node(YAML::NodeType::Map);
        if (!root.IsMap()) throw ConfigError("", "top level must be a mapping", line_of(root));
        return root;
    } catch (const YAML::BadFile&) {
        throw ConfigError("", "cannot open config file '" + path + "'");
    } catch (const YAML::ParserException& e) {
        throw ConfigError("", e.msg, e.mark.line + 1);
    }
}

void apply_override(YAML::Node& root, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError(std::string(assignment), "override must look like key=value");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    YAML::Node value;
    try {
        value = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(key, "cannot parse override value: " + e.msg);
    }

    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        parts.push_back(key.substr(start, dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    if (std::any_of(parts.begin(), parts.end(), [](const auto& p) { return p.empty(); })) {
        throw ConfigError(key, "empty path component in override key");
    }
    YAML::Node cursor = root;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        YAML::Node next = cursor[parts[i]];
        if (!next.IsDefined() || next.IsNull()) {
            cursor[parts[i]] = YAML::Node(YAML::NodeType::Map);
            next = cursor[parts[i]];
        } else if (!next.IsMap()) {
            throw ConfigError(key, "'" + parts[i] + "' is not a section");
        }
        cursor.reset(next);
    }
    // key=null drops the entry so its default applies again.
    if (value.IsNull()) cursor.remove(parts.back());
    else cursor[parts.back()] = value;
}

RunConfig resolve_config(const YAML::Node& root, Task task) {
    RunConfig c;
    c.task = task;
    check_keys(root, "", {"technology", "ces", "demand", "clamp", "seed", "task", "output"});
    check_keys(root["technology"], "technology", {"inputs", "requirements"});
    check_keys(root["ces"], "ces", {"tfp", "share", "rho", "scale"});
    check_keys(root["demand"], "demand", {"dependence", "theta", "bounds"});
    check_keys(root["task"], "task",
               {"model", "points", "exogenous", "grid", "method", "n", "nodes", "levels", "trace", "angles",
                "bracket", "extent", "base", "t_values", "tolerance", "figure"});
    check_keys(root["output"], "output", {"path", "format"});

    if (const auto seed = root["seed"]) c.seed = as<std::uint64_t>(seed, "seed");
    if (const auto clamp = root["clamp"]) {
        c.clamp = as_enum<ClampPolicy>(clamp, "clamp",
                                       {{"raw", ClampPolicy::Raw}, {"clamp_at_zero", ClampPolicy::ClampAtZero}});
    }

    if (const auto out = root["output"]) {
        if (out["path"]) c.out_path = as<std::string>(out["path"], "output.path");
        if (out["format"]) {
            c.format = as_enum<OutputFormat>(out["format"], "output.format",
                                             {{"csv", OutputFormat::Csv},
                                              {"json", OutputFormat::Json},
                                              {"svg", OutputFormat::Svg}});
        }
    }

    const YAML::Node t = root["task"] ? root["task"] : YAML::Node(YAML::NodeType::Map);

    if (task == Task::Figure) {
        if (!t["figure"]) throw ConfigError("task.figure", "figure id is required");
        c.figure = as<std::string>(t["figure"], "task.figure");
        const auto& ids = figure_ids();
        if (std::find(ids.begin(), ids.end(), c.figure) == ids.end()) {
            throw ConfigError("task.figure", "unknown figure '" + c.figure + "'", line_of(t["figure"]));
        }
        return c;
    }

    if (const auto tech = root["technology"]) {
        if (!tech["requirements"]) {
            throw ConfigError("technology.requirements", "missing requirement matrix", line_of(tech));
        }
        c.requirements = as_rows(tech["requirements"], "technology.requirements");
        guarded("technology.requirements", tech["requirements"], [&] { return c.technology(); });
        if (const auto inputs = tech["inputs"]) {
            if (!inputs.IsSequence()) throw ConfigError("technology.inputs", "expected a list of names", line_of(inputs));
            for (const auto& n : inputs) c.labels.push_back(as<std::string>(n, "technology.inputs"));
            if (c.labels.size() != c.requirements.front().size()) {
                throw ConfigError("technology.inputs", "one label per input column is required", line_of(inputs));
            }
        }
    }

    if (const auto ces = root["ces"]) {
        CesParams p;
        if (ces["tfp"]) p.tfp = as_number(ces["tfp"], "ces.tfp");
        if (ces["share"]) p.share = as_number(ces["share"], "ces.share");
        if (ces["rho"]) p.rho = as_number(ces["rho"], "ces.rho");
        if (ces["scale"]) p.scale = as_number(ces["scale"], "ces.scale");
        guarded("ces", ces, [&] { p.validate(); return 0; });
        c.ces = p;
    }

    if (const auto demand = root["demand"]) {
        if (c.requirements.size() < 2) {
            throw ConfigError("demand", "a demand model needs a technology with competing outputs", line_of(demand));
        }
        DemandModel m;
        m.count = c.requirements.size() - 1;
        if (demand["dependence"]) {
            const bool amh = as_enum<bool>(demand["dependence"], "demand.dependence",
                                           {{"independent", false}, {"amh", true}});
            if (amh) m.dependence = AmhCopula{demand["theta"] ? as_number(demand["theta"], "demand.theta") : 0.0};
        } else if (demand["theta"]) {
            throw ConfigError("demand.theta", "theta needs dependence: amh", line_of(demand["theta"]));
        }
        if (const auto b = demand["bounds"]) {
            for (const auto& row : as_rows(b, "demand.bounds")) {
                if (row.size() != 2) throw ConfigError("demand.bounds", "each bound is [lo, hi]", line_of(b));
                m.bounds.push_back({row[0], row[1]});
            }
        }
        guarded("demand", demand, [&] { m.validate(); return 0; });
        c.demand = m;
    }

    const bool has_tech = !c.requirements.empty();
    const std::size_t inputs = has_tech ? c.requirements.front().size() : 2;
    if (c.labels.empty()) {
        if (inputs == 2) c.labels = {"w", "c"};
        else for (std::size_t j = 0; j < inputs; ++j) c.labels.push_back("x" + std::to_string(j + 1));
    }

    // Surface model.
    if (t["model"]) {
        c.model = as_enum<SurfaceModel>(t["model"], "task.model",
                                        {{"leontief", SurfaceModel::Leontief},
                                         {"residual", SurfaceModel::Residual},
                                         {"ces", SurfaceModel::Ces},
                                         {"expected", SurfaceModel::Expected}});
    } else if (task == Task::Expect || (c.demand && task != Task::Eval && task != Task::Rts)) {
        c.model = SurfaceModel::Expected;
    } else if (!has_tech && c.ces) {
        c.model = SurfaceModel::Ces;
    } else {
        c.model = c.requirements.size() > 1 ? SurfaceModel::Residual : SurfaceModel::Leontief;
    }
    if (task == Task::Expect && c.model != SurfaceModel::Expected) {
        throw ConfigError("task.model", "the expect task always uses the expected surface", line_of(t["model"]));
    }
    if (c.model == SurfaceModel::Ces) {
        if (!c.ces) throw ConfigError("ces", "model 'ces' needs a ces section");
        c.labels = {"w", "c"};
    } else if (!has_tech) {
        throw ConfigError("technology", "model '" + std::string(to_string(c.model)) + "' needs a technology section");
    }
    if (c.model == SurfaceModel::Leontief && c.requirements.size() > 1) {
        c.requirements.resize(1);  // the deterministic model uses the focal row only
        c.demand.reset();
    }
    if (c.model == SurfaceModel::Expected) {
        if (!c.demand) throw ConfigError("demand", "the expected surface needs a demand section");
    } else {
        c.demand.reset();
    }
    if (c.model == SurfaceModel::Residual) {
        const std::size_t k = c.requirements.size() - 1;
        if (t["exogenous"]) c.exogenous = as_numbers(t["exogenous"], "task.exogenous");
        else c.exogenous.assign(k, 0.0);
        if (c.exogenous.size() != k) {
            throw ConfigError("task.exogenous", "expected " + std::to_string(k) + " exogenous outputs",
                              line_of(t["exogenous"]));
        }
        for (double y : c.exogenous) {
            if (y < 0.0) throw ConfigError("task.exogenous", "exogenous outputs must be >= 0", line_of(t["exogenous"]));
        }
    }
    if (c.model != SurfaceModel::Ces && c.model != SurfaceModel::Expected) c.ces.reset();
    const std::size_t dims = c.model == SurfaceModel::Ces ? 2 : inputs;

    if (c.model == SurfaceModel::Expected) {
        if (t["method"]) {
            c.method = as_enum<ExpectationMethod>(t["method"], "task.method",
                                                  {{"mc", ExpectationMethod::MonteCarlo},
                                                   {"quadrature", ExpectationMethod::Quadrature},
                                                   {"closed_form", ExpectationMethod::ClosedForm}});
        } else {
            c.method = closed_form_applies(c)          ? ExpectationMethod::ClosedForm
                       : c.demand->count <= 2 ? ExpectationMethod::Quadrature
                                              : ExpectationMethod::MonteCarlo;
        }
        if (c.method == ExpectationMethod::ClosedForm && !closed_form_applies(c)) {
            throw ConfigError("task.method", "closed_form needs one independent exogenous output on [0, 1]",
                              line_of(t["method"]));
        }
        if (c.method == ExpectationMethod::Quadrature && c.demand->count > 2) {
            throw ConfigError("task.method", "quadrature supports at most two exogenous outputs", line_of(t["method"]));
        }
        if (t["n"]) c.n = as_count(t["n"], "task.n");
        if (t["nodes"]) c.nodes = as_count(t["nodes"], "task.nodes");
        if (c.n < 2) throw ConfigError("task.n", "Monte Carlo needs n >= 2", line_of(t["n"]));
        if (c.nodes < 8) throw ConfigError("task.nodes", "quadrature needs at least 8 nodes", line_of(t["nodes"]));
    }

    auto read_grid = [&]() {
        const auto g = t["grid"];
        check_keys(g, "task.grid", {"w", "c", "resolution"});
        GridSpec spec;
        const auto w = as_numbers(g["w"], "task.grid.w");
        const auto cr = as_numbers(g["c"], "task.grid.c");
        if (w.size() != 2 || cr.size() != 2 || !(w[1] > w[0]) || !(cr[1] > cr[0])) {
            throw ConfigError("task.grid", "ranges must be [lo, hi] with lo < hi", line_of(g));
        }
        spec.w_lo = w[0];
        spec.w_hi = w[1];
        spec.c_lo = cr[0];
        spec.c_hi = cr[1];
        spec.resolution = g["resolution"] ? as_count(g["resolution"], "task.grid.resolution") : 64;
        return spec;
    };

    auto read_points = [&]() {
        c.points = as_rows(t["points"], "task.points");
        for (const auto& p : c.points) {
            if (p.size() != dims) {
                throw ConfigError("task.points", "each point needs " + std::to_string(dims) + " inputs",
                                  line_of(t["points"]));
            }
            for (double x : p) {
                if (x < 0.0) throw ConfigError("task.points", "inputs must be >= 0", line_of(t["points"]));
            }
        }
    };

    switch (task) {
        case Task::Eval:
            if (!t["points"]) throw ConfigError("task.points", "eval needs at least one point");
            read_points();
            break;
        case Task::Expect:
            if (t["grid"]) {
                if (dims != 2) throw ConfigError("task.grid", "grids need exactly two inputs", line_of(t["grid"]));
                c.grid = read_grid();
                if (c.grid->resolution < 1) throw ConfigError("task.grid.resolution", "must be >= 1");
            }
            if (t["points"]) read_points();
            if (!c.grid && c.points.empty()) throw ConfigError("task", "expect needs task.grid or task.points");
            break;
        case Task::Isoquant: {
            if (dims != 2) throw ConfigError("technology", "isoquants are traced for two inputs");
            if (!t["levels"]) throw ConfigError("task.levels", "isoquant needs levels");
            c.levels = as_numbers(t["levels"], "task.levels");
            if (c.levels.empty()) throw ConfigError("task.levels", "isoquant needs levels", line_of(t["levels"]));
            const bool analytic_ok = (c.model == SurfaceModel::Leontief || c.model == SurfaceModel::Residual);
            if (t["trace"]) {
                c.trace = as_enum<TraceMethod>(t["trace"], "task.trace",
                                               {{"analytic", TraceMethod::AnalyticKink},
                                                {"rayscan", TraceMethod::RayRootFind},
                                                {"grid", TraceMethod::GridContour}});
            } else {
                c.trace = analytic_ok ? TraceMethod::AnalyticKink : TraceMethod::RayRootFind;
            }
            if (c.trace == TraceMethod::AnalyticKink) {
                if (!analytic_ok) throw ConfigError("task.trace", "analytic traces need a deterministic Leontief model");
                for (double l : c.levels) {
                    if (!(l > 0.0)) throw ConfigError("task.levels", "analytic levels must be > 0", line_of(t["levels"]));
                }
                if (c.requirements.front()[0] <= 0.0 || c.requirements.front()[1] <= 0.0) {
                    throw ConfigError("technology.requirements", "analytic traces need positive focal requirements");
                }
                if (t["extent"]) c.extent = as_number(t["extent"], "task.extent");
                if (c.extent == 0.0) {
                    const double top = *std::max_element(c.levels.begin(), c.levels.end());
                    const auto& a = c.requirements.front();
                    c.extent = 2.0 * std::max(a[0], a[1]) * top;
                }
            }
            if (c.trace == TraceMethod::RayRootFind) {
                if (t["angles"]) c.angles = as_count(t["angles"], "task.angles");
                if (c.angles < 3) throw ConfigError("task.angles", "at least 3 rays are needed", line_of(t["angles"]));
                if (t["bracket"]) {
                    const auto b = as_numbers(t["bracket"], "task.bracket");
                    if (b.size() != 2 || !(b[0] >= 0.0 && b[1] > b[0])) {
                        throw ConfigError("task.bracket", "bracket must be [r_lo, r_hi] with 0 <= r_lo < r_hi",
                                          line_of(t["bracket"]));
                    }
                    c.bracket = {b[0], b[1]};
                }
            }
            if (c.trace == TraceMethod::GridContour) {
                if (!t["grid"]) throw ConfigError("task.grid", "grid traces need task.grid");
                c.grid = read_grid();
                if (c.grid->resolution < 8) {
                    throw ConfigError("task.grid.resolution", "grid traces need >= 8 nodes per axis");
                }
            }
            break;
        }
        case Task::Rts: {
            if (t["base"]) c.base = as_numbers(t["base"], "task.base");
            else c.base.assign(dims, 1.0);
            if (c.base.size() != dims) {
                throw ConfigError("task.base", "base needs " + std::to_string(dims) + " inputs", line_of(t["base"]));
            }
            for (double x : c.base) {
                if (x < 0.0) throw ConfigError("task.base", "inputs must be >= 0", line_of(t["base"]));
            }
            if (t["t_values"]) c.t_values = as_numbers(t["t_values"], "task.t_values");
            else c.t_values = {0.5, 0.75, 1.0, 1.5, 2.0};
            if (c.t_values.size() < 3) throw ConfigError("task.t_values", "at least 3 t values are needed");
            for (std::size_t i = 0; i < c.t_values.size(); ++i) {
                if (!(c.t_values[i] > 0.0) || (i > 0 && !(c.t_values[i] > c.t_values[i - 1]))) {
                    throw ConfigError("task.t_values", "t values must be positive and strictly increasing",
                                      line_of(t["t_values"]));
                }
            }
            if (t["tolerance"]) c.tolerance = as_number(t["tolerance"], "task.tolerance");
            if (!(c.tolerance >= 0.0)) throw ConfigError("task.tolerance", "must be >= 0");
            break;
        }
        case Task::Figure: break;
    }
    return c;
}

nlohmann::json to_json(const RunConfig& c) {
    using nlohmann::json;
    json j;
    j["task"] = {{"kind", to_string(c.task)}};
    j["output"] = {{"format", to_string(c.format)}};
    j["seed"] = c.seed;
    if (c.task == Task::Figure) {
        j["task"]["figure"] = c.figure;
        return j;
    }
    j["clamp"] = c.clamp == ClampPolicy::Raw ? "raw" : "clamp_at_zero";
    if (!c.requirements.empty()) j["technology"] = {{"inputs", c.labels}, {"requirements", c.requirements}};
    if (c.ces) {
        j["ces"] = {{"tfp", c.ces->tfp}, {"share", c.ces->share}, {"rho", c.ces->rho}, {"scale", c.ces->scale}};
    }
    if (c.demand) {
        json d{{"dependence", c.demand->is_amh() ? "amh" : "independent"}};
        if (c.demand->is_amh()) d["theta"] = c.demand->theta();
        json bounds = json::array();
        for (std::size_t k = 0; k < c.demand->count; ++k) {
            const auto s = c.demand->support(k);
            bounds.push_back({s.lo, s.hi});
        }
        d["bounds"] = bounds;
        j["demand"] = d;
    }

    auto& t = j["task"];
    t["model"] = to_string(c.model);
    if (c.model == SurfaceModel::Residual) t["exogenous"] = c.exogenous;
    if (c.model == SurfaceModel::Expected) {
        t["method"] = to_string(c.method);
        if (c.method == ExpectationMethod::MonteCarlo) t["n"] = c.n;
        if (c.method == ExpectationMethod::Quadrature) t["nodes"] = c.nodes;
    }
    if (!c.points.empty()) t["points"] = c.points;
    if (c.grid) {
        t["grid"] = {{"w", {c.grid->w_lo, c.grid->w_hi}},
                     {"c", {c.grid->c_lo, c.grid->c_hi}},
                     {"resolution", c.grid->resolution}};
    }
    if (c.task == Task::Isoquant) {
        t["levels"] = c.levels;
        t["trace"] = to_string(c.trace);
        if (c.trace == TraceMethod::AnalyticKink) t["extent"] = c.extent;
        if (c.trace == TraceMethod::RayRootFind) {
            t["angles"] = c.angles;
            t["bracket"] = {c.bracket.first, c.bracket.second};
        }
    }
    if (c.task == Task::Rts) {
        t["base"] = c.base;
        t["t_values"] = c.t_values;
        t["tolerance"] = c.tolerance;
    }
    return j;
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw std::out_of_range("no column named " + std::string(name));
}

}  // namespace leontief::cli
