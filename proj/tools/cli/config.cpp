#include "config.hpp"

#include "stabclt/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace stabclt::cli {

using nlohmann::json;

namespace {

/// Walks a parsed document, turning schema violations into located messages.
class Reader {
public:
    Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& path, const std::string& message) const {
        const auto [line, column] = locate(path);
        std::ostringstream out;
        out << source_ << ':' << line << ':' << column << ": " << (path.empty() ? "config" : path) << ": "
            << message;
        throw UsageError(out.str());
    }

    void allow_only(const json& object, const std::string& path, std::initializer_list<const char*> keys) const {
        if (!object.is_object()) {
            fail(path, "expected an object");
        }
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [key, value] : object.items()) {
            if (!allowed.count(key)) {
                fail(join(path, key), "unknown key");
            }
        }
    }

    const json& require(const json& object, const std::string& path, const char* key) const {
        const auto it = object.find(key);
        if (it == object.end()) {
            fail(path, std::string("missing required key '") + key + "'");
        }
        return *it;
    }

    double number(const json& v, const std::string& path) const {
        if (!v.is_number()) {
            fail(path, "expected a number");
        }
        return v.get<double>();
    }

    double positive(const json& v, const std::string& path) const {
        const double x = number(v, path);
        if (!(x > 0.0) || !std::isfinite(x)) {
            fail(path, "expected a positive number");
        }
        return x;
    }

    std::uint64_t unsigned_integer(const json& v, const std::string& path) const {
        if (!v.is_number_unsigned()) {
            fail(path, "expected a nonnegative integer");
        }
        return v.get<std::uint64_t>();
    }

    bool boolean(const json& v, const std::string& path) const {
        if (!v.is_boolean()) {
            fail(path, "expected true or false");
        }
        return v.get<bool>();
    }

    std::string string(const json& v, const std::string& path) const {
        if (!v.is_string()) {
            fail(path, "expected a string");
        }
        return v.get<std::string>();
    }

    std::vector<double> numbers(const json& v, const std::string& path) const {
        if (!v.is_array()) {
            fail(path, "expected an array of numbers");
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.push_back(number(v[i], index(path, i)));
        }
        return out;
    }

    Box box(const json& v, const std::string& path) const {
        try {
            if (v.is_array()) {
                // One-dimensional shorthand [lower, upper].
                const auto bounds = numbers(v, path);
                if (bounds.size() != 2) {
                    fail(path, "a box written as an array must be [lower, upper]");
                }
                return Box::interval(bounds[0], bounds[1]);
            }
            allow_only(v, path, {"lower", "upper"});
            return Box(numbers(require(v, path, "lower"), join(path, "lower")),
                       numbers(require(v, path, "upper"), join(path, "upper")));
        } catch (const Error& e) {
            fail(path, e.what());
        }
    }

    Region region(const json& v, const std::string& path) const {
        if (!v.is_array() || v.empty()) {
            fail(path, "expected a nonempty array of boxes");
        }
        std::vector<Box> boxes;
        for (std::size_t i = 0; i < v.size(); ++i) {
            boxes.push_back(box(v[i], index(path, i)));
        }
        try {
            return Region(std::move(boxes));
        } catch (const Error& e) {
            fail(path, e.what());
        }
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }
    static std::string index(const std::string& path, std::size_t i) {
        return path + "[" + std::to_string(i) + "]";
    }

private:
    // Best-effort position: find each quoted key of the path in turn.
    std::pair<std::size_t, std::size_t> locate(const std::string& path) const {
        std::size_t pos = 0;
        std::size_t found = std::string::npos;
        std::stringstream segments(path);
        std::string segment;
        while (std::getline(segments, segment, '.')) {
            const auto bracket = segment.find('[');
            const std::string key = segment.substr(0, bracket);
            const auto at = text_.find('"' + key + '"', pos);
            if (at == std::string::npos) {
                break;
            }
            found = pos = at;
        }
        if (found == std::string::npos) {
            return {1, 1};
        }
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i < found; ++i) {
            if (text_[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        return {line, column};
    }

    const std::string& text_;
    std::string source_;
};

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') {
        return std::nullopt;
    }
    return std::string(v);
}

std::uint64_t env_unsigned(const char* name, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long x = std::strtoull(value.c_str(), &end, 10);
    if (errno != 0 || end == value.c_str() || *end != '\0' || value.front() == '-') {
        throw UsageError(std::string(name) + ": expected a nonnegative integer, got '" + value + "'");
    }
    return x;
}

void parse_density(const Reader& r, const json& doc, RunConfig& config) {
    const json& d = r.require(doc, "", "density");
    r.allow_only(d, "density", {"support", "weights", "homogeneous", "probability"});
    const Region support = r.region(r.require(d, "density", "support"), "density.support");
    const bool homogeneous = d.contains("homogeneous") && r.boolean(d["homogeneous"], "density.homogeneous");
    const bool probability = d.contains("probability") && r.boolean(d["probability"], "density.probability");
    try {
        if (homogeneous) {
            if (d.contains("weights")) {
                r.fail("density.weights", "weights are implied by homogeneous: true");
            }
            config.density = DensitySpec::homogeneous(support);
            return;
        }
        auto weights = r.numbers(r.require(d, "density", "weights"), "density.weights");
        config.density = probability ? DensitySpec::probability(support, std::move(weights))
                                     : DensitySpec::intensity(support, std::move(weights));
    } catch (const Error& e) {
        r.fail("density", e.what());
    }
}

void parse_test_functions(const Reader& r, const json& doc, RunConfig& config) {
    if (doc.contains("regions") && doc.contains("test_functions")) {
        r.fail("test_functions", "give either regions or test_functions, not both");
    }
    if (doc.contains("regions")) {
        const json& regions = doc["regions"];
        if (!regions.is_array()) {
            r.fail("regions", "expected an array of regions");
        }
        for (std::size_t i = 0; i < regions.size(); ++i) {
            config.test_functions.push_back(TestFunctionSpec::indicator(r.region(regions[i], Reader::index("regions", i))));
        }
        return;
    }
    if (!doc.contains("test_functions")) {
        return;
    }
    const json& fs = doc["test_functions"];
    if (!fs.is_array()) {
        r.fail("test_functions", "expected an array");
    }
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const std::string path = Reader::index("test_functions", i);
        r.allow_only(fs[i], path, {"region", "kind", "values"});
        Region region = r.region(r.require(fs[i], path, "region"), path + ".region");
        const std::string kind = fs[i].contains("kind") ? r.string(fs[i]["kind"], path + ".kind") : "indicator";
        try {
            if (kind == "indicator") {
                if (fs[i].contains("values")) {
                    r.fail(path + ".values", "an indicator takes no values");
                }
                config.test_functions.push_back(TestFunctionSpec::indicator(std::move(region)));
            } else if (kind == "piecewise") {
                auto values = r.numbers(r.require(fs[i], path, "values"), path + ".values");
                config.test_functions.push_back(TestFunctionSpec::piecewise(std::move(region), std::move(values)));
            } else {
                r.fail(path + ".kind", "expected 'indicator' or 'piecewise'");
            }
        } catch (const Error& e) {
            r.fail(path, e.what());
        }
    }
}

void parse_functional(const Reader& r, const json& doc, RunConfig& config) {
    if (!doc.contains("functional")) {
        return;
    }
    const json& f = doc["functional"];
    r.allow_only(f, "functional", {"family", "k", "alpha"});
    try {
        if (f.contains("family")) {
            config.functional.family = parse_family(r.string(f["family"], "functional.family"));
        }
        if (f.contains("k")) {
            config.functional.k = r.unsigned_integer(f["k"], "functional.k");
        }
        if (f.contains("alpha")) {
            config.functional.alpha = WeightExponent{r.number(f["alpha"], "functional.alpha")};
        }
        FunctionalSpec probe = config.functional;
        probe.validate();
    } catch (const Error& e) {
        r.fail("functional", e.what());
    }
}

void parse_probe(const Reader& r, const json& doc, RunConfig& config) {
    if (!doc.contains("probe")) {
        return;
    }
    const json& p = doc["probe"];
    r.allow_only(p, "probe",
                 {"lambda", "probe_count", "resample_count", "max_radius", "tolerance", "grid_points", "min_tail_count"});
    auto& o = config.probe.options;
    if (p.contains("lambda")) {
        config.probe.lambda = r.positive(p["lambda"], "probe.lambda");
    }
    if (p.contains("probe_count")) {
        o.probe_count = r.unsigned_integer(p["probe_count"], "probe.probe_count");
        if (o.probe_count == 0) {
            r.fail("probe.probe_count", "must be at least 1");
        }
    }
    if (p.contains("resample_count")) {
        o.resample_count = r.unsigned_integer(p["resample_count"], "probe.resample_count");
        if (o.resample_count == 0) {
            r.fail("probe.resample_count", "must be at least 1");
        }
    }
    if (p.contains("max_radius")) {
        o.max_radius = r.positive(p["max_radius"], "probe.max_radius");
    }
    if (p.contains("tolerance")) {
        o.tolerance = r.positive(p["tolerance"], "probe.tolerance");
    }
    if (p.contains("grid_points")) {
        o.grid_points = r.unsigned_integer(p["grid_points"], "probe.grid_points");
        if (o.grid_points < 2) {
            r.fail("probe.grid_points", "must be at least 2");
        }
    }
    if (p.contains("min_tail_count")) {
        o.min_tail_count = r.unsigned_integer(p["min_tail_count"], "probe.min_tail_count");
    }
}

void parse_check(const Reader& r, const json& doc, RunConfig& config) {
    if (!doc.contains("check")) {
        return;
    }
    const json& c = doc["check"];
    r.allow_only(c, "check", {"sigmas", "mean_abs_tolerance", "variance_abs_tolerance", "max_joint_discrepancy",
                              "max_abs_correlation", "rate_band"});
    if (c.contains("sigmas")) {
        config.check.sigmas = r.positive(c["sigmas"], "check.sigmas");
    }
    if (c.contains("mean_abs_tolerance")) {
        config.check.mean_abs_tolerance = r.positive(c["mean_abs_tolerance"], "check.mean_abs_tolerance");
    }
    if (c.contains("variance_abs_tolerance")) {
        config.check.variance_abs_tolerance = r.positive(c["variance_abs_tolerance"], "check.variance_abs_tolerance");
    }
    if (c.contains("max_joint_discrepancy")) {
        config.check.max_joint_discrepancy = r.positive(c["max_joint_discrepancy"], "check.max_joint_discrepancy");
    }
    if (c.contains("max_abs_correlation")) {
        config.check.max_abs_correlation = r.positive(c["max_abs_correlation"], "check.max_abs_correlation");
    }
    if (c.contains("rate_band")) {
        const auto band = r.numbers(c["rate_band"], "check.rate_band");
        if (band.size() != 2 || !(band[0] <= band[1])) {
            r.fail("check.rate_band", "expected [low, high] with low <= high");
        }
        config.check.rate_band = std::make_pair(band[0], band[1]);
    }
}

void parse_output(const Reader& r, const json& doc, RunConfig& config) {
    if (!doc.contains("output")) {
        return;
    }
    const json& o = doc["output"];
    r.allow_only(o, "output", {"dir", "json", "csv"});
    if (o.contains("dir")) {
        config.output.dir = r.string(o["dir"], "output.dir");
    }
    if (o.contains("json")) {
        config.output.json = r.boolean(o["json"], "output.json");
    }
    if (o.contains("csv")) {
        config.output.csv = r.boolean(o["csv"], "output.csv");
    }
}

} // namespace

ExperimentPlan RunConfig::plan() const {
    if (test_functions.empty()) {
        throw UsageError(source_name + ": config needs 'regions' or 'test_functions' to simulate");
    }
    if (lambda_grid.empty()) {
        throw UsageError(source_name + ": config needs 'lambda_grid' to simulate");
    }
    if (!replicates) {
        throw UsageError(source_name + ": config needs 'replicates' to simulate");
    }
    ExperimentPlan p{density, test_functions, functional, process, lambda_grid, *replicates, seed, t_grid,
                     grid_budget};
    try {
        p.validate();
    } catch (const ConfigurationError& e) {
        throw UsageError(source_name + ": " + e.what());
    }
    return p;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string RunConfig::hash() const {
    json canonical = document;
    canonical.erase("workers");
    canonical.erase("output");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(canonical.dump()));
    return buf;
}

RunConfig parse_config(const std::string& text, const std::string& source_name, const Overrides& overrides) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // Convert the byte offset into line and column.
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw UsageError(source_name + ":" + std::to_string(line) + ":" + std::to_string(column) +
                         ": malformed JSON (" + e.what() + ")");
    }
    const Reader r(text, source_name);
    r.allow_only(doc, "",
                 {"dimension", "density", "regions", "test_functions", "functional", "process", "lambda_grid",
                  "replicates", "seed", "workers", "t_grid", "grid_budget", "probe", "check", "output"});

    RunConfig config;
    config.source_name = source_name;
    parse_density(r, doc, config);
    if (doc.contains("dimension") &&
        r.unsigned_integer(doc["dimension"], "dimension") != config.density.dimension()) {
        r.fail("dimension", "does not match the dimension of density.support");
    }
    parse_test_functions(r, doc, config);
    for (std::size_t i = 0; i < config.test_functions.size(); ++i) {
        if (config.test_functions[i].region().dimension() != config.density.dimension()) {
            r.fail(doc.contains("regions") ? "regions" : "test_functions",
                   "region " + std::to_string(i) + " has the wrong dimension");
        }
    }
    parse_functional(r, doc, config);
    if (doc.contains("process")) {
        try {
            config.process = parse_process(r.string(doc["process"], "process"));
        } catch (const ConfigurationError& e) {
            r.fail("process", e.what());
        }
    }
    if (doc.contains("lambda_grid")) {
        config.lambda_grid = r.numbers(doc["lambda_grid"], "lambda_grid");
        for (std::size_t i = 0; i < config.lambda_grid.size(); ++i) {
            if (!(config.lambda_grid[i] > 0.0) || !std::isfinite(config.lambda_grid[i])) {
                r.fail(Reader::index("lambda_grid", i), "expected a positive number");
            }
            if (i > 0 && !(config.lambda_grid[i] > config.lambda_grid[i - 1])) {
                r.fail("lambda_grid", "must be strictly increasing");
            }
        }
    }
    if (doc.contains("replicates")) {
        config.replicates = r.unsigned_integer(doc["replicates"], "replicates");
        if (*config.replicates < 2) {
            r.fail("replicates", "must be at least 2");
        }
    }
    if (doc.contains("t_grid")) {
        config.t_grid = r.numbers(doc["t_grid"], "t_grid");
        if (config.t_grid.empty()) {
            r.fail("t_grid", "must not be empty");
        }
    }
    if (doc.contains("grid_budget")) {
        config.grid_budget = r.unsigned_integer(doc["grid_budget"], "grid_budget");
    }
    parse_probe(r, doc, config);
    parse_check(r, doc, config);
    parse_output(r, doc, config);

    // Flags, then the file, then the environment.
    if (overrides.seed) {
        config.seed = *overrides.seed;
    } else if (doc.contains("seed")) {
        config.seed = r.unsigned_integer(doc["seed"], "seed");
    } else if (const auto v = env("STABCLT_SEED")) {
        config.seed = env_unsigned("STABCLT_SEED", *v);
    }
    if (overrides.workers) {
        config.workers = *overrides.workers;
    } else if (doc.contains("workers")) {
        config.workers = r.unsigned_integer(doc["workers"], "workers");
    } else if (const auto v = env("STABCLT_WORKERS")) {
        config.workers = env_unsigned("STABCLT_WORKERS", *v);
    }
    if (config.workers == 0) {
        throw UsageError("workers must be at least 1");
    }
    if (overrides.out) {
        config.out_dir = *overrides.out;
    } else if (config.output.dir) {
        config.out_dir = *config.output.dir;
    } else if (const auto v = env("STABCLT_OUT")) {
        config.out_dir = *v;
    }

    doc["seed"] = config.seed;
    config.document = std::move(doc);
    return config;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

RunConfig load_config(const std::string& path, const Overrides& overrides) {
    return parse_config(read_file(path), path, overrides);
}

} // namespace stabclt::cli
