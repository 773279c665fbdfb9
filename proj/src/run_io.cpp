#include "shapes/run_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace shapes {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw BadInput("cannot write " + tmp.string());
        os << content;
    }
    fs::rename(tmp, target);
}

Grid RunConfig::to_grid() const {
    Point o{0.0, 0.0, 0.0};
    for (std::size_t d = 0; d < origin.size() && d < 3; ++d) o[d] = origin[d];
    return Grid(dim, spacing, o);
}

EnergyParams RunConfig::to_energy_params() const {
    EnergyParams params;
    params.lambda = lambda;
    params.p = p;
    params.target_cells = target_cells;
    params.grid = to_grid();
    params.pad_factor = pad_factor;
    params.recompute_every = recompute_every;
    return params;
}

SuiteConfig RunConfig::to_suite_config() const {
    SuiteConfig suite;
    suite.checks = checks;
    suite.p = p;
    suite.seed = verify_seed;
    suite.continuity_trials = trials;
    return suite;
}

namespace {

[[noreturn]] void bad_key(const std::string& where, const std::string& key) {
    throw BadInput("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
}

void expect_keys(const json& obj, const std::string& where,
                 std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) bad_key(where, key);
    }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw BadInput(std::string("config key '") + key + "' has the wrong type");
    }
}

}  // namespace

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw BadInput("config must be a JSON object");
    expect_keys(doc, "",
                {"shape", "out_dir", "p", "lambda", "grid", "target_cells", "pad_factor",
                 "recompute_every", "schedule", "seeds", "multistart", "checks", "verify_seed",
                 "trials", "ansatz"});
    RunConfig c;
    read_field(doc, "shape", c.shape_path);
    read_field(doc, "out_dir", c.out_dir);
    read_field(doc, "p", c.p);
    read_field(doc, "lambda", c.lambda);
    if (doc.contains("grid")) {
        const json& g = doc.at("grid");
        expect_keys(g, "grid", {"dim", "spacing", "origin"});
        read_field(g, "dim", c.dim);
        read_field(g, "spacing", c.spacing);
        read_field(g, "origin", c.origin);
    }
    read_field(doc, "target_cells", c.target_cells);
    read_field(doc, "pad_factor", c.pad_factor);
    read_field(doc, "recompute_every", c.recompute_every);
    if (doc.contains("schedule")) {
        const json& s = doc.at("schedule");
        expect_keys(s, "schedule", {"t0", "alpha", "steps"});
        read_field(s, "t0", c.t0);
        read_field(s, "alpha", c.alpha);
        read_field(s, "steps", c.steps);
    }
    read_field(doc, "seeds", c.seeds);
    read_field(doc, "multistart", c.multistart);
    read_field(doc, "checks", c.checks);
    read_field(doc, "verify_seed", c.verify_seed);
    read_field(doc, "trials", c.trials);
    if (doc.contains("ansatz")) {
        const json& a = doc.at("ansatz");
        expect_keys(a, "ansatz", {"kind", "count", "ratio"});
        read_field(a, "kind", c.ansatz_kind);
        read_field(a, "count", c.ansatz_count);
        read_field(a, "ratio", c.ansatz_ratio);
    }

    if (!(c.p >= 1.0)) throw BadInput("p must be >= 1");
    if (!(c.lambda > 0.0)) throw BadInput("lambda must be positive");
    if (c.dim < 1 || c.dim > 3) throw BadInput("grid.dim must be 1, 2, or 3");
    if (!(c.spacing > 0.0)) throw BadInput("grid.spacing must be positive");
    if (c.origin.size() > 3) throw BadInput("grid.origin has too many components");
    if (c.target_cells < 0) throw BadInput("target_cells must be >= 0");
    if (!(c.pad_factor > 0.0)) throw BadInput("pad_factor must be positive");
    if (c.recompute_every < 1) throw BadInput("recompute_every must be >= 1");
    if (c.seeds.empty()) throw BadInput("seeds must be nonempty");
    const std::vector<std::string> known_checks{"scaling", "microdroplet", "continuity",
                                                "additivity", "nucleation"};
    for (const auto& chk : c.checks) {
        if (std::find(known_checks.begin(), known_checks.end(), chk) == known_checks.end()) {
            throw BadInput("unknown check '" + chk + "'");
        }
    }
    return c;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw BadInput("cannot open config file: " + path);
    json doc;
    try {
        is >> doc;
    } catch (const json::exception& e) {
        throw BadInput(std::string("config JSON parse error: ") + e.what());
    }
    return parse_config(doc);
}

json config_to_json(const RunConfig& c) {
    json doc;
    doc["command"] = c.command;
    doc["shape"] = c.shape_path;
    doc["out_dir"] = c.out_dir;
    doc["p"] = c.p;
    doc["lambda"] = c.lambda;
    doc["grid"] = {{"dim", c.dim}, {"spacing", c.spacing}, {"origin", c.origin}};
    doc["target_cells"] = c.target_cells;
    doc["pad_factor"] = c.pad_factor;
    doc["recompute_every"] = c.recompute_every;
    doc["schedule"] = {{"t0", c.t0}, {"alpha", c.alpha}, {"steps", c.steps}};
    doc["seeds"] = c.seeds;
    doc["multistart"] = c.multistart;
    doc["checks"] = c.checks;
    doc["verify_seed"] = c.verify_seed;
    doc["trials"] = c.trials;
    doc["ansatz"] = {{"kind", c.ansatz_kind}, {"count", c.ansatz_count}, {"ratio", c.ansatz_ratio}};
    return doc;
}

std::vector<std::pair<std::string, json>> config_schema_entries() {
    const RunConfig d;
    return {
        {"shape", json(d.shape_path)},
        {"out_dir", json(d.out_dir)},
        {"p", json(d.p)},
        {"lambda", json(d.lambda)},
        {"grid.dim", json(d.dim)},
        {"grid.spacing", json(d.spacing)},
        {"grid.origin", json(d.origin)},
        {"target_cells", json(d.target_cells)},
        {"pad_factor", json(d.pad_factor)},
        {"recompute_every", json(d.recompute_every)},
        {"schedule.t0", json(d.t0)},
        {"schedule.alpha", json(d.alpha)},
        {"schedule.steps", json(d.steps)},
        {"seeds", json(d.seeds)},
        {"multistart", json(d.multistart)},
        {"checks", json(d.checks)},
        {"verify_seed", json(d.verify_seed)},
        {"trials", json(d.trials)},
        {"ansatz.kind", json(d.ansatz_kind)},
        {"ansatz.count", json(d.ansatz_count)},
        {"ansatz.ratio", json(d.ansatz_ratio)},
    };
}

json RunRecord::to_json() const {
    json doc;
    doc["config_hash"] = config_hash;
    doc["tool_version"] = tool_version;
    doc["command"] = command;
    doc["started"] = started;
    doc["finished"] = finished;
    json outs = json::array();
    for (const auto& [path, hash] : outputs) {
        outs.push_back({{"path", path}, {"hash", hash}});
    }
    doc["outputs"] = outs;
    return doc;
}

json free_target_to_json(const FreeTargetResult& r) {
    json doc;
    doc["p"] = r.p;
    doc["wp"] = r.wp;
    doc["wp_pow_p"] = r.wp_pow_p;
    doc["witness_cells"] = r.witness.cell_count();
    doc["window"] = {{"lo", {r.window.lo[0], r.window.lo[1], r.window.lo[2]}},
                     {"hi", {r.window.hi[0], r.window.hi[1], r.window.hi[2]}}};
    doc["audit"] = {{"pass", r.audits.pass},
                    {"max_distance", r.audits.max_distance},
                    {"shell_margin_cells", r.audits.shell_margin_cells},
                    {"enlargements", r.audits.enlargements},
                    {"certificate_rounds", r.audits.certificate_rounds}};
    return doc;
}

namespace {
std::string num17(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}
}  // namespace

std::string plan_to_csv(const TransportPlan& plan) {
    std::string out = "src,dst,mass,dist\n";
    for (const auto& e : plan.entries) {
        out += std::to_string(e.src);
        out += ',';
        out += std::to_string(e.snk);
        out += ',';
        out += num17(e.mass);
        out += ',';
        out += num17(e.distance);
        out += '\n';
    }
    return out;
}

json energy_report_to_json(const EnergyReport& r, const EnergyParams& params) {
    json doc;
    doc["perimeter"] = r.perimeter;
    doc["wp"] = r.wp;
    doc["lambda"] = params.lambda;
    doc["p"] = params.p;
    doc["total"] = r.total;
    doc["exact"] = r.exact;
    doc["witness_cells"] = r.witness_f.cell_count();
    return doc;
}

json reports_to_json(const std::vector<PropertyReport>& reports) {
    json doc;
    json arr = json::array();
    bool all_pass = true;
    for (const auto& r : reports) {
        json rep;
        rep["name"] = r.name;
        rep["samples"] = r.samples;
        rep["statistic"] = r.statistic;
        rep["expected_lo"] = r.expected_lo;
        rep["expected_hi"] =
            std::isinf(r.expected_hi) ? json("inf") : json(r.expected_hi);
        rep["tolerance"] = r.tolerance;
        rep["pass"] = r.pass;
        rep["artifacts"] = r.artifacts;
        arr.push_back(rep);
        all_pass = all_pass && r.pass;
    }
    doc["reports"] = arr;
    doc["all_pass"] = all_pass;
    return doc;
}

std::string trace_to_csv_header() { return "run,seed,step,temperature,accepted,total,exact\n"; }

void append_trace_csv(std::string& out, const std::string& run_label, std::uint64_t seed,
                      const std::vector<TraceRow>& trace) {
    for (const auto& row : trace) {
        out += run_label;
        out += ',';
        out += std::to_string(seed);
        out += ',';
        out += std::to_string(row.step);
        out += ',';
        out += num17(row.temperature);
        out += ',';
        out += row.accepted ? '1' : '0';
        out += ',';
        out += num17(row.total);
        out += ',';
        out += row.exact ? '1' : '0';
        out += '\n';
    }
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace shapes
