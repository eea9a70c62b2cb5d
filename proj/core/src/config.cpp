#include "mfg/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "mfg/errors.hpp"

namespace mfg {

namespace {

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

struct Section {
    std::string name;
    std::vector<Entry> entries;
};

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

std::vector<Section> tokenize(const std::string& text) {
    std::vector<Section> sections;
    Section* current = nullptr;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        // Comments run to the end of the line; values never contain ; or #.
        if (const auto cut = raw.find_first_of(";#"); cut != std::string::npos) raw.erase(cut);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("config line " + std::to_string(line_no) + ": unterminated section header");
            const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
            if (name.empty()) fail("config line " + std::to_string(line_no) + ": empty section name");
            sections.push_back({name, {}});
            current = &sections.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail("config line " + std::to_string(line_no) + ": expected key = value");
        Entry e;
        e.key = trim(std::string_view(line).substr(0, eq));
        e.value = trim(std::string_view(line).substr(eq + 1));
        e.line = line_no;
        if (e.key.empty()) fail("config line " + std::to_string(line_no) + ": empty key");
        if (e.value.empty()) fail("config line " + std::to_string(line_no) + ": empty value for '" + e.key + "'");
        if (current == nullptr) fail("config line " + std::to_string(line_no) + ": key '" + e.key + "' appears outside any section");
        current->entries.push_back(std::move(e));
    }
    return sections;
}

double to_double(const Entry& e, const std::string& section) {
    double out = 0.0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        fail("config: value '" + e.value + "' for " + section + "." + e.key + " is not a number");
    return out;
}

template <typename Int>
Int to_integer(const Entry& e, const std::string& section) {
    Int out = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        fail("config: value '" + e.value + "' for " + section + "." + e.key + " is not a valid integer");
    return out;
}

[[noreturn]] void unknown_key(const std::string& section, const Entry& e) {
    fail("config: unknown key '" + e.key + "' in section [" + section + "]");
}

void apply_model(const Section& s, ModelParams& model) {
    bool vertex_set = false;
    for (const auto& e : s.entries) {
        if (e.key == "T") model.horizon = to_double(e, s.name);
        else if (e.key == "E_min") model.e_min = to_double(e, s.name);
        else if (e.key == "E_max") model.e_max = to_double(e, s.name);
        else if (e.key == "sigma") model.sigma = to_double(e, s.name);
        else if (e.key == "r") model.rate = to_double(e, s.name);
        else if (e.key == "c1") model.revenue_scale = to_double(e, s.name);
        else if (e.key == "c2") model.congestion = to_double(e, s.name);
        else if (e.key == "E0") model.quota = to_double(e, s.name);
        else if (e.key == "A") { model.revenue_vertex = to_double(e, s.name); vertex_set = true; }
        else unknown_key(s.name, e);
    }
    if (!vertex_set) model.revenue_vertex = model.e_max;
}

void apply_solver(const Section& s, SolverConfig& solver) {
    for (const auto& e : s.entries) {
        if (e.key == "N") solver.n_space = to_integer<std::size_t>(e, s.name);
        else if (e.key == "K") solver.n_time = to_integer<std::size_t>(e, s.name);
        else if (e.key == "theta") solver.theta = to_double(e, s.name);
        else if (e.key == "tol") solver.tolerance = to_double(e, s.name);
        else if (e.key == "max_iter") solver.max_iterations = to_integer<std::size_t>(e, s.name);
        else if (e.key == "omega") solver.relaxation = to_double(e, s.name);
        else if (e.key == "initial_control") solver.initial_control = to_double(e, s.name);
        else if (e.key == "control_source") {
            if (e.value == "lagged") solver.control_source = ControlSource::lagged;
            else if (e.value == "frozen") solver.control_source = ControlSource::frozen;
            else fail("config: solver.control_source must be 'lagged' or 'frozen', got '" + e.value + "'");
        } else if (e.key == "boundary") {
            if (e.value == "zero_flux") solver.density_closure = BoundaryClosure::zero_flux;
            else if (e.value == "advective") solver.density_closure = BoundaryClosure::advective_boundary;
            else fail("config: solver.boundary must be 'zero_flux' or 'advective', got '" + e.value + "'");
        } else unknown_key(s.name, e);
    }
}

void apply_schedule(const Section& s, PriceSchedule& schedule) {
    std::string kind = "constant";
    for (const auto& e : s.entries)
        if (e.key == "kind") {
            if (e.value != "constant" && e.value != "ramp")
                fail("config: schedule.kind must be 'constant' or 'ramp', got '" + e.value + "'");
            kind = e.value;
        }
    if (kind == "constant") {
        ConstantPrice p;
        for (const auto& e : s.entries) {
            if (e.key == "kind") continue;
            if (e.key == "S") p.value = to_double(e, s.name);
            else unknown_key(s.name, e);
        }
        schedule = p;
    } else {
        RampPrice p;
        for (const auto& e : s.entries) {
            if (e.key == "kind") continue;
            if (e.key == "t_start") p.t_start = to_double(e, s.name);
            else if (e.key == "t_end") p.t_end = to_double(e, s.name);
            else if (e.key == "S_max") p.s_max = to_double(e, s.name);
            else unknown_key(s.name, e);
        }
        schedule = p;
    }
}

void apply_initial(const Section& s, InitialDensity& initial) {
    std::string kind = "normal";
    for (const auto& e : s.entries)
        if (e.key == "kind") {
            if (e.value != "normal" && e.value != "tent")
                fail("config: initial_density.kind must be 'normal' or 'tent', got '" + e.value + "'");
            kind = e.value;
        }
    if (kind == "normal") {
        TruncatedNormal d;
        for (const auto& e : s.entries) {
            if (e.key == "kind") continue;
            if (e.key == "mean") d.mean = to_double(e, s.name);
            else if (e.key == "variance") d.variance = to_double(e, s.name);
            else unknown_key(s.name, e);
        }
        initial = d;
    } else {
        Tent d;
        for (const auto& e : s.entries) {
            if (e.key == "kind") continue;
            if (e.key == "apex") d.apex = to_double(e, s.name);
            else unknown_key(s.name, e);
        }
        initial = d;
    }
}

void apply_validation(const Section& s, ValidationConfig& validation) {
    for (const auto& e : s.entries) {
        if (e.key == "particles") validation.particles = to_integer<std::size_t>(e, s.name);
        else if (e.key == "substeps") validation.substeps = to_integer<int>(e, s.name);
        else if (e.key == "seed") validation.seed = to_integer<std::uint64_t>(e, s.name);
        else if (e.key == "chunk") validation.chunk_size = to_integer<std::size_t>(e, s.name);
        else unknown_key(s.name, e);
    }
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    const std::vector<Section> sections = tokenize(text);
    if (sections.empty()) return cfg; // entirely empty: the baseline run

    bool has_model = false;
    for (const auto& s : sections) has_model = has_model || s.name == "model";
    if (!has_model) fail("config: missing [model] section");

    for (const auto& s : sections) {
        if (s.name == "model") apply_model(s, cfg.model);
        else if (s.name == "solver") apply_solver(s, cfg.solver);
        else if (s.name == "schedule") apply_schedule(s, cfg.schedule);
        else if (s.name == "initial_density") apply_initial(s, cfg.initial);
        else if (s.name == "validation") apply_validation(s, cfg.validation);
        else fail("config: unknown section [" + s.name + "]");
    }

    try {
        cfg.model.validate();
        validate(cfg.schedule, cfg.model.horizon);
        validate(cfg.initial, cfg.model);
        cfg.solver.validate();
    } catch (const std::invalid_argument& e) {
        fail(std::string("config: ") + e.what());
    }
    if (cfg.validation.particles == 0) fail("config: validation.particles must be positive");
    if (cfg.validation.substeps < 1) fail("config: validation.substeps must be positive");
    if (cfg.validation.chunk_size == 0) fail("config: validation.chunk must be positive");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("config: cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

} // namespace mfg
