#include "retfield/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace retfield {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

ConfigError::ConfigError(const std::string& message, std::string field_, int line_)
    : std::invalid_argument(message), field(std::move(field_)), line(line_)
{
}

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

[[noreturn]] void fail(const std::string& field, const std::string& what)
{
    throw ConfigError(field + ": " + what, field);
}

/// Object reader that records which keys were consumed.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path))
    {
        if (!node_.is_object())
            fail(path_.empty() ? "<root>" : path_, "expected an object");
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    const json* get(const std::string& key)
    {
        used_.insert(key);
        auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    std::string field(const std::string& key) const { return join(path_, key); }

    void number(const std::string& key, double& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_number())
                fail(field(key), "expected a number");
            out = v->get<double>();
            if (!std::isfinite(out))
                fail(field(key), "must be finite");
        }
    }

    void integer(const std::string& key, int& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_number_integer())
                fail(field(key), "expected an integer");
            out = v->get<int>();
        }
    }

    void count(const std::string& key, std::size_t& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_number_unsigned())
                fail(field(key), "expected a non-negative integer");
            out = v->get<std::size_t>();
        }
    }

    void boolean(const std::string& key, bool& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_boolean())
                fail(field(key), "expected true or false");
            out = v->get<bool>();
        }
    }

    void string(const std::string& key, std::string& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_string())
                fail(field(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    void vec3(const std::string& key, Vec3& out)
    {
        if (const json* v = get(key)) {
            if (!v->is_array() || v->size() != 3)
                fail(field(key), "expected an array of 3 numbers");
            for (int i = 0; i < 3; ++i) {
                if (!(*v)[i].is_number())
                    fail(field(key), "expected an array of 3 numbers");
                out[i] = (*v)[i].get<double>();
            }
            if (!is_finite(out))
                fail(field(key), "must be finite");
        }
    }

    template <class Enum, class Parse>
    void enumeration(const std::string& key, Enum& out, Parse parse)
    {
        std::string name;
        string(key, name);
        if (name.empty())
            return;
        try {
            out = parse(name);
        } catch (const std::invalid_argument& e) {
            fail(field(key), e.what());
        }
    }

    void finish() const
    {
        for (auto it = node_.begin(); it != node_.end(); ++it)
            if (!used_.count(it.key()))
                fail(field(it.key()), "unknown key");
    }

    const std::string& path() const { return path_; }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> used_;
};

RangeSpec read_range(const json& node, const std::string& path)
{
    Section s(node, path);
    RangeSpec r;
    s.number("start", r.start);
    s.number("stop", r.stop);
    s.count("count", r.count);
    s.finish();
    if (!s.has("start") || !s.has("stop") || !s.has("count"))
        fail(path, "range needs start, stop and count");
    return r;
}

std::optional<Window> read_window(Section& parent, const std::string& key)
{
    const json* v = parent.get(key);
    if (!v)
        return std::nullopt;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
        fail(parent.field(key), "expected [lo, hi]");
    Window w{(*v)[0].get<double>(), (*v)[1].get<double>()};
    if (!(w.lo < w.hi))
        fail(parent.field(key), "window needs lo < hi");
    return w;
}

EnvelopeKind envelope_from_string(std::string_view name)
{
    if (name == "gaussian")
        return EnvelopeKind::Gaussian;
    if (name == "truncated_gaussian")
        return EnvelopeKind::TruncatedGaussian;
    throw std::invalid_argument("unknown envelope '" + std::string(name) + "'");
}

PulseKind pulse_from_string(std::string_view name)
{
    if (name == "sine_squared")
        return PulseKind::SineSquared;
    if (name == "diff_gaussian")
        return PulseKind::DifferentiatedGaussian;
    throw std::invalid_argument("unknown pulse '" + std::string(name) + "'");
}

DomainKind domain_from_string(std::string_view name)
{
    if (name == "ball")
        return DomainKind::Ball;
    if (name == "box")
        return DomainKind::Box;
    throw std::invalid_argument("unknown domain '" + std::string(name) + "'");
}

void read_constants(const json& node, RunConfig& cfg)
{
    Section s(node, "constants");
    std::string units;
    s.string("units", units);
    if (units == "si")
        cfg.constants = PhysicalConstants::si();
    else if (!units.empty() && units != "natural")
        fail("constants.units", "expected 'natural' or 'si'");
    s.number("c", cfg.constants.c);
    s.number("inv_4pi_eps0", cfg.constants.inv_4pi_eps0);
    s.finish();
}

void read_source(const json& node, RunConfig& cfg)
{
    auto& src = cfg.source;
    Section s(node, "source");
    s.enumeration("envelope", src.envelope, envelope_from_string);
    s.number("sigma", src.sigma);
    s.vec3("center", src.center);
    s.number("cut_radius", src.cut_radius);
    s.vec3("polarization", src.polarization);
    s.boolean("auto_normalize", src.auto_normalize);
    s.number("amplitude", src.amplitude);
    if (const json* d = s.get("domain")) {
        Section ds(*d, "source.domain");
        ds.enumeration("kind", src.domain, domain_from_string);
        ds.vec3("center", src.domain_center);
        ds.number("radius", src.domain_radius);
        ds.vec3("lo", src.domain_lo);
        ds.vec3("hi", src.domain_hi);
        ds.finish();
    }
    s.finish();
}

void read_pulse(const json& node, RunConfig& cfg)
{
    Section s(node, "pulse");
    s.enumeration("kind", cfg.pulse.kind, pulse_from_string);
    s.number("t_on", cfg.pulse.t_on);
    s.number("tau", cfg.pulse.tau);
    s.finish();
}

void read_observation(const json& node, RunConfig& cfg)
{
    auto& obs = cfg.observation;
    Section s(node, "observation");
    s.vec3("origin", obs.origin);
    s.vec3("direction", obs.direction);
    s.vec3("component", obs.component);
    if (const json* r = s.get("radii")) {
        if (r->is_array()) {
            obs.radii.kind = RadiiSpec::Kind::List;
            for (const auto& v : *r) {
                if (!v.is_number())
                    fail("observation.radii", "expected numbers");
                obs.radii.values.push_back(v.get<double>());
            }
        } else {
            Section rs(*r, "observation.radii");
            const bool lin = rs.has("linear"), geo = rs.has("geometric");
            if (lin == geo)
                fail("observation.radii", "expected a list, {\"linear\": range} or {\"geometric\": range}");
            obs.radii.kind = lin ? RadiiSpec::Kind::Linear : RadiiSpec::Kind::Geometric;
            const char* key = lin ? "linear" : "geometric";
            obs.radii.range = read_range(*rs.get(key), rs.field(key));
            rs.finish();
        }
    }
    if (const json* t = s.get("times"))
        obs.times = read_range(*t, "observation.times");
    s.finish();
}

void read_quadrature(const json& node, RunConfig& cfg)
{
    Section s(node, "quadrature");
    s.integer("base_order", cfg.quadrature.base_order);
    s.integer("max_order", cfg.quadrature.max_order);
    s.number("tol", cfg.quadrature.tol);
    s.finish();
}

void read_analysis(const json& node, RunConfig& cfg)
{
    Section s(node, "analysis");
    s.enumeration("representation", cfg.analysis.representation, representation_from_string);
    s.enumeration("feature", cfg.analysis.feature, feature_from_string);
    cfg.analysis.window = read_window(s, "window");
    s.finish();
}

void read_scaling(const json& node, RunConfig& cfg)
{
    Section s(node, "scaling");
    if (const json* o = s.get("offsets"))
        cfg.scaling.offsets = read_range(*o, "scaling.offsets");
    cfg.scaling.near = read_window(s, "near");
    cfg.scaling.intermediate = read_window(s, "intermediate");
    cfg.scaling.far = read_window(s, "far");
    s.finish();
}

void read_output(const json& node, RunConfig& cfg)
{
    Section s(node, "output");
    s.string("directory", cfg.output.directory);
    if (const json* f = s.get("formats")) {
        if (!f->is_array())
            fail("output.formats", "expected a list");
        cfg.output.csv = cfg.output.json = false;
        for (const auto& v : *f) {
            const std::string name = v.is_string() ? v.get<std::string>() : "";
            if (name == "csv")
                cfg.output.csv = true;
            else if (name == "json")
                cfg.output.json = true;
            else
                fail("output.formats", "expected \"csv\" or \"json\" entries");
        }
    }
    s.finish();
}

int line_of(const std::string& text, std::size_t byte)
{
    const std::size_t end = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
}

bool tasks_include(const RunConfig& cfg, Task t) { return std::find(cfg.tasks.begin(), cfg.tasks.end(), t) != cfg.tasks.end(); }

ojson vec_json(const Vec3& v) { return ojson::array({v.x, v.y, v.z}); }
ojson range_json(const RangeSpec& r) { return {{"start", r.start}, {"stop", r.stop}, {"count", r.count}}; }
ojson window_json(const Window& w) { return ojson::array({w.lo, w.hi}); }

}  // namespace

std::vector<double> RadiiSpec::expand() const
{
    if (kind == Kind::List)
        return values;
    std::vector<double> out(range.count);
    for (std::size_t i = 0; i < range.count; ++i) {
        if (i + 1 == range.count && range.count > 1) {
            out[i] = range.stop;
            continue;
        }
        const double f = range.count > 1 ? static_cast<double>(i) / static_cast<double>(range.count - 1) : 0.0;
        out[i] = kind == Kind::Linear ? range.start + f * (range.stop - range.start)
                                      : range.start * std::pow(range.stop / range.start, f);
    }
    return out;
}

std::string_view to_string(Task task)
{
    switch (task) {
    case Task::Decompose: return "decompose";
    case Task::Compare: return "compare";
    case Task::FrontCheck: return "frontcheck";
    case Task::Velocity: return "velocity";
    case Task::Scaling: return "scaling";
    }
    return "?";
}

Task task_from_string(std::string_view name)
{
    for (Task t : {Task::Decompose, Task::Compare, Task::FrontCheck, Task::Velocity, Task::Scaling})
        if (to_string(t) == name)
            return t;
    throw std::invalid_argument("unknown task '" + std::string(name) + "'");
}

SourceModel RunConfig::source_model() const
{
    const auto& s = source;
    const SpatialEnvelope env = s.envelope == EnvelopeKind::Gaussian
                                    ? SpatialEnvelope::gaussian(s.center, s.sigma)
                                    : SpatialEnvelope::truncated_gaussian(s.center, s.sigma, s.cut_radius);
    const TimeProfile prof = pulse.kind == PulseKind::SineSquared
                                 ? TimeProfile::sine_squared(pulse.t_on, pulse.tau)
                                 : TimeProfile::differentiated_gaussian(pulse.t_on, pulse.tau);
    const Domain dom = s.domain == DomainKind::Ball ? Domain::ball(s.domain_center, s.domain_radius)
                                                    : Domain::box(s.domain_lo, s.domain_hi);
    return SourceModel{env, prof, s.polarization, s.amplitude, dom};
}

std::vector<double> RunConfig::times() const
{
    return TimeGrid{observation.times.start, observation.times.stop, observation.times.count}.values();
}

bool operator==(const RunConfig& a, const RunConfig& b)
{
    return a.constants.c == b.constants.c && a.constants.inv_4pi_eps0 == b.constants.inv_4pi_eps0 &&
           a.source == b.source && a.pulse == b.pulse && a.observation == b.observation &&
           a.quadrature == b.quadrature && a.analysis == b.analysis && a.scaling == b.scaling &&
           a.tasks == b.tasks && a.output == b.output;
}

std::vector<std::string> validate(RunConfig& cfg)
{
    std::vector<std::string> warnings;

    try {
        cfg.constants.validate();
    } catch (const std::invalid_argument& e) {
        fail("constants", e.what());
    }

    auto& src = cfg.source;
    const double pn = norm(src.polarization);
    if (src.auto_normalize && pn > 0.0)
        src.polarization = src.polarization / pn;
    else if (std::abs(pn - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "polarization must be unit (|p| = " << pn << ")";
        fail("source.polarization", msg.str());
    }
    if (!(src.sigma > 0.0))
        fail("source.sigma", "must be positive");
    if (src.envelope == EnvelopeKind::TruncatedGaussian && !(src.cut_radius > 0.0))
        fail("source.cut_radius", "must be positive for a truncated_gaussian envelope");
    if (!(cfg.pulse.tau > 0.0))
        fail("pulse.tau", "must be positive");

    SourceModel model = [&] {
        try {
            SourceModel m = cfg.source_model();
            m.validate();
            return m;
        } catch (const std::invalid_argument& e) {
            fail("source", e.what());
        }
    }();

    const auto& q = cfg.quadrature;
    if (q.base_order < 1)
        fail("quadrature.base_order", "must be >= 1");
    if (!(q.base_order < q.max_order))
        fail("quadrature", "base_order must be less than max_order");
    if (!(q.tol > 0.0))
        fail("quadrature.tol", "must be positive");

    auto& obs = cfg.observation;
    if (std::abs(norm(obs.direction) - 1.0) > 1e-12)
        fail("observation.direction", "must be a unit vector");
    if (!(norm(obs.component) > 0.0))
        fail("observation.component", "must be nonzero");

    const auto& rs = obs.radii;
    if (rs.kind != RadiiSpec::Kind::List) {
        if (rs.range.count < 1)
            fail("observation.radii", "count must be >= 1");
        if (rs.kind == RadiiSpec::Kind::Geometric && !(rs.range.start > 0.0 && rs.range.stop > 0.0))
            fail("observation.radii", "geometric range needs positive start and stop");
    }
    const std::vector<double> radii = cfg.radii();
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!std::isfinite(radii[i]))
            fail("observation.radii", "must be finite");
        if (i > 0 && !(radii[i] > radii[i - 1]))
            fail("observation.radii", "must be strictly increasing");
        const Vec3 x = obs.origin + obs.direction * radii[i];
        if (!(model.domain.distance(x) > 1e-9 * model.domain.diameter())) {
            std::ostringstream msg;
            msg << "radius " << radii[i] << " places the observation point inside the source domain";
            fail("observation.radii", msg.str());
        }
    }

    const auto& tr = obs.times;
    const bool needs_grid = tasks_include(cfg, Task::Decompose) || tasks_include(cfg, Task::Compare) ||
                            tasks_include(cfg, Task::FrontCheck) || tasks_include(cfg, Task::Velocity);
    if (needs_grid && radii.empty())
        fail("observation.radii", "required by the configured tasks");
    if (needs_grid && tr.count == 0)
        fail("observation.times", "required by the configured tasks");
    if (tr.count > 1 && !(tr.stop > tr.start))
        fail("observation.times", "stop must exceed start");
    if (tasks_include(cfg, Task::Velocity)) {
        const double dt = tr.count > 1 ? (tr.stop - tr.start) / static_cast<double>(tr.count - 1) : 0.0;
        if (dt > cfg.pulse.tau / 50.0) {
            std::ostringstream msg;
            msg << "observation.times: step " << dt << " exceeds tau/50 = " << cfg.pulse.tau / 50.0
                << "; feature arrival times will be coarse";
            warnings.push_back(msg.str());
        }
        if (radii.size() < 2)
            fail("observation.radii", "velocity needs at least two radii");
    }
    if (tasks_include(cfg, Task::Scaling)) {
        const auto& sc = cfg.scaling;
        if (sc.offsets.count == 0)
            fail("scaling.offsets", "required by the scaling task");
        if (sc.offsets.count > 1 && !(sc.offsets.stop > sc.offsets.start))
            fail("scaling.offsets", "stop must exceed start");
        if (!sc.near && !sc.intermediate && !sc.far)
            fail("scaling", "set at least one of near, intermediate, far");
        if (cfg.analysis.representation == Representation::Jefimenko)
            fail("analysis.representation", "scaling fits need the three-term (budko or dipole) split");
    }

    std::set<Task> seen;
    for (Task t : cfg.tasks)
        if (!seen.insert(t).second)
            fail("tasks", "duplicate task '" + std::string(to_string(t)) + "'");

    if (cfg.output.directory.empty())
        fail("output.directory", "must not be empty");
    return warnings;
}

ParsedConfig parse_config(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        const int line = line_of(text, e.byte);
        throw ConfigError("line " + std::to_string(line) + ": " + e.what(), {}, line);
    }

    ParsedConfig out;
    RunConfig& cfg = out.config;
    Section root(doc, "");
    if (const json* v = root.get("constants"))
        read_constants(*v, cfg);
    const json* src = root.get("source");
    if (!src)
        fail("source", "missing required section");
    read_source(*src, cfg);
    if (const json* v = root.get("pulse"))
        read_pulse(*v, cfg);
    if (const json* v = root.get("observation"))
        read_observation(*v, cfg);
    if (const json* v = root.get("quadrature"))
        read_quadrature(*v, cfg);
    if (const json* v = root.get("analysis"))
        read_analysis(*v, cfg);
    if (const json* v = root.get("scaling"))
        read_scaling(*v, cfg);
    if (const json* v = root.get("tasks")) {
        if (!v->is_array())
            fail("tasks", "expected a list");
        for (const auto& t : *v) {
            if (!t.is_string())
                fail("tasks", "expected task names");
            try {
                cfg.tasks.push_back(task_from_string(t.get<std::string>()));
            } catch (const std::invalid_argument& e) {
                fail("tasks", e.what());
            }
        }
    }
    if (const json* v = root.get("output"))
        read_output(*v, cfg);
    root.finish();

    out.warnings = validate(cfg);
    return out;
}

ParsedConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

nlohmann::ordered_json to_json(const RunConfig& cfg)
{
    ojson j;
    j["constants"] = {{"c", cfg.constants.c}, {"inv_4pi_eps0", cfg.constants.inv_4pi_eps0}};

    const auto& s = cfg.source;
    ojson dom = {{"kind", to_string(s.domain)}};
    if (s.domain == DomainKind::Ball) {
        dom["center"] = vec_json(s.domain_center);
        dom["radius"] = s.domain_radius;
    } else {
        dom["lo"] = vec_json(s.domain_lo);
        dom["hi"] = vec_json(s.domain_hi);
    }
    j["source"] = {{"envelope", to_string(s.envelope)},
                   {"sigma", s.sigma},
                   {"center", vec_json(s.center)},
                   {"cut_radius", s.cut_radius},
                   {"polarization", vec_json(s.polarization)},
                   {"auto_normalize", s.auto_normalize},
                   {"amplitude", s.amplitude},
                   {"domain", dom}};

    j["pulse"] = {{"kind", to_string(cfg.pulse.kind)}, {"t_on", cfg.pulse.t_on}, {"tau", cfg.pulse.tau}};

    const auto& o = cfg.observation;
    ojson radii;
    switch (o.radii.kind) {
    case RadiiSpec::Kind::List: radii = o.radii.values; break;
    case RadiiSpec::Kind::Linear: radii = {{"linear", range_json(o.radii.range)}}; break;
    case RadiiSpec::Kind::Geometric: radii = {{"geometric", range_json(o.radii.range)}}; break;
    }
    if (radii.is_null())
        radii = ojson::array();
    j["observation"] = {{"origin", vec_json(o.origin)},
                        {"direction", vec_json(o.direction)},
                        {"component", vec_json(o.component)},
                        {"radii", radii},
                        {"times", range_json(o.times)}};

    j["quadrature"] = {{"base_order", cfg.quadrature.base_order},
                       {"max_order", cfg.quadrature.max_order},
                       {"tol", cfg.quadrature.tol}};

    j["analysis"] = {{"representation", to_string(cfg.analysis.representation)},
                     {"feature", to_string(cfg.analysis.feature)}};
    if (cfg.analysis.window)
        j["analysis"]["window"] = window_json(*cfg.analysis.window);

    j["scaling"] = {{"offsets", range_json(cfg.scaling.offsets)}};
    if (cfg.scaling.near)
        j["scaling"]["near"] = window_json(*cfg.scaling.near);
    if (cfg.scaling.intermediate)
        j["scaling"]["intermediate"] = window_json(*cfg.scaling.intermediate);
    if (cfg.scaling.far)
        j["scaling"]["far"] = window_json(*cfg.scaling.far);

    j["tasks"] = ojson::array();
    for (Task t : cfg.tasks)
        j["tasks"].push_back(to_string(t));

    ojson formats = ojson::array();
    if (cfg.output.csv)
        formats.push_back("csv");
    if (cfg.output.json)
        formats.push_back("json");
    j["output"] = {{"directory", cfg.output.directory}, {"formats", formats}};
    return j;
}

}  // namespace retfield
