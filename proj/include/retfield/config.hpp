#pragma once

// Run configuration: a JSON document (schema in README) parsed into plain
// value structs. Every field has a default, and to_json() writes all of
// them, so the echo in a report re-parses to an equal config.

#include "retfield/analysis.hpp"
#include "retfield/evaluators.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace retfield {

/// Schema or semantic error. `field` is a dotted path ("source.sigma"),
/// `line` is set for syntax errors.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& message, std::string field = {}, int line = 0);
    std::string field;
    int line = 0;
};

struct RangeSpec {
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 0;

    friend bool operator==(const RangeSpec&, const RangeSpec&) = default;
};

struct RadiiSpec {
    enum class Kind { List, Linear, Geometric };
    Kind kind = Kind::List;
    std::vector<double> values;  ///< Kind::List
    RangeSpec range;             ///< Linear / Geometric

    std::vector<double> expand() const;
    friend bool operator==(const RadiiSpec&, const RadiiSpec&) = default;
};

struct Window {
    double lo = 0.0;
    double hi = 0.0;

    friend bool operator==(const Window&, const Window&) = default;
};

enum class Task { Decompose, Compare, FrontCheck, Velocity, Scaling };

std::string_view to_string(Task task);
Task task_from_string(std::string_view name);

struct RunConfig {
    PhysicalConstants constants;

    struct Source {
        EnvelopeKind envelope = EnvelopeKind::Gaussian;
        double sigma = 1.0;
        Vec3 center;
        double cut_radius = 0.0;  ///< truncated_gaussian only
        Vec3 polarization{0.0, 0.0, 1.0};
        bool auto_normalize = false;
        double amplitude = 1.0;
        DomainKind domain = DomainKind::Ball;
        Vec3 domain_center;  ///< ball
        double domain_radius = 8.0;
        Vec3 domain_lo{-8.0, -8.0, -8.0};  ///< box
        Vec3 domain_hi{8.0, 8.0, 8.0};

        friend bool operator==(const Source&, const Source&) = default;
    } source;

    struct Pulse {
        PulseKind kind = PulseKind::SineSquared;
        double t_on = 0.0;
        double tau = 1.0;

        friend bool operator==(const Pulse&, const Pulse&) = default;
    } pulse;

    struct Observation {
        Vec3 origin;
        Vec3 direction{0.0, 0.0, 1.0};
        Vec3 component{0.0, 0.0, 1.0};
        RadiiSpec radii;
        RangeSpec times;

        friend bool operator==(const Observation&, const Observation&) = default;
    } observation;

    struct Quadrature {
        int base_order = 12;
        int max_order = 24;
        double tol = 1e-10;

        friend bool operator==(const Quadrature&, const Quadrature&) = default;
    } quadrature;

    struct Analysis {
        Representation representation = Representation::Budko;
        FeatureKind feature = FeatureKind::Peak;
        std::optional<Window> window;  ///< feature search window; whole grid if unset

        friend bool operator==(const Analysis&, const Analysis&) = default;
    } analysis;

    struct Scaling {
        RangeSpec offsets;  ///< retarded offsets t - r/c
        std::optional<Window> near, intermediate, far;

        friend bool operator==(const Scaling&, const Scaling&) = default;
    } scaling;

    std::vector<Task> tasks;

    struct Output {
        std::string directory = "retfield_out";
        bool csv = true;
        bool json = true;

        friend bool operator==(const Output&, const Output&) = default;
    } output;

    SourceModel source_model() const;
    Ray ray() const { return {observation.origin, observation.direction}; }
    std::vector<double> radii() const { return observation.radii.expand(); }
    std::vector<double> times() const;

    friend bool operator==(const RunConfig&, const RunConfig&);
};

struct ParsedConfig {
    RunConfig config;
    std::vector<std::string> warnings;
};

/// Parses and validates. Throws ConfigError.
ParsedConfig parse_config(const std::string& text);
ParsedConfig load_config(const std::string& path);

/// Semantic checks; returns warnings, throws ConfigError.
std::vector<std::string> validate(RunConfig& config);

nlohmann::ordered_json to_json(const RunConfig& config);

}  // namespace retfield
