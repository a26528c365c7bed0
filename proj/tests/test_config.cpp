#include "retfield/config.hpp"

#include <doctest.h>

#include <filesystem>

using namespace retfield;

namespace {

const char* kMinimal = R"({
  "source": {"sigma": 1, "domain": {"kind": "ball", "radius": 8}},
  "observation": {"radii": [20], "times": {"start": 0, "stop": 10, "count": 11}},
  "tasks": ["decompose"]
})";

std::string with_source(const std::string& source_body, const std::string& extra = "")
{
    return R"({"source": {)" + source_body +
           R"(}, "observation": {"radii": [20, 30], "times": {"start": 0, "stop": 10, "count": 11}})" + extra + "}";
}

ConfigError config_error(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected ConfigError");
    return ConfigError("");
}

}  // namespace

TEST_CASE("minimal config materializes the defaults")
{
    const ParsedConfig p = parse_config(kMinimal);
    const RunConfig& c = p.config;
    CHECK(c.constants.c == 1.0);
    CHECK(c.constants.inv_4pi_eps0 == 1.0);
    CHECK(c.quadrature.base_order == 12);
    CHECK(c.quadrature.max_order == 24);
    CHECK(c.pulse.kind == PulseKind::SineSquared);
    CHECK(c.source.envelope == EnvelopeKind::Gaussian);
    CHECK(c.source.polarization == Vec3{0, 0, 1});
    CHECK(c.analysis.representation == Representation::Budko);
    CHECK(c.tasks == std::vector<Task>{Task::Decompose});
    CHECK(c.output.csv);
    CHECK(c.output.json);
    CHECK(p.warnings.empty());
    CHECK(c.radii() == std::vector<double>{20.0});
    CHECK(c.times().size() == 11);
}

TEST_CASE("si units")
{
    const ParsedConfig p = parse_config(with_source(R"("sigma": 1)", R"(, "constants": {"units": "si"})"));
    CHECK(p.config.constants.c == 299792458.0);
}

TEST_CASE("polarization must be unit")
{
    const ConfigError e = config_error(with_source(R"("polarization": [0, 0, 2])"));
    CHECK(std::string(e.what()).find("polarization must be unit") != std::string::npos);
    CHECK(e.field == "source.polarization");

    const ParsedConfig p = parse_config(with_source(R"("polarization": [0, 0, 2], "auto_normalize": true)"));
    CHECK(p.config.source.polarization == Vec3{0, 0, 1});
}

TEST_CASE("radii inside the domain are named")
{
    const std::string text = R"({"source": {"domain": {"kind": "ball", "radius": 8}},
        "observation": {"radii": [3.5, 20], "times": {"start": 0, "stop": 1, "count": 2}}})";
    const ConfigError e = config_error(text);
    CHECK(std::string(e.what()).find("radius 3.5") != std::string::npos);
    CHECK(e.field == "observation.radii");
}

TEST_CASE("schema errors identify the field or line")
{
    const ConfigError unknown = config_error(with_source(R"("sigmaa": 1)"));
    CHECK(unknown.field == "source.sigmaa");
    CHECK(std::string(unknown.what()).find("unknown key") != std::string::npos);

    const ConfigError type = config_error(with_source(R"("sigma": "wide")"));
    CHECK(type.field == "source.sigma");

    const ConfigError syntax = config_error("{\n  \"source\": {\n    \"sigma\": 1,,\n  }\n}");
    CHECK(syntax.line == 3);

    const ConfigError missing = config_error(R"({"tasks": []})");
    CHECK(missing.field == "source");

    const ConfigError task = config_error(with_source(R"("sigma": 1)", R"(, "tasks": ["plot"])"));
    CHECK(task.field == "tasks");

    const ConfigError dup = config_error(with_source(R"("sigma": 1)", R"(, "tasks": ["compare", "compare"])"));
    CHECK(std::string(dup.what()).find("duplicate") != std::string::npos);

    const ConfigError enum_err = config_error(with_source(R"("envelope": "lorentzian")"));
    CHECK(enum_err.field == "source.envelope");
}

TEST_CASE("semantic validation")
{
    CHECK(config_error(with_source(R"("sigma": 1)", R"(, "quadrature": {"base_order": 24, "max_order": 24})")).field ==
          "quadrature");
    CHECK(config_error(with_source(R"("sigma": -1)")).field == "source.sigma");
    CHECK(config_error(with_source(R"("envelope": "truncated_gaussian")")).field == "source.cut_radius");
    CHECK(config_error(with_source(R"("sigma": 1)", R"(, "pulse": {"tau": 0})")).field == "pulse.tau");
    CHECK(config_error(R"({"source": {}, "tasks": ["compare"]})").field == "observation.radii");
    CHECK(config_error(with_source(R"("sigma": 1)", R"(, "tasks": ["scaling"])")).field == "scaling.offsets");
}

TEST_CASE("coarse time grid warns for velocity runs")
{
    const std::string coarse = with_source(R"("sigma": 1)", R"(, "pulse": {"tau": 10}, "tasks": ["velocity"])");
    const ParsedConfig p = parse_config(coarse);
    REQUIRE(p.warnings.size() == 1);
    CHECK(p.warnings[0].find("tau/50") != std::string::npos);

    const ParsedConfig q = parse_config(with_source(R"("sigma": 1)", R"(, "pulse": {"tau": 100}, "tasks": ["velocity"])"));
    CHECK(q.warnings.empty());
}

TEST_CASE("radii specs expand")
{
    RadiiSpec g;
    g.kind = RadiiSpec::Kind::Geometric;
    g.range = {10.0, 1000.0, 3};
    const auto v = g.expand();
    CHECK(v[1] == doctest::Approx(100.0));
    CHECK(v[2] == 1000.0);
    RadiiSpec l;
    l.kind = RadiiSpec::Kind::Linear;
    l.range = {1.0, 2.0, 5};
    CHECK(l.expand()[1] == doctest::Approx(1.25));
}

TEST_CASE("config echo round-trips")
{
    std::vector<std::string> texts = {kMinimal,
                                      with_source(R"("polarization": [0.6, 0, 0.8], "amplitude": -2.5)",
                                                  R"(, "analysis": {"window": [1, 2], "feature": "zero_crossing"})")};
    for (const auto& entry : std::filesystem::directory_iterator(RETFIELD_CONFIG_DIR)) {
        if (entry.path().extension() != ".json")
            continue;
        const ParsedConfig p = load_config(entry.path().string());
        texts.push_back(to_json(p.config).dump());
    }
    CHECK(texts.size() >= 5);
    for (const auto& t : texts) {
        const RunConfig a = parse_config(t).config;
        const RunConfig b = parse_config(to_json(a).dump(2)).config;
        CHECK(a == b);
        CHECK(to_json(a).dump() == to_json(b).dump());
    }
}

TEST_CASE("task names")
{
    for (Task t : {Task::Decompose, Task::Compare, Task::FrontCheck, Task::Velocity, Task::Scaling})
        CHECK(task_from_string(to_string(t)) == t);
    CHECK_THROWS_AS(task_from_string("nope"), std::invalid_argument);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}
