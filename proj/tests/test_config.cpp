#include <rfmix/budget.hpp>
#include <rfmix/config.hpp>
#include <rfmix/error.hpp>
#include <rfmix/report.hpp>

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace rfmix;

namespace {

const std::filesystem::path kConfigs = RFMIX_CONFIG_DIR;

std::string error_of(const std::string& text)
{
    try {
        parse_config(text, "t.json");
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

const char* kMinimal = R"({
  "chains": {
    "up": {
      "role": "UPL",
      "blocks": [
        {"type": "mixer", "mu": [1, 0]}
      ]
    }
  }
})";

std::string replace(std::string s, const std::string& from, const std::string& to)
{
    const auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
}

} // namespace

TEST_CASE("shipped example chains reproduce the composite gains")
{
    for (const auto& [file, gain] : {std::pair{"dn_example.json", 31.0}, std::pair{"uph_example.json", 7.0},
                                     std::pair{"upl_example.json", -13.0}}) {
        const auto cfg = load_config(kConfigs / file);
        REQUIRE(cfg.chains.size() == 1);
        CHECK(cascade_gain(cfg.chains[0].spec) == doctest::Approx(gain).epsilon(1e-12));
    }
    const auto dn = load_config(kConfigs / "dn_example.json");
    CHECK(budget_report(dn.chains[0].spec, -60.0).output_dbm == doctest::Approx(-29.0));
}

TEST_CASE("every shipped config loads")
{
    for (const auto& entry : std::filesystem::directory_iterator(kConfigs)) {
        if (entry.path().extension() == ".json") {
            CAPTURE(entry.path().string());
            CHECK_NOTHROW(load_config(entry.path()));
        }
    }
    const auto bench = load_config(kConfigs / "bench_example.json");
    REQUIRE(bench.loopback);
    CHECK(bench.loopback->config.quantize);
    CHECK(bench.loopback->config.noise_on);
    CHECK(bench.loopback_up().chain.role == ChainRole::UPH);
    CHECK(bench.calibration_target().chain.role == ChainRole::UPH);
}

TEST_CASE("errors carry source, line and key path")
{
    CHECK(error_of(kMinimal) == "");
    CHECK(error_of(replace(kMinimal, "\"UPL\"", "\"UP\"")) == "t.json:4: chains.up.role: role must be UPH, UPL or DN");
    CHECK(error_of(replace(kMinimal, "\"mu\"", "\"mux\"")).find("t.json:6: chains.up.blocks[0].mux: unknown key") ==
          0);
    CHECK(error_of(replace(kMinimal, "[1, 0]}", "[1, 0]},\n{\"type\": \"atten\", \"attenuation_db\": -3}"))
              .find("t.json:7: chains.up.blocks[1]") == 0);
    CHECK(error_of(replace(kMinimal, "\"mu\": [1, 0]", "\"mu\": [1]")).find("t.json:6: chains.up.blocks[0].mu") == 0);
    CHECK(error_of(replace(kMinimal, "[1, 0]", "[0.5, 0], \"nu\": [0.5, 0]")).find("t.json:6: chains.up.blocks[0]") ==
          0);

    // Syntax errors keep the parser's own position.
    const auto syn = error_of(replace(kMinimal, "\"UPL\",", "\"UPL\""));
    CHECK(syn.find("t.json: invalid JSON") == 0);
    CHECK(syn.find("line 5") != std::string::npos);
}

TEST_CASE("module invariants are enforced at load")
{
    CHECK(error_of(R"({"chains": {"dn": {"role": "DN", "blocks": []}}})").find("t.json:1: chains.dn.blocks") == 0);
    CHECK(error_of(R"({"chains": {}})").find("no chains") != std::string::npos);
    CHECK(error_of(R"({"chains": {"dn": {"role": "DN", "blocks": [{"type": "lowpass", "cutoff_hz": 300e6,
        "taps": 5}]}}})")
              .find("t.json:1: chains.dn.blocks[0]") == 0);
    const std::string lb = R"({"chains": {"up": {"role": "UPL", "blocks": [{"type": "mixer", "mu": [1, 0]}]},
  "dn": {"role": "DN", "blocks": [{"type": "mixer", "mu": [1, 0]}]}},
  "loopback": {"up": "up", "dn": "dn", "accum_len": 1999}})";
    CHECK(error_of(lb).find("t.json:3: loopback: loopback: accum_len") == 0);
    CHECK(error_of(replace(lb, "\"up\": \"up\"", "\"up\": \"dn\"")).find("t.json:3: loopback.up: chain 'dn'") == 0);
    CHECK(error_of(replace(lb, "\"dn\": \"dn\"", "\"dn\": \"rx\"")).find("no chain named 'rx'") != std::string::npos);
    CHECK(error_of(replace(lb, "\"accum_len\": 1999", "\"bias\": [2.5, 0]")).find("t.json:3: loopback") == 0);
    CHECK(error_of(replace(lb, "\"accum_len\": 1999", "\"lo_freq_hz\": 9e9")).find("lo_freq") != std::string::npos);
    CHECK(error_of(R"({"chains": {"up": {"role": "UPL", "blocks": [{"type": "mixer", "mu": [1, 0]}]}},
  "optimizer": {"max_evals": 3}})")
              .find("t.json:2: optimizer") == 0);
    CHECK(error_of(R"({"chains": {"up": {"role": "UPL", "blocks": [{"type": "mixer", "mu": [1, 0]}]}},
  "colour": 1})")
              .find("t.json:2: colour: unknown key") == 0);
}

TEST_CASE("settings round-trip through the settings file")
{
    const Settings s{{1.25e-3, -7.5e-4}, Predistorter{{1.0, 0.0}, {-0.02, 0.0447}}};
    const std::string text = to_json(s).dump(2);
    const Settings back = parse_settings(text);
    CHECK(back.bias.b_i == s.bias.b_i);
    CHECK(back.bias.b_q == s.bias.b_q);
    CHECK(std::abs(back.predistorter.a - s.predistorter.a) < 1e-15);
    CHECK(std::abs(back.predistorter.b - s.predistorter.b) < 1e-15);
    CHECK(to_json(back).dump(2) == text);

    const auto dir = std::filesystem::temp_directory_path() / "rfmix_config_test";
    std::filesystem::create_directories(dir);
    write_text_file(dir / "s.json", text);
    write_text_file(dir / "c.json", R"({"chains": {"up": {"role": "UPL", "blocks": [{"type": "mixer", "mu": [1, 0]}]},
  "dn": {"role": "DN", "blocks": [{"type": "mixer", "mu": [1, 0]}]}},
  "loopback": {"up": "up", "dn": "dn", "settings_file": "s.json"}})");
    const auto cfg = load_config(dir / "c.json");
    CHECK(cfg.loopback->bias.b_i == s.bias.b_i);
    CHECK(cfg.loopback_up().predistorter.b == back.predistorter.b);
    CHECK_THROWS_AS(load_config(dir / "missing.json"), IoError);
    std::filesystem::remove_all(dir);
}
