#include <doctest.h>

#include "job.hpp"

using namespace topothermo;
using namespace topothermo::cli;
using nlohmann::json;

namespace {

std::vector<OptionSpec> specs() {
  auto s = model_options();
  const auto c = common_options();
  s.insert(s.end(), c.begin(), c.end());
  s.push_back({"v", ValueKind::real, ""});
  s.push_back({"eps0", ValueKind::reals, ""});
  s.push_back({"strict", ValueKind::flag, ""});
  return s;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::io_error;
}

}  // namespace

TEST_SUITE("job") {

TEST_CASE("flags override config keys") {
  const json config{{"model", "harmonic"}, {"N", 4}, {"v", 1.0}, {"param", {{"J", 1.0}}}};
  const auto job = merge_job(config, specs(), {{"v", {"2.5"}}, {"param", {"h=0.5"}}, {"eps0", {"0.2", "0.1"}}});
  CHECK(job.at("v") == 2.5);
  CHECK(job.at("N") == 4);
  CHECK(job.at("param") == json{{"J", 1.0}, {"h", 0.5}});
  CHECK(job.at("eps0") == json{0.2, 0.1});
  const auto flagged = merge_job(json::object(), specs(), {{"strict", {"true"}}});
  CHECK(flagged.at("strict") == true);
}

TEST_CASE("unknown keys and wrong types are config errors") {
  CHECK(code_of([] { merge_job(json{{"bogus", 1}}, specs(), {}); }) == Errc::config_error);
  CHECK(code_of([] { merge_job(json{{"v", "high"}}, specs(), {}); }) == Errc::config_error);
  CHECK(code_of([] { merge_job(json{{"N", 2.5}}, specs(), {}); }) == Errc::config_error);
  CHECK(code_of([] { merge_job(json::array(), specs(), {}); }) == Errc::config_error);
  CHECK(code_of([] { merge_job(json::object(), specs(), {{"v", {"1.0x"}}}); }) == Errc::config_error);
  CHECK(code_of([] { merge_job(json::object(), specs(), {{"param", {"novalue"}}}); }) == Errc::config_error);
  CHECK(code_of([] { load_json_file("/nonexistent/config.json"); }) == Errc::io_error);
  // a full model object is accepted under "model"
  CHECK_NOTHROW(merge_job(json{{"model", {{"kind", "harmonic"}, {"N", 2}}}}, specs(), {}));
}

TEST_CASE("hash ignores the output path and tracks everything else") {
  const json a{{"model", "harmonic"}, {"N", 4}, {"seed", 1}, {"output", "a.json"}};
  json b = a;
  b["output"] = "b.json";
  CHECK(config_hash(a) == config_hash(b));
  b["seed"] = 2;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("exit codes") {
  CHECK(exit_code(Errc::config_error) == kExitUsage);
  CHECK(exit_code(Errc::io_error) == kExitUsage);
  CHECK(exit_code(Errc::syntax_error) == kExitInput);
  CHECK(exit_code(Errc::domain_error) == kExitInput);
  CHECK(exit_code(Errc::no_convergence) == kExitNumerical);
  CHECK(exit_code(Errc::box_too_small) == kExitNumerical);
}

TEST_CASE("model construction") {
  const auto m = build_model(json{{"model", "double_well"}, {"N", 3}, {"box", {-2.0, 2.0}}});
  CHECK(m.dimension() == 3);
  CHECK(m.box_volume() == doctest::Approx(64.0));
  const auto d = build_model(json{{"model", "dsl"}, {"N", 2}, {"dsl", "a*q[0]^2 + q[1]^2"}, {"param", {{"a", 2.0}}}});
  CHECK(d.value(std::vector<double>{1.0, 1.0}) == doctest::Approx(3.0));
  const auto fam = build_model(json{{"model", "harmonic"}, {"N", 2}}, 8);
  CHECK(fam.dimension() == 8);
  const auto tilted = build_model(json{{"model", "harmonic"}, {"N", 2}, {"perturb", {0.1, 0.0}}});
  CHECK(tilted.kind() == ModelKind::perturbed);
  CHECK(code_of([] { build_model(json{{"N", 2}}); }) == Errc::config_error);
  CHECK(code_of([] { build_model(json{{"model", "harmonic"}, {"N", 2}, {"perturb", {0.1}}}); }) == Errc::config_error);
}

}
