#include <doctest.h>

#include <memory>

#include <json.hpp>

#include "mmseb/verify.hpp"

using namespace mmseb;

namespace {

/// Gaussian channel whose log-partition is off by ||x||^2 / 2.
class CorruptedPhiChannel : public GaussianChannel {
 public:
  using GaussianChannel::GaussianChannel;
  double log_phi(const Vector& x) const override { return GaussianChannel::log_phi(x) + 0.5 * x.squaredNorm(); }
  double log_cond_pdf(const Vector& x, const Vector& y) const override {
    return ChannelModel::log_cond_pdf(x, y);
  }
};

const SuiteResult& suite(const VerifyReport& report, const std::string& name) {
  for (const auto& s : report.suites)
    if (s.name == name) return s;
  FAIL("missing suite " << name);
  return report.suites.front();
}

VerifyConfig light() {
  VerifyConfig c;
  c.identity_points = 100;
  return c;
}

}  // namespace

TEST_CASE("every suite passes with the default configuration") {
  const auto report = run_verification(VerifyConfig{});
  for (const auto& s : report.suites) {
    INFO(s.name << ": " << s.detail);
    CHECK(s.passed);
    CHECK(s.checks > 0);
  }
  CHECK(report.passed());
  CHECK(report.suites.size() == 7);
}

TEST_CASE("built-in joints pass the identity suites") {
  const auto report = verify_joints(light(), builtin_joints());
  CHECK(report.passed());
  CHECK(report.suites.size() == 4);
}

TEST_CASE("corrupted log-partition is detected") {
  const JointModel joint(std::make_shared<GaussianPrior>(Matrix::Identity(1, 1)),
                         std::make_shared<CorruptedPhiChannel>(1.0, 1));
  const auto report = verify_joints(light(), {joint});
  CHECK_FALSE(report.passed());
  CHECK_FALSE(suite(report, "tweedie_identity").passed);
  CHECK_FALSE(suite(report, "normalization").passed);
  CHECK(suite(report, "tweedie_identity").detail.find("gaussian") != std::string::npos);
}

TEST_CASE("JSON summary") {
  const auto report = verify_joints(light(), builtin_joints());
  const auto doc = nlohmann::json::parse(report.to_json());
  CHECK(doc["seed"] == 42);
  CHECK(doc["passed"] == true);
  REQUIRE(doc["suites"].size() == 4);
  CHECK(doc["suites"][0]["name"] == "tweedie_identity");
  CHECK(doc["suites"][0]["checks"].get<int>() > 0);
}
