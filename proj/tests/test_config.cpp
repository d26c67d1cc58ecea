#include <gtest/gtest.h>

#include <functional>
#include <optional>

#include "assist/config.hpp"
#include "assist/error.hpp"
#include "assist/session.hpp"

using namespace assist;

namespace {

std::optional<ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST(KeyValueConfig, ParsesCommentsAndWhitespace) {
  const auto c = KeyValueConfig::parse(
      "# header\n"
      "\n"
      "  camera.fx =  500   # pixels\n"
      "arm.joint1.axis = 0 0 1\r\n"
      "name = two words\n");
  EXPECT_EQ(c.get_double("camera.fx"), 500.0);
  EXPECT_EQ(c.get_vector("arm.joint1.axis", 3), (std::vector<double>{0, 0, 1}));
  EXPECT_EQ(c.get_string("name"), "two words");
  EXPECT_EQ(c.values().size(), 3u);
}

TEST(KeyValueConfig, Fallbacks) {
  const auto c = KeyValueConfig::parse("a = 1\nflag = yes\n");
  EXPECT_EQ(c.get_int("a", 5), 1);
  EXPECT_EQ(c.get_int("b", 5), 5);
  EXPECT_EQ(c.get_double("b", 2.5), 2.5);
  EXPECT_TRUE(c.get_bool("flag", false));
  EXPECT_FALSE(c.get_bool("other", false));
}

TEST(KeyValueConfig, Errors) {
  EXPECT_EQ(code_of([] { KeyValueConfig::parse("a = 1\na = 2\n"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { KeyValueConfig::parse("no equals sign\n"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { KeyValueConfig::parse(" = 3\n"); }), ErrorCode::ConfigError);
  const auto c = KeyValueConfig::parse("x = 1.5m\nv = 1 2\nb = maybe\ni = 2.5\n");
  EXPECT_EQ(code_of([&] { c.get_double("missing"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { c.get_double("x"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { c.get_vector("v", 3); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { c.get_bool("b", true); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { c.get_int("i"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { KeyValueConfig::load("/nonexistent/file.cfg"); }), ErrorCode::IoError);
}

TEST(ExperimentConfig, ShippedFilesMatchDefaults) {
  const auto loaded = ExperimentConfig::load(ASSIST_SOURCE_DIR "/config/experiment.cfg",
                                             ASSIST_SOURCE_DIR "/config/arm.cfg",
                                             ASSIST_SOURCE_DIR "/config/zero_noise.cfg");
  const ExperimentConfig defaults;
  EXPECT_EQ(loaded.seed, defaults.seed);
  EXPECT_EQ(loaded.displacement, defaults.displacement);
  EXPECT_EQ(loaded.place_margin, defaults.place_margin);
  EXPECT_TRUE(loaded.camera_eye.isApprox(defaults.camera_eye));
  EXPECT_EQ(loaded.noise.jitter_px, 0.0);
  for (ObjectClass c : kAllClasses) {
    const TrialSpec a = make_trial(loaded, c, 0), b = make_trial(defaults, c, 0);
    EXPECT_EQ(a.seed, b.seed);
    EXPECT_TRUE(a.target.isApprox(b.target));
  }
}

TEST(ExperimentConfig, NoiseFileOverlay) {
  const auto cfg =
      ExperimentConfig::load(ASSIST_SOURCE_DIR "/config/experiment.cfg", {}, ASSIST_SOURCE_DIR "/config/noise.cfg");
  EXPECT_EQ(cfg.noise.jitter_px, 1.5);
  EXPECT_EQ(cfg.noise.miss_rate, 0.04);
  EXPECT_EQ(cfg.noise.confusion_rate, 0.04);
  EXPECT_EQ(cfg.fiducial_noise_px, 0.1);
}

TEST(ExperimentConfig, OverlayCannotRedefineKeys) {
  EXPECT_EQ(code_of([] {
              ExperimentConfig::load(ASSIST_SOURCE_DIR "/config/noise.cfg", {}, ASSIST_SOURCE_DIR "/config/zero_noise.cfg");
            }),
            ErrorCode::ConfigError);
}
