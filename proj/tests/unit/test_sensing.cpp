#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "vtrecon/errors.hpp"
#include "vtrecon/mesh.hpp"
#include "vtrecon/mesh_query.hpp"
#include "vtrecon/sensing.hpp"

using namespace vtrecon;

TEST(AttractorUncertainty, Examples) {
  const SensorModel model;  // u_max 0.5
  EXPECT_EQ(attractor_uncertainty({5.0, 0.0, 0.0}, model), 0.0);
  EXPECT_EQ(attractor_uncertainty({0.0, 0.1, 0.0}, model), 0.5);
  EXPECT_EQ(attractor_uncertainty({1.0, 1.0, 1.0}, model), 0.25);
}

TEST(AttractorUncertainty, NoContactThrows) {
  EXPECT_THROW(attractor_uncertainty({0.0, 0.0, 0.0}, SensorModel{}), NoContactError);
}

TEST(AttractorUncertainty, BoundedByUMax) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> f(0.0, 20.0);
  std::uniform_real_distribution<double> t(-2.0, 2.0);
  std::uniform_real_distribution<double> um(0.01, 1.0);
  for (int i = 0; i < 1000; ++i) {
    SensorModel model;
    model.u_max = um(rng);
    const ContactReading r{f(rng), t(rng), t(rng)};
    const double u = attractor_uncertainty(r, model);
    EXPECT_GE(u, 0.0);
    EXPECT_LE(u, model.u_max);
  }
}

TEST(AttractorUncertainty, Monotonicity) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> f(0.01, 20.0);
  std::uniform_real_distribution<double> t(-2.0, 2.0);
  std::uniform_real_distribution<double> grow(1.0, 3.0);
  const SensorModel model;
  for (int i = 0; i < 1000; ++i) {
    const ContactReading r{f(rng), t(rng), t(rng)};
    const double k = grow(rng);
    // more torque at the same force
    const ContactReading more_torque{r.force_z, k * r.torque_x, k * r.torque_y};
    EXPECT_GE(attractor_uncertainty(more_torque, model), attractor_uncertainty(r, model));
    // more force at the same torque
    const ContactReading more_force{k * r.force_z, r.torque_x, r.torque_y};
    EXPECT_LE(attractor_uncertainty(more_force, model), attractor_uncertainty(r, model));
  }
}

TEST(SimulateReading, CenteredContact) {
  const SensorModel model;
  const auto r = simulate_reading(Eigen::Vector2d::Zero(), model);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->force_z, model.nominal_force);
  EXPECT_EQ(r->torque_x, 0.0);
  EXPECT_EQ(r->torque_y, 0.0);
  EXPECT_EQ(attractor_uncertainty(*r, model), 0.0);
}

TEST(SimulateReading, PadEdgeClosedForm) {
  const SensorModel model;
  const double f = model.nominal_force;
  const double rad = model.pad_radius;
  const auto r = simulate_reading(Eigen::Vector2d(rad, 0.0), model);
  ASSERT_TRUE(r.has_value());
  EXPECT_NEAR(attractor_uncertainty(*r, model), model.u_max * (f * rad) / (2.0 * f + f * rad), 1e-15);
}

TEST(SimulateReading, OutsidePadMisses) {
  const SensorModel model;
  EXPECT_FALSE(simulate_reading(Eigen::Vector2d(model.pad_radius * 1.0001, 0.0), model).has_value());
  EXPECT_FALSE(simulate_reading(Eigen::Vector2d(0.01, 0.01), model).has_value());
}

TEST(SimulateReading, UncertaintyGrowsAlongARay) {
  const SensorModel model;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int ray = 0; ray < 50; ++ray) {
    const double a = angle(rng);
    const Eigen::Vector2d dir(std::cos(a), std::sin(a));
    double prev = -1.0;
    for (int k = 0; k <= 20; ++k) {
      const auto r = simulate_reading(dir * (0.999 * model.pad_radius * k / 20.0), model);
      ASSERT_TRUE(r.has_value());
      const double u = attractor_uncertainty(*r, model);
      EXPECT_GE(u, prev);
      prev = u;
    }
  }
}

TEST(VisualPrior, VisibleSideOnly) {
  const TriangleMesh sphere = make_icosphere(1.0, 3);
  VisualPriorConfig cfg;
  cfg.cone_half_angle = 0.3;
  cfg.position_noise_sigma = 0.0;
  for (const Attractor& a : sample_visual_prior(sphere, cfg)) {
    EXPECT_GT(a.position.x(), 0.0);
    EXPECT_GE(a.position.x(), std::cos(0.3) - 0.01);
  }
}

TEST(VisualPrior, CountAndUncertainty) {
  const TriangleMesh sphere = make_icosphere(1.0, 3);
  VisualPriorConfig cfg;
  cfg.n_points = 50;
  const auto prior = sample_visual_prior(sphere, cfg);
  ASSERT_EQ(prior.size(), 50u);
  for (const Attractor& a : prior) {
    EXPECT_EQ(a.uncertainty, 0.4);
    EXPECT_EQ(a.source, AttractorSource::visual);
  }
}

TEST(VisualPrior, NoiselessPointsLieOnTheSurface) {
  const TriangleMesh sphere = make_icosphere(1.0, 3);
  VisualPriorConfig cfg;
  cfg.position_noise_sigma = 0.0;
  const SurfaceIndex index(sphere);
  for (const Attractor& a : sample_visual_prior(sphere, cfg)) {
    EXPECT_LT(index.project(a.position).distance, 1e-9);
  }
}

TEST(VisualPrior, ReproducibleForFixedSeed) {
  const TriangleMesh sphere = make_icosphere(1.0, 3);
  VisualPriorConfig cfg;
  cfg.seed = 17;
  const auto a = sample_visual_prior(sphere, cfg);
  const auto b = sample_visual_prior(sphere, cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].position, b[i].position);
  }
  cfg.seed = 18;
  EXPECT_NE(sample_visual_prior(sphere, cfg)[0].position, a[0].position);
}

TEST(VisualPrior, NoiseHasConfiguredScale) {
  const TriangleMesh sphere = make_icosphere(1.0, 4);
  VisualPriorConfig cfg;
  cfg.n_points = 2000;
  cfg.position_noise_sigma = 0.01;
  const SurfaceIndex index(sphere);
  double sq = 0.0;
  for (const Attractor& a : sample_visual_prior(sphere, cfg)) {
    const double d = index.project(a.position).distance;
    sq += d * d;
  }
  // only the normal component of isotropic noise moves a point off a plane
  EXPECT_NEAR(std::sqrt(sq / 2000.0), 0.01, 0.001);
}

TEST(VisualPrior, RejectsBadConfig) {
  const TriangleMesh sphere = make_icosphere(1.0, 2);
  VisualPriorConfig cfg;
  cfg.cone_half_angle = 2.0;
  EXPECT_THROW(sample_visual_prior(sphere, cfg), ParameterError);
  cfg = VisualPriorConfig{};
  cfg.n_points = 0;
  EXPECT_THROW(sample_visual_prior(sphere, cfg), ParameterError);
}

TEST(VisualPrior, NothingVisibleIsAConfigError) {
  // a single triangle facing away from the viewer
  const TriangleMesh back({{0, 0, 0}, {0, 0, 1}, {0, 1, 0}}, {{0, 1, 2}});
  VisualPriorConfig cfg;
  cfg.view_direction = Vec3(-1, 0, 0);
  cfg.n_points = 5;
  EXPECT_THROW(sample_visual_prior(back, cfg), ConfigError);
}

TEST(Attractors, TextRoundTrip) {
  const std::vector<Attractor> in = {{Vec3(0.1, -0.2, 1.0 / 3.0), 0.4, AttractorSource::visual},
                                     {Vec3(1e-7, 2.5, -3.0), 0.125, AttractorSource::tactile}};
  std::stringstream s;
  write_attractors(s, in);
  const auto out = read_attractors(s);
  ASSERT_EQ(out.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(out[i].position, in[i].position);
    EXPECT_EQ(out[i].uncertainty, in[i].uncertainty);
    EXPECT_EQ(out[i].source, in[i].source);
  }
}

TEST(Attractors, MalformedLinesAreIoErrors) {
  std::istringstream bad1("0 0 0 0.4\n");
  EXPECT_THROW(read_attractors(bad1), IoError);
  std::istringstream bad2("0 0 0 1.5 visual\n");
  EXPECT_THROW(read_attractors(bad2), IoError);
  std::istringstream bad3("0 0 0 0.5 sonar\n");
  EXPECT_THROW(read_attractors(bad3), IoError);
}
