#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_support.hpp"
#include "vtrecon/errors.hpp"
#include "vtrecon/mesh.hpp"
#include "vtrecon/template_fit.hpp"

using namespace vtrecon;

namespace {

// Points on the ellipsoid {c + rot * (axes .* u) : |u| = 1}.
std::vector<Attractor> ellipsoid_samples(const Vec3& axes, const Eigen::Quaterniond& rot, const Vec3& c,
                                         std::size_t n, std::mt19937_64& rng) {
  std::vector<Attractor> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 u = test::random_unit(rng);
    out.push_back({c + rot * axes.cwiseProduct(u), 0.0, AttractorSource::tactile});
  }
  return out;
}

// Parameters whose surface is exactly that ellipsoid.
EllipsoidParams true_params(const Vec3& axes, const Eigen::Quaterniond& rot, const Vec3& c) {
  EllipsoidParams p;
  p.rotation = rot.conjugate();
  p.translation = c;
  p.scale = axes.cwiseInverse();
  return p;
}

Eigen::Matrix<double, 10, 1> flatten(const LossGradient& g) {
  Eigen::Matrix<double, 10, 1> v;
  v << g.rotation, g.translation, g.scale;
  return v;
}

EllipsoidParams perturbed(const EllipsoidParams& p, int k, double h) {
  EllipsoidParams q = p;
  if (k < 4) {
    Eigen::Vector4d c(q.rotation.w(), q.rotation.x(), q.rotation.y(), q.rotation.z());
    c[k] += h;
    q.rotation = Eigen::Quaterniond(c[0], c[1], c[2], c[3]);  // deliberately not renormalized
  } else if (k < 7) {
    q.translation[k - 4] += h;
  } else {
    q.scale[k - 7] += h;
  }
  return q;
}

}  // namespace

TEST(NormalizePoint, Examples) {
  EllipsoidParams p;
  p.translation = Vec3(1, 2, 3);
  EXPECT_EQ(normalize_point(Vec3(1, 2, 3), p), Vec3::Zero());
  p.translation = Vec3::Zero();
  EXPECT_EQ(normalize_point(Vec3(1, 0, 0), p), Vec3(1, 0, 0));
  p.scale = Vec3(0.5, 1, 1);
  EXPECT_EQ(normalize_point(Vec3(2, 0, 0), p), Vec3(1, 0, 0));
}

TEST(NormalizePoint, MatchesRotationMatrix) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    EllipsoidParams p;
    p.rotation = test::random_rotation(rng);
    p.translation = test::random_in_box(rng, 2.0);
    p.scale = Vec3(0.5, 1.5, 3.0);
    const Vec3 x = test::random_in_box(rng, 3.0);
    const Vec3 want = p.scale.cwiseProduct(p.rotation.toRotationMatrix() * (x - p.translation));
    EXPECT_NEAR((normalize_point(x, p) - want).norm(), 0.0, 1e-12);
    EXPECT_NEAR((p.rotation_matrix() - p.rotation.toRotationMatrix()).norm(), 0.0, 1e-12);
  }
}

TEST(EllipsoidLoss, Examples) {
  EllipsoidParams p;
  const std::vector<Attractor> center = {{Vec3::Zero(), 0.0, AttractorSource::visual}};
  EXPECT_EQ(ellipsoid_loss(center, p), 1.0);

  std::mt19937_64 rng(2);
  const auto pts = ellipsoid_samples(Vec3(1, 2, 3), Eigen::Quaterniond::Identity(), Vec3::Zero(), 200, rng);
  EXPECT_NEAR(ellipsoid_loss(pts, true_params(Vec3(1, 2, 3), Eigen::Quaterniond::Identity(), Vec3::Zero())), 0.0,
              1e-12);
  EXPECT_THROW(ellipsoid_loss(std::span<const Attractor>{}, p), ParameterError);
}

TEST(EllipsoidLoss, ConfidenceWeighting) {
  EllipsoidParams p;
  const std::vector<Attractor> a = {{Vec3::Zero(), 0.25, AttractorSource::visual}};
  EXPECT_EQ(ellipsoid_loss(a, p, true), 0.75);
  EXPECT_EQ(ellipsoid_loss(a, p, false), 1.0);
}

TEST(EllipsoidLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> sc(0.5, 2.0);
  std::uniform_int_distribution<int> count(1, 30);
  for (int inst = 0; inst < 100; ++inst) {
    std::vector<Attractor> pts;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      pts.push_back({test::random_in_box(rng, 1.5), 0.3, AttractorSource::visual});
    }
    EllipsoidParams p;
    p.rotation = test::random_rotation(rng);
    p.translation = test::random_in_box(rng, 0.5);
    p.scale = Vec3(sc(rng), sc(rng), sc(rng));
    const bool weighted = inst % 2 == 1;

    const LossGradient g = ellipsoid_loss_gradient(pts, p, weighted);
    EXPECT_NEAR(g.loss, ellipsoid_loss(pts, p, weighted), 1e-12 * std::max(1.0, g.loss));
    const double h = 1e-6;
    Eigen::Matrix<double, 10, 1> fd;
    for (int k = 0; k < 10; ++k) {
      fd[k] = (ellipsoid_loss(pts, perturbed(p, k, h), weighted) - ellipsoid_loss(pts, perturbed(p, k, -h), weighted)) /
              (2.0 * h);
    }
    const Eigen::Matrix<double, 10, 1> an = flatten(g);
    EXPECT_LT((an - fd).norm() / std::max(fd.norm(), 1e-6), 1e-4) << "instance " << inst;
  }
}

TEST(InitialParams, ModestSphereAtCentroid) {
  const std::vector<Attractor> pts = {{Vec3(1, 0, 0), 0, AttractorSource::visual},
                                      {Vec3(-1, 0, 0), 0, AttractorSource::visual},
                                      {Vec3(0, 2, 0), 0, AttractorSource::visual},
                                      {Vec3(0, -2, 0), 0, AttractorSource::visual}};
  const EllipsoidParams p = initial_params(pts, FitConfig{});
  EXPECT_EQ(p.translation, Vec3::Zero());
  EXPECT_NEAR(p.semi_axes().x(), 1.5, 1e-12);
  EXPECT_EQ(p.semi_axes().x(), p.semi_axes().z());
  const std::vector<Attractor> same = {pts[0], pts[0]};
  EXPECT_THROW(initial_params(same, FitConfig{}), ParameterError);
}

TEST(InitialParams, FrameFollowsPrincipalAxes) {
  std::mt19937_64 rng(12);
  const Eigen::Quaterniond rot = test::random_rotation(rng);
  const auto pts = ellipsoid_samples(Vec3(0.5, 1.0, 3.0), rot, Vec3(2, 0, -1), 400, rng);
  const EllipsoidParams p = initial_params(pts, FitConfig{});
  EXPECT_NEAR(p.rotation.norm(), 1.0, 1e-12);
  const Eigen::Matrix3d r = p.rotation_matrix();
  EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  // rows of R are the model axes in world coordinates
  EXPECT_GT(std::abs(r.row(0).dot(rot * Vec3::UnitX())), 0.99);
  EXPECT_GT(std::abs(r.row(2).dot(rot * Vec3::UnitZ())), 0.99);
}

TEST(FitEllipsoid, UnitSphereOffCenter) {
  std::mt19937_64 rng(4);
  const auto pts = ellipsoid_samples(Vec3::Ones(), Eigen::Quaterniond::Identity(), Vec3(1, 2, 3), 500, rng);
  const FitConfig cfg;
  const FitReport r = fit_ellipsoid(pts, initial_params(pts, cfg), cfg);
  EXPECT_LT((r.params.translation - Vec3(1, 2, 3)).norm(), 0.05);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(r.params.scale[k], 1.0, 0.05);
  }
  EXPECT_LE(r.final_loss, r.initial_loss);
  EXPECT_FALSE(r.underdetermined);
}

TEST(FitEllipsoid, OptimalInitIsStationary) {
  std::mt19937_64 rng(5);
  const Eigen::Quaterniond rot(Eigen::AngleAxisd(0.4, Vec3(1, 1, 0).normalized()));
  const auto pts = ellipsoid_samples(Vec3(1, 2, 3), rot, Vec3(0.5, 0, 0), 200, rng);
  const EllipsoidParams init = true_params(Vec3(1, 2, 3), rot, Vec3(0.5, 0, 0));
  const FitReport r = fit_ellipsoid(pts, init, FitConfig{});
  EXPECT_LT(std::abs(r.final_loss - r.initial_loss), 1e-20);
  EXPECT_NEAR((r.params.translation - init.translation).norm(), 0.0, 1e-9);
  EXPECT_NEAR((r.params.scale - init.scale).norm(), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(r.params.rotation.dot(init.rotation)), 1.0, 1e-9);
}

TEST(FitEllipsoid, RotatedEllipsoid) {
  std::mt19937_64 rng(6);
  const Eigen::Quaterniond rot(Eigen::AngleAxisd(std::numbers::pi / 6.0, Vec3::UnitZ()));
  const auto pts = ellipsoid_samples(Vec3(1, 2, 3), rot, Vec3::Zero(), 200, rng);
  FitConfig cfg;
  cfg.max_iterations = 5000;
  const FitReport r = fit_ellipsoid(pts, initial_params(pts, cfg), cfg);
  EXPECT_LT(r.final_loss, 1e-3);
}

TEST(FitEllipsoid, MonotoneDescent) {
  std::mt19937_64 rng(7);
  const auto pts = ellipsoid_samples(Vec3(0.5, 1, 2), test::random_rotation(rng), Vec3(1, 1, 1), 100, rng);
  FitConfig cfg;
  cfg.max_iterations = 1;
  EllipsoidParams p = initial_params(pts, cfg);
  double prev = ellipsoid_loss(pts, p);
  for (int i = 0; i < 200; ++i) {
    const FitReport r = fit_ellipsoid(pts, p, cfg);
    EXPECT_LE(r.final_loss, prev);
    EXPECT_NEAR(ellipsoid_loss(pts, r.params), r.final_loss, 1e-9 * std::max(1.0, r.final_loss));
    prev = r.final_loss;
    p = r.params;
  }
}

TEST(FitEllipsoid, RotationInvariance) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto pts = ellipsoid_samples(Vec3(1, 1.5, 2), test::random_rotation(rng), test::random_in_box(rng, 1), 150, rng);
    const Eigen::Quaterniond q = test::random_rotation(rng);
    std::vector<Attractor> rotated = pts;
    for (Attractor& a : rotated) {
      a.position = q * a.position;
    }
    const FitConfig cfg;
    const EllipsoidParams init = initial_params(pts, cfg);
    EllipsoidParams init_rot = init;
    init_rot.rotation = init.rotation * q.conjugate();
    init_rot.translation = q * init.translation;
    const FitReport a = fit_ellipsoid(pts, init, cfg);
    const FitReport b = fit_ellipsoid(rotated, init_rot, cfg);
    EXPECT_NEAR(a.final_loss, b.final_loss, 1e-9);
  }
}

TEST(FitEllipsoid, FewAttractorsFlaggedUnderdetermined) {
  const std::vector<Attractor> pts = {{Vec3(1, 0, 0), 0, AttractorSource::visual},
                                      {Vec3(0, 1, 0), 0, AttractorSource::visual},
                                      {Vec3(0, 0, 1), 0, AttractorSource::visual}};
  const FitConfig cfg;
  const FitReport r = fit_ellipsoid(pts, initial_params(pts, cfg), cfg);
  EXPECT_TRUE(r.underdetermined);
  EXPECT_LE(r.final_loss, r.initial_loss);
}

TEST(FitEllipsoid, RejectsBadInput) {
  EXPECT_THROW(fit_ellipsoid(std::span<const Attractor>{}, EllipsoidParams{}, FitConfig{}), ParameterError);
  const std::vector<Attractor> one = {{Vec3(1, 0, 0), 0, AttractorSource::visual}};
  FitConfig bad;
  bad.learning_rate = 0.0;
  EXPECT_THROW(fit_ellipsoid(one, EllipsoidParams{}, bad), ParameterError);
  EllipsoidParams skew;
  skew.rotation = Eigen::Quaterniond(2, 0, 0, 0);
  EXPECT_THROW(fit_ellipsoid(one, skew, FitConfig{}), ParameterError);
  skew = EllipsoidParams{};
  skew.scale = Vec3(1, -1, 1);
  EXPECT_THROW(skew.validate(), ParameterError);
}

TEST(InstantiateTemplate, Examples) {
  const TriangleMesh unit = make_icosphere(1.0, 2);
  EXPECT_EQ(instantiate_template(unit, EllipsoidParams{}).vertices(), unit.vertices());
  EllipsoidParams p;
  p.scale = Vec3(0.5, 1, 1);
  const TriangleMesh m = instantiate_template(unit, p);
  double lo = 0.0, hi = 0.0;
  for (const Vec3& v : m.vertices()) {
    lo = std::min(lo, v.x());
    hi = std::max(hi, v.x());
  }
  EXPECT_NEAR(hi, 2.0, 1e-12);
  EXPECT_NEAR(lo, -2.0, 1e-12);
  EXPECT_EQ(m.faces(), unit.faces());
}

TEST(InstantiateTemplate, RoundTripThroughNormalizePoint) {
  std::mt19937_64 rng(9);
  const TriangleMesh unit = make_icosphere(1.0, 3);
  for (int i = 0; i < 10; ++i) {
    EllipsoidParams p;
    p.rotation = test::random_rotation(rng);
    p.translation = test::random_in_box(rng, 1.0);
    p.scale = Vec3(0.7, 2.0, 5.0);
    const TriangleMesh m = instantiate_template(unit, p);
    for (std::size_t v = 0; v < m.vertex_count(); ++v) {
      EXPECT_NEAR(normalize_point(m.vertex(v), p).norm(), 1.0, 1e-9);
      EXPECT_NEAR((normalize_point(m.vertex(v), p) - unit.vertex(v)).norm(), 0.0, 1e-9);
    }
  }
}

TEST(Params, FormatParseRoundTrip) {
  std::mt19937_64 rng(10);
  EllipsoidParams p;
  p.rotation = test::random_rotation(rng);
  p.translation = Vec3(0.1, -2.0 / 3.0, 1e-9);
  p.scale = Vec3(7.0, 11.0 / 3.0, 1e3);
  const EllipsoidParams back = parse_params(format_params(p));
  EXPECT_EQ(back.rotation.coeffs(), p.rotation.coeffs());
  EXPECT_EQ(back.translation, p.translation);
  EXPECT_EQ(back.scale, p.scale);
  EXPECT_THROW(parse_params("1 0 0 0 1 2 3"), IoError);
  EXPECT_THROW(parse_params("1 0 0 0 0 0 0 1 -1 1"), ParameterError);
}
