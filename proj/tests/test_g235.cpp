#include <cmath>

#include <gtest/gtest.h>

#include "carnot/errors.hpp"
#include "carnot/g235.hpp"
#include "carnot/models.hpp"

namespace carnot {
namespace {

std::vector<std::vector<double>> box_points(int count = 5, std::uint64_t seed = 235) {
  return sample_points(ChartBox(5, {-1.0, 1.0}), count, seed);
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Coordinate matrix of a frame at the base point, one field per column.
Eigen::MatrixXd field_matrix(const LocalFrame& f) {
  Eigen::MatrixXd out(f.size(), f.size());
  for (int a = 0; a < f.size(); ++a) out.col(a) = values(f.field(a));
  return out;
}

// The same distribution and metric with X1, X2 swapped (orientation flip).
FramedManifold swap_horizontal(const FramedManifold& m) {
  std::vector<VectorField> on = m.orthonormal_frame();
  std::swap(on[0], on[1]);
  return FramedManifold(m.coords(), on, 2, {}, m.structure_class());
}

// Residual of projecting the orthonormalized columns of b onto span(a).
double span_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd qa = a.householderQr().householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd qb = b.householderQr().householderQ() * Eigen::MatrixXd::Identity(b.rows(), b.cols());
  return max_abs(qb - qa * (qa.transpose() * qb));
}

std::vector<FramedManifold> perturbed_beds() {
  return {cartan_perturbed(0.1), rotate_horizontal(cartan_perturbed(0.3), "0.2*x2*x2 - 0.5*x4")};
}

double frobenius_curvature(const FrameConnection& nabla) {
  Tensor4 r = curvature(nabla);
  double s = 0.0;
  for (const Jet& x : r.v) s += x.value() * x.value();
  return std::sqrt(s);
}

double frobenius_torsion_defect(const FrameConnection& nabla) {
  Tensor3 t = torsion(nabla), t0 = t_zero(nabla.frame());
  double s = 0.0;
  for (std::size_t i = 0; i < t.v.size(); ++i) {
    double d = t.v[i].value() - t0.v[i].value();
    s += d * d;
  }
  return std::sqrt(s);
}

TEST(Frame235, BracketFrameOfTheCartanGroup) {
  // X1 = d1, X2 = d2 + x1 d3 + x1^2/2 d4 + x1 x2 d5: X3 = d3 + x1 d4 + x2 d5,
  // X4 = d4, X5 = d5.
  FramedManifold m = cartan_group();
  std::vector<double> p = {0.3, -0.2, 0.5, 0.1, -0.4};
  LocalFrame b = bracket_frame_235(m, m.jet_point(p, 3));
  Eigen::MatrixXd want = Eigen::MatrixXd::Identity(5, 5);
  want(2, 1) = p[0];
  want(3, 1) = p[0] * p[0] / 2;
  want(4, 1) = p[0] * p[1];
  want(3, 2) = p[0];
  want(4, 2) = p[1];
  EXPECT_LE(max_abs(field_matrix(b) - want), 1e-12);
}

TEST(Frame235, RejectsOtherGrowthVectors) {
  FramedManifold m = heisenberg_group({1.0, 1.0});
  EXPECT_THROW(bracket_frame_235(m, m.jet_point({0, 0, 0, 0, 0}, 3)), PreconditionError);
}

TEST(Frame235, CanonicalFrameOfTheGroupIsTheBracketFrame) {
  FramedManifold m = cartan_group();
  for (const auto& p : box_points()) {
    JetPoint jp = m.jet_point(p, 5);
    EXPECT_LE(max_abs(field_matrix(canonical_frame_235(m, jp)) - field_matrix(bracket_frame_235(m, jp))), 1e-12);
  }
}

TEST(Frame235, CanonicalFrameIsAdapted) {
  // Z = X3 mod E and Y_j = X_{3+j} mod E^{-2} (the frames are tamed alike).
  for (const FramedManifold& m : perturbed_beds()) {
    for (const auto& p : box_points(3)) {
      JetPoint jp = m.jet_point(p, 5);
      Eigen::MatrixXd comps =
          field_matrix(bracket_frame_235(m, jp)).inverse() * field_matrix(canonical_frame_235(m, jp));
      EXPECT_NEAR(comps(2, 2), 1.0, 1e-10);
      EXPECT_LE(max_abs(comps.block(3, 3, 2, 2) - Eigen::Matrix2d::Identity()), 1e-10);
      EXPECT_LE(max_abs(comps.block(3, 0, 2, 3)), 1e-10);
    }
  }
}

// Z, span{Y1, Y2} and g-bar agree for the frames of m and of m rotated by alpha.
double rotation_defect(const FramedManifold& m, const std::string& alpha, Y2Reading reading) {
  FramedManifold r = rotate_horizontal(m, alpha);
  double defect = 0.0;
  for (const auto& p : box_points(4)) {
    Eigen::MatrixXd f = field_matrix(canonical_frame_235(m, m.jet_point(p, 5), reading));
    Eigen::MatrixXd g = field_matrix(canonical_frame_235(r, r.jet_point(p, 5), reading));
    // Change of frame: block orthogonal with Z fixed.
    Eigen::MatrixXd c = f.inverse() * g;
    Eigen::MatrixXd want_zero = c;
    want_zero.block(0, 0, 2, 2).setZero();
    want_zero(2, 2) = 0.0;
    want_zero.block(3, 3, 2, 2).setZero();
    defect = std::max(defect, max_abs(want_zero));
    defect = std::max(defect, std::abs(c(2, 2) - 1.0));
    defect = std::max(defect, max_abs(c.transpose() * c - Eigen::MatrixXd::Identity(5, 5)));
  }
  return defect;
}

TEST(Frame235, IndependentOfTheHorizontalFrame) {
  for (const FramedManifold& m : perturbed_beds()) {
    EXPECT_LE(rotation_defect(m, "0.7", Y2Reading::corrected), 1e-8);
    EXPECT_LE(rotation_defect(m, "x1", Y2Reading::corrected), 1e-8);
  }
}

TEST(Frame235, PrintedY2IndexIsNotFrameIndependent) {
  // The discriminating oracle for the index reading inside X_i(...) of Y2.
  EXPECT_GT(rotation_defect(cartan_perturbed(0.3), "x1", Y2Reading::printed), 1e-3);
}

TEST(Connection235, CarnotGroupGivesTheLeftInvariantConnection) {
  FramedManifold m = cartan_group();
  Canonical235Model model(m);
  for (const auto& p : box_points(3)) {
    FrameConnection nabla = model.at(p, 1);
    for (int a = 0; a < 5; ++a) {
      for (int b = 0; b < 5; ++b) {
        for (int c = 0; c < 5; ++c) EXPECT_NEAR(nabla(a, b, c).value(), 0.0, 1e-12);
      }
    }
  }
}

TEST(Connection235, CompatibleOnPerturbedInputs) {
  for (const FramedManifold& m : perturbed_beds()) {
    EXPECT_TRUE(all_pass(check_compatible(Canonical235Model(m), box_points(), 1e-8)));
  }
}

TEST(Connection235, TauIsTensorial) {
  // tau_U = -(1/2) (<[U, X_j], X_k> + <[U, X_k], X_j>) satisfies tau_{fZ} = f tau_Z.
  FramedManifold m = cartan_perturbed(0.3);
  std::vector<double> p = {0.2, -0.4, 0.1, 0.6, -0.3};
  JetPoint jp = m.jet_point(p, 7);
  LocalFrame f = canonical_frame_235(m, jp);
  Jet fn = sin(jp.coordinate(0)) + jp.coordinate(3) * jp.coordinate(1);
  for (int u = 2; u < 5; ++u) {
    JetVector e = unit(5, u), fe = fn * unit(5, u);
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        auto tau = [&](const JetVector& v) {
          return -0.5 * (f.bracket(v, unit(5, j))[k].value() + f.bracket(v, unit(5, k))[j].value());
        };
        EXPECT_NEAR(tau(fe), fn.value() * tau(e), 1e-10);
      }
    }
  }
}

TEST(Flatness235, CarnotGroupIsFlatInAnyChart) {
  EXPECT_TRUE(all_pass(flatness_235(cartan_group(), box_points(10))));
  Eigen::MatrixXd a(5, 5);
  a << 1, 0.2, 0, 0, 0, 0, 1, 0, 0, 0, 0.3, 0, 1, 0, 0, 0, 0, 0.1, 1, 0, 0, 0.4, 0, 0, 1;
  Eigen::VectorXd b(5);
  b << 0.5, -0.2, 0.1, 0.3, -0.4;
  EXPECT_TRUE(all_pass(flatness_235(affine_chart(cartan_group(), a, b), box_points())));
  EXPECT_TRUE(all_pass(flatness_235(rotate_horizontal(cartan_group(), "x1"), box_points())));
  EXPECT_TRUE(all_pass(flatness_235(rotate_horizontal(cartan_group(), "0.4"), box_points())));
}

TEST(Flatness235, PerturbedMetricIsNotFlat) {
  Report r = flatness_235(cartan_perturbed(0.1), box_points(10));
  EXPECT_FALSE(all_pass(r));
  EXPECT_GT(std::max(find_check(r, "torsion").residual, find_check(r, "curvature").residual), 1e-3);
}

TEST(Flatness235, CurvatureAndTorsionNormsAreFrameIndependent) {
  FramedManifold m = cartan_perturbed(0.3);
  for (const std::string& alpha : {std::string("0.7"), std::string("x1")}) {
    FramedManifold r = rotate_horizontal(m, alpha);
    for (const auto& p : box_points(3)) {
      FrameConnection a = Canonical235Model(m).at(p, 1), b = Canonical235Model(r).at(p, 1);
      EXPECT_NEAR(frobenius_curvature(a), frobenius_curvature(b), 1e-8);
      EXPECT_NEAR(frobenius_torsion_defect(a), frobenius_torsion_defect(b), 1e-8);
      EXPECT_GT(frobenius_curvature(a), 1e-3);
    }
    EXPECT_FALSE(all_pass(flatness_235(r, box_points(3))));
  }
}

TEST(IntrinsicGrading235, LeftTranslatedLayersOnTheGroup) {
  FramedManifold m = cartan_group();
  for (const auto& p : box_points(3)) {
    IntrinsicGrading235 g = intrinsic_grading_235(m, m.jet_point(p, 4));
    EXPECT_LE(max_abs(values(g.z_prime) - values(unit(5, 2))), 1e-12);
    EXPECT_LE(max_abs(values(g.ell_prime[0]) + values(unit(5, 4))), 1e-12);
    EXPECT_LE(max_abs(values(g.ell_prime[1]) - values(unit(5, 3))), 1e-12);
  }
}

TEST(IntrinsicGrading235, AgreesWithTheCanonicalGrading) {
  for (const FramedManifold& m : perturbed_beds()) {
    for (const auto& p : box_points(3)) {
      JetPoint jp = m.jet_point(p, 5);
      IntrinsicGrading235 g = intrinsic_grading_235(m, jp);
      LocalFrame f = canonical_frame_235(m, jp);
      EXPECT_LE(max_abs(values(g.bracket.vector(g.z_prime)) - values(f.field(2))), 1e-10);
      Eigen::MatrixXd ell(5, 2), y(5, 2);
      for (int i = 0; i < 2; ++i) {
        ell.col(i) = values(g.bracket.vector(g.ell_prime[i]));
        y.col(i) = values(f.field(3 + i));
      }
      EXPECT_LE(span_distance(ell, y), 1e-10);
    }
  }
}

TEST(IntrinsicGrading235, OrientationFlipKeepsTheSubspaces) {
  FramedManifold m = cartan_perturbed(0.3);
  FramedManifold s = swap_horizontal(m);
  for (const auto& p : box_points(3)) {
    IntrinsicGrading235 g = intrinsic_grading_235(m, m.jet_point(p, 4));
    IntrinsicGrading235 h = intrinsic_grading_235(s, s.jet_point(p, 4));
    EXPECT_LE(max_abs(values(g.bracket.vector(g.z_prime)) + values(h.bracket.vector(h.z_prime))), 1e-10);
    Eigen::MatrixXd a(5, 2), b(5, 2);
    for (int i = 0; i < 2; ++i) {
      a.col(i) = values(g.bracket.vector(g.ell_prime[i]));
      b.col(i) = values(h.bracket.vector(h.ell_prime[i]));
    }
    EXPECT_LE(span_distance(a, b), 1e-10);
  }
}

TEST(Lemmas235, QMapIdentitiesAndStructuralIdentitiesHold) {
  std::vector<FramedManifold> beds = perturbed_beds();
  beds.push_back(cartan_group());
  for (const FramedManifold& m : beds) {
    for (const auto& p : box_points(3)) {
      Lemma235Residuals l = lemma_residuals_235(m, p);
      EXPECT_LE(l.q1, 1e-8);
      EXPECT_LE(l.q2, 1e-8);
      EXPECT_LE(l.q2_trace, 1e-8);
      EXPECT_LE(l.q_swap, 1e-8);
      EXPECT_LE(l.q3, 1e-8);
      EXPECT_LE(l.q4, 1e-8);
      EXPECT_LE(l.q5, 1e-8);
      EXPECT_LE(l.intrinsic, 1e-8);
      EXPECT_LE(l.mu_minus_one, 1e-8);
      EXPECT_LE(l.t0_horizontal, 1e-8);
      EXPECT_LE(l.t0_tau, 1e-8);
      EXPECT_LE(l.isometric, 1e-8);
    }
  }
}

TEST(Lemmas235, QMapVanishesOnTheGroup) {
  FramedManifold m = cartan_group();
  for (const auto& p : box_points(3)) {
    std::array<Eigen::Matrix2d, 2> q = q_map_235(m, p);
    EXPECT_LE(max_abs(q[0]), 1e-12);
    EXPECT_LE(max_abs(q[1]), 1e-12);
  }
}

TEST(Morimoto235, GroupDataVanishes) {
  FramedManifold m = cartan_group();
  for (const auto& p : box_points(3)) {
    Morimoto235 mm = morimoto_235(m, m.jet_point(p, Morimoto235Model::order(1)));
    EXPECT_LE(max_abs(values(mm.upsilon)), 1e-12);
    EXPECT_LE(max_abs(mm.a.values()), 1e-12);
    for (const Jet& x : mm.mu) EXPECT_NEAR(x.value(), 0.0, 1e-12);
    // l X1 = -X5 and l X2 = X4.
    Eigen::MatrixXd want = field_matrix(bracket_frame_235(m, m.jet_point(p, 3)));
    want.col(3).swap(want.col(4));
    want.col(3) *= -1.0;
    EXPECT_LE(max_abs(field_matrix(mm.frame) - want), 1e-12);
  }
}

TEST(Morimoto235, SatisfiesTheNormalization) {
  EXPECT_TRUE(all_pass(check_morimoto(Morimoto235Model(cartan_group()), box_points(5), 1e-8)));
  for (const FramedManifold& m : perturbed_beds()) {
    Report r = check_morimoto(Morimoto235Model(m), box_points(5), 1e-6);
    EXPECT_TRUE(all_pass(r)) << find_check(r, "tcond").residual << " " << find_check(r, "rcond").residual;
  }
}

TEST(Morimoto235, MisSetMuFailsTheNormalization) {
  Morimoto235Options o;
  o.mu_offset = 0.1;
  for (const FramedManifold& m : {cartan_group(), cartan_perturbed(0.1)}) {
    Report r = check_morimoto(Morimoto235Model(m, o), box_points(3), 1e-6);
    EXPECT_GT(std::max(find_check(r, "rcond").residual, find_check(r, "tcond").residual), 1e-3);
  }
}

TEST(Morimoto235, PrintedReadingsFailTheNormalization) {
  FramedManifold m = cartan_perturbed(0.5);
  Morimoto235Options w, a;
  w.w_reading = WReading::printed;
  a.a_reading = AReading::display;
  EXPECT_GT(find_check(check_morimoto(Morimoto235Model(m, w), box_points(3)), "tcond").residual, 1e-4);
  EXPECT_GT(find_check(check_morimoto(Morimoto235Model(m, a), box_points(3)), "tcond").residual, 1e-4);
}

TEST(Morimoto235, PerturbedMetricIsNotFlat) {
  Report r = flatness_check(Morimoto235Model(cartan_perturbed(0.1)), box_points(3));
  EXPECT_FALSE(all_pass(r));
  EXPECT_GT(std::max(find_check(r, "torsion").residual, find_check(r, "curvature").residual), 1e-3);
}

TEST(Morimoto235, AgreesWithTheCanonicalConnectionOnFlatInputs) {
  // l X1 = -Y2 and l X2 = Y1; the connections agree under that identification.
  for (const FramedManifold& m : {cartan_group(), rotate_horizontal(cartan_group(), "x1 + 0.3*x2")}) {
    EXPECT_TRUE(all_pass(flatness_check(Morimoto235Model(m), box_points(3))));
    for (const auto& p : box_points(3)) {
      FrameConnection a = Morimoto235Model(m).at(p, 0);
      FrameConnection b = Canonical235Model(m).at(p, 0);
      Eigen::MatrixXd fa = field_matrix(a.frame()), fb = field_matrix(b.frame());
      Eigen::MatrixXd fb_mapped = fb;
      fb_mapped.col(3) = -fb.col(4);
      fb_mapped.col(4) = fb.col(3);
      EXPECT_LE(max_abs(fa - fb_mapped), 1e-10);
      int map[5] = {0, 1, 2, 4, 3};
      double sign[5] = {1, 1, 1, -1, 1};
      for (int u = 0; u < 5; ++u) {
        EXPECT_NEAR(a(u, 0, 1).value(), sign[u] * b(map[u], 0, 1).value(), 1e-10);
      }
    }
  }
}

TEST(Morimoto235, OrientationFlipLeavesTheDataUnchanged) {
  // Swapping X1 and X2 reverses Z' and J; Upsilon, A and the grading do not
  // change, and mu changes sign with D.
  FramedManifold m = cartan_perturbed(0.3);
  FramedManifold s = swap_horizontal(m);
  Eigen::Matrix2d swap;
  swap << 0, 1, 1, 0;
  for (const auto& p : box_points(3)) {
    Morimoto235 a = morimoto_235(m, m.jet_point(p, Morimoto235Model::order(0)));
    Morimoto235 b = morimoto_235(s, s.jet_point(p, Morimoto235Model::order(0)));
    Eigen::Vector2d ua = values(a.upsilon), ub = values(b.upsilon);
    EXPECT_LE(max_abs(ua - swap * ub), 1e-10);
    EXPECT_LE(max_abs(a.a.values() - swap * b.a.values() * swap), 1e-10);
    Eigen::MatrixXd fa = field_matrix(a.frame), fb = field_matrix(b.frame);
    EXPECT_LE(max_abs(fa.col(2) + fb.col(2)), 1e-10);
    EXPECT_LE(span_distance(fa.rightCols(2), fb.rightCols(2)), 1e-10);
    EXPECT_NEAR(a.mu[0].value(), -b.mu[1].value(), 1e-10);
    EXPECT_NEAR(a.mu[1].value(), -b.mu[0].value(), 1e-10);
    EXPECT_NEAR(a.mu[2].value(), b.mu[2].value(), 1e-10);
  }
  EXPECT_TRUE(all_pass(check_morimoto(Morimoto235Model(s), box_points(3), 1e-6)));
}

TEST(Morimoto235, GradingIsIndependentOfTheHorizontalFrame) {
  FramedManifold m = cartan_perturbed(0.3);
  for (const std::string& alpha : {std::string("0.7"), std::string("x1")}) {
    FramedManifold r = rotate_horizontal(m, alpha);
    for (const auto& p : box_points(3)) {
      Morimoto235 a = morimoto_235(m, m.jet_point(p, Morimoto235Model::order(0)));
      Morimoto235 b = morimoto_235(r, r.jet_point(p, Morimoto235Model::order(0)));
      Eigen::MatrixXd fa = field_matrix(a.frame), fb = field_matrix(b.frame);
      EXPECT_LE(max_abs(fa.col(2) - fb.col(2)), 1e-10);
      EXPECT_LE(span_distance(fa.rightCols(2), fb.rightCols(2)), 1e-10);
      Eigen::Vector2d ua = values(a.upsilon), ub = values(b.upsilon);
      Eigen::MatrixXd ha = fa.leftCols(2), hb = fb.leftCols(2);
      EXPECT_LE(max_abs(ha * ua - hb * ub), 1e-10);
    }
  }
}

}  // namespace
}  // namespace carnot
