#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "phhinf/models.hpp"
#include "phhinf/serialize.hpp"
#include "phhinf/sys.hpp"

namespace phhinf {
namespace {

using sys::PHSystem;
using sys::StateSpace;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIo;
}

GTEST_TEST(StateSpace, ValidatesShapes) {
  Matrix A = -Matrix::Identity(3, 3);
  EXPECT_EQ(code_of([&] { StateSpace(A, Matrix::Ones(2, 1), Matrix::Ones(1, 3)); }),
            ErrorCode::kDimensionMismatch);
  EXPECT_EQ(code_of([&] { StateSpace(A, Matrix::Ones(3, 4), Matrix::Ones(1, 3)); }),
            ErrorCode::kDimensionMismatch);
  Matrix bad = A;
  bad(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_EQ(code_of([&] { StateSpace(bad, Matrix::Ones(3, 1), Matrix::Ones(1, 3)); }),
            ErrorCode::kNonFinite);
}

GTEST_TEST(PHSystem, ValidatesStructure) {
  Matrix I = Matrix::Identity(2, 2), B = Matrix::Ones(2, 1);
  Matrix notskew(2, 2);
  notskew << 0, 1, 1, 0;
  EXPECT_EQ(code_of([&] { PHSystem(notskew, I, I, B); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { PHSystem(Matrix::Zero(2, 2), -I, I, B); }), ErrorCode::kIndefiniteMatrix);
  EXPECT_EQ(code_of([&] { PHSystem(Matrix::Zero(2, 2), I, -I, B); }), ErrorCode::kIndefiniteMatrix);
}

GTEST_TEST(PHSystem, RoundTripThroughStateSpace) {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    PHSystem ph = oracle::random_ph(rng, 6, 2);
    StateSpace ss = sys::ph_to_ss(ph);
    PHSystem back = sys::ss_to_ph(ss, ph.Q());
    EXPECT_LT((back.J() - ph.J()).norm(), 1e-10 * ph.J().norm());
    EXPECT_LT((back.R() - ph.R()).norm(), 1e-10 * std::max(1.0, ph.R().norm()));
    EXPECT_LT((back.A() - ss.A()).norm(), 1e-10 * ss.A().norm());
  }
}

GTEST_TEST(PHSystem, SsToPhRejectsBadHamiltonian) {
  PHSystem dc = models::dc_motor();
  StateSpace ss = sys::ph_to_ss(dc);
  EXPECT_EQ(code_of([&] { sys::ss_to_ph(ss, 2.0 * dc.Q()); }), ErrorCode::kGramMismatch);
  // right output map but wrong dissipation: a large second diagonal entry
  Matrix X = dc.Q();
  X(1, 1) = 50.0;
  EXPECT_EQ(code_of([&] { sys::ss_to_ph(ss, X); }), ErrorCode::kDissipationViolated);
}

GTEST_TEST(PHSystem, PassiveOnRandomInstances) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    PHSystem ph = oracle::random_ph(rng, 5, 2);
    EXPECT_GE(oracle::passivity_margin(sys::ph_to_ss(ph), 100), -1e-10);
  }
}

GTEST_TEST(Minimality, Benchmarks) {
  EXPECT_TRUE(sys::is_minimal(sys::ph_to_ss(models::dc_motor())).minimal);
  EXPECT_TRUE(sys::is_minimal(sys::ph_to_ss(models::msd_chain({5}))).minimal);
  PHSystem dc = models::dc_motor();
  Matrix J = Matrix::Zero(4, 4), R = Matrix::Zero(4, 4), Q = Matrix::Zero(4, 4), B(4, 1);
  J.topLeftCorner(2, 2) = J.bottomRightCorner(2, 2) = dc.J();
  R.topLeftCorner(2, 2) = R.bottomRightCorner(2, 2) = dc.R();
  Q.topLeftCorner(2, 2) = Q.bottomRightCorner(2, 2) = dc.Q();
  B << dc.B(), dc.B();
  sys::Minimality mm = sys::is_minimal(sys::ph_to_ss(PHSystem(J, R, Q, B)));
  EXPECT_FALSE(mm.minimal);
  EXPECT_EQ(mm.controllable_rank, 2);
}

GTEST_TEST(Stability, Checks) {
  EXPECT_TRUE(sys::is_asymptotically_stable(models::dc_motor().A()));
  EXPECT_FALSE(sys::is_asymptotically_stable(Matrix::Identity(2, 2)));
}

GTEST_TEST(TransferEval, DcGainAndSingularity) {
  StateSpace ss = sys::ph_to_ss(models::dc_motor());
  CMatrix G0 = sys::transfer_eval(ss, 0.0);
  Matrix ref = ss.C() * (-ss.A()).inverse() * ss.B();
  EXPECT_NEAR(G0(0, 0).real(), ref(0, 0), 1e-14);
  EXPECT_NEAR(G0(0, 0).imag(), 0.0, 1e-14);
  StateSpace one(-Matrix::Identity(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1));
  EXPECT_EQ(code_of([&] { sys::transfer_eval(one, Complex(-1.0, 0.0)); }),
            ErrorCode::kSingularResolvent);
}

GTEST_TEST(Difference, OfItselfVanishes) {
  StateSpace ss = sys::ph_to_ss(models::msd_chain({3}));
  StateSpace d = sys::difference(ss, ss);
  EXPECT_EQ(d.n(), 12);
  EXPECT_LT(sys::transfer_eval(d, Complex(0.0, 0.7)).norm(), 1e-14);
}

GTEST_TEST(Serialize, RoundTrips) {
  auto dir = std::filesystem::temp_directory_path() / "phhinf_sys_test";
  std::filesystem::remove_all(dir);
  PHSystem ph = models::msd_chain({3});
  sys::save((dir / "ph").string(), ph);
  PHSystem back = sys::load_ph_system((dir / "ph").string());
  EXPECT_EQ(back.J(), ph.J());
  EXPECT_EQ(back.R(), ph.R());
  EXPECT_EQ(back.Q(), ph.Q());
  EXPECT_EQ(back.B(), ph.B());
  StateSpace ss = sys::ph_to_ss(ph);
  sys::save((dir / "ss").string(), ss);
  StateSpace ss2 = sys::load_state_space((dir / "ss").string());
  EXPECT_EQ(ss2.A(), ss.A());
  EXPECT_EQ(ss2.C(), ss.C());
  EXPECT_TRUE(std::holds_alternative<PHSystem>(sys::load_system((dir / "ph").string())));
  EXPECT_TRUE(std::holds_alternative<StateSpace>(sys::load_system((dir / "ss").string())));
  sys::Json m = sys::load_manifest((dir / "ph").string());
  EXPECT_EQ(m["kind"], "ph_system");
  EXPECT_EQ(m["blocks"]["Q"]["file"], "Q.mtx");
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace phhinf
