#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "otcap/otcap.hpp"
#include "test_util.hpp"

using namespace otcap;
using Catch::Approx;

TEST_CASE("ot_correlation construction") {
  OTCorrelation ot = ot_correlation(1);
  REQUIRE(ot.joint.nu == 4);
  REQUIRE(ot.joint.nv == 4);
  int nonzero = 0;
  for (double c : ot.joint.p)
    if (c > 0) {
      CHECK(c == 0.125);
      ++nonzero;
    }
  CHECK(nonzero == 8);

  CHECK(entropy(ot.joint.row_marginal()) == Approx(2.0).margin(1e-12));
  double h_v_given_u = joint_entropy(ot.joint) - entropy(ot.joint.row_marginal());
  CHECK(h_v_given_u == Approx(1.0).margin(1e-12));
  CHECK(mutual_information(ot.joint) == Approx(1.0).margin(1e-12));

  OTCorrelation ot2 = ot_correlation(2);
  REQUIRE(ot2.joint.nu == 16);
  REQUIRE(ot2.joint.nv == 8);
  double h_v_given_u2 = joint_entropy(ot2.joint) - entropy(ot2.joint.row_marginal());
  CHECK(h_v_given_u2 == Approx(1.0).margin(1e-10));
  CHECK(mutual_information(ot2.joint) == Approx(2.0).margin(1e-10));

  OTCorrelation ot3 = ot_correlation(3);
  REQUIRE(ot3.joint.nu == 64);
  REQUIRE(ot3.joint.nv == 16);
  CHECK(entropy(ot3.joint.row_marginal()) == Approx(6.0).margin(1e-10));
  CHECK(joint_entropy(ot3.joint) - entropy(ot3.joint.row_marginal()) ==
        Approx(1.0).margin(1e-10));
  CHECK(mutual_information(ot3.joint) == Approx(3.0).margin(1e-10));

  CHECK_THROWS_AS(ot_correlation(0), validation_error);
  CHECK_THROWS_AS(ot_correlation(4), validation_error);
}

TEST_CASE("transfer floor residual closed cases") {
  OTCorrelation ot = ot_correlation(1);
  CHECK(ot_alpha_residual(ot, constant_coupling(4, 1)) == Approx(0.0).margin(1e-12));
  CHECK(ot_alpha_residual(ot, copy_coupling(4, 4)) == Approx(0.0).margin(1e-12));
  CHECK(ot_entropy_residual(ot, constant_coupling(4, 1)) == Approx(0.0).margin(1e-12));
  CHECK(ot_entropy_residual(ot, copy_coupling(4, 4)) == Approx(0.0).margin(1e-12));
  CHECK_THROWS_AS(ot_alpha_residual(ot, constant_coupling(3, 2)), validation_error);
}

TEST_CASE("transfer floor residuals on random couplings") {
  for (int m : {1, 2}) {
    OTCorrelation ot = ot_correlation(m);
    std::size_t qcards[] = {ot.joint.nu * ot.joint.nv + 2, 1, 2, 4};
    for (long i = 0; i < 400; ++i) {
      Rng rng(derive_seed(101, static_cast<std::uint64_t>(i)));
      Coupling c = random_coupling(rng, ot.joint.nu, qcards[i % 4]);
      CHECK(ot_alpha_residual(ot, c) >= -1e-9);
      CHECK(ot_entropy_residual(ot, c) >= -1e-9);
    }
  }
}

TEST_CASE("alpha of the transfer correlation equals the string length") {
  OptimizerOptions opts;  // full default restarts
  OTCorrelation ot = ot_correlation(1);
  AlphaResult a = alpha_joint(ot.joint, opts);
  CHECK(a.value >= 1.0 - 1e-6);
  CHECK(a.value <= 1.0 + 1e-9);
}

TEST_CASE("brute force alpha basics") {
  JointDist indep(2, 2, {0.25, 0.25, 0.25, 0.25});
  CHECK(brute_force_alpha(indep, 2, 32) <= 1e-12);
  JointDist eq(2, 2, {0.5, 0.0, 0.0, 0.5});
  CHECK(brute_force_alpha(eq, 2, 32) <= 1e-12);

  // refinement on the dyadic chain can only lower the lattice minimum
  Rng rng(73);
  JointDist j = testutil::random_joint(rng, 2, 2);
  double coarse = brute_force_alpha(j, 2, 64);
  double fine = brute_force_alpha(j, 2, 256);
  CHECK(fine <= coarse + 1e-15);
  CHECK(fine == Approx(coarse).margin(5e-3));

  // cost cap
  JointDist big(4, 4, std::vector<double>(16, 1.0 / 16));
  CHECK_THROWS_AS(brute_force_alpha(big, 2, 256), validation_error);
}

TEST_CASE("optimizer agrees with the lattice oracle on small joints") {
  Rng rng(79);
  OptimizerOptions opts;
  opts.restarts = 8;
  for (int i = 0; i < 10; ++i) {
    JointDist j = testutil::random_joint(rng, 2, 2);
    opts.seed = derive_seed(11, static_cast<std::uint64_t>(i));
    double a = alpha_joint(j, 2, opts).value;
    double oracle = brute_force_alpha(j, 2, 256);
    CHECK(a == Approx(oracle).margin(5e-3));
  }
}

TEST_CASE("subadditivity check with a constant-output channel") {
  // Y carries nothing, so alpha(U;V) collapses to alpha of the base joint
  SubadditivityCase sc;
  sc.base_joint = JointDist(2, 2, {0.4, 0.1, 0.2, 0.3});
  sc.xmap = {0, 1};
  sc.ch = Channel(2, 2, {0, 1, 0, 1});
  OptimizerOptions opts;
  opts.grid_resolution = 64;
  SubadditivityCheck chk = subadditivity_check(sc, 2, opts, 1e-9);
  CHECK(chk.pass);
  CHECK(chk.lhs == Approx(chk.rhs_base).margin(1e-9));
  CHECK(chk.rhs_channel <= 1e-12);
}

TEST_CASE("subadditivity check with an independent base joint") {
  SubadditivityCase sc;
  sc.base_joint = JointDist(2, 2, {0.25, 0.25, 0.25, 0.25});
  sc.xmap = {0, 1};
  sc.ch = zchannel(0.4);
  OptimizerOptions opts;
  opts.grid_resolution = 64;
  SubadditivityCheck chk = subadditivity_check(sc, 2, opts, 1e-2);
  CHECK(chk.pass);
  CHECK(chk.rhs_base <= 1e-9);
  CHECK(chk.lhs <= chk.rhs_channel + 1e-2);
}

TEST_CASE("subadditivity on random binary cases") {
  for (long i = 0; i < 20; ++i) {
    Rng rng(derive_seed(0xbeef, static_cast<std::uint64_t>(i)));
    SubadditivityCase sc = random_binary_case(rng);
    OptimizerOptions opts;
    opts.grid_resolution = 64;
    SubadditivityCheck chk = subadditivity_check(sc, 2, opts, 1e-2);
    CHECK(chk.pass);
  }
}

TEST_CASE("subadditivity check rejects oversized alphabets") {
  SubadditivityCase sc;
  sc.base_joint = JointDist(4, 2, std::vector<double>(8, 0.125));
  sc.xmap = {0, 1, 0, 1};
  sc.ch = zchannel(0.5);
  OptimizerOptions opts;
  CHECK_THROWS_AS(subadditivity_check(sc, 2, opts, 1e-2), validation_error);
}

TEST_CASE("verification suites pass and report") {
  SuiteReport l4 = ot_floor_suite(1, 200, 7);
  CHECK(l4.pass);
  CHECK(l4.trials == 200);
  CHECK(l4.worst_residual >= -1e-9);
  std::string line = format_suite_report(l4);
  CHECK(line.find("ot_floor(m=1)") != std::string::npos);
  CHECK(line.find("PASS") != std::string::npos);

  SuiteReport pd = ot_alpha_value_suite(7);
  CHECK(pd.pass);

  SuiteReport l1 = subadditivity_suite(10, 7, 64, 1e-2);
  CHECK(l1.pass);

  SuiteReport eps = alpha_epsilon_observation(7);
  CHECK(eps.pass);

  // residual capture for the CSV report path
  SuiteReport withres = ot_floor_suite(1, 50, 7, /*keep_residuals=*/true);
  CHECK(withres.residuals.size() == 50);
}
