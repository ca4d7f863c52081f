#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "lab/errors.hpp"
#include "lab/scene.hpp"
#include "lab/trajectory.hpp"

using namespace lab;
using namespace lab::mech;

TEST_CASE("scene factories validate and round-trip through JSON") {
  for (SystemSpec s : {make_pendulum(), make_ball(), make_cradle()}) {
    CHECK_NOTHROW(s.validate());
    const std::string j1 = s.to_json();
    const SystemSpec back = SystemSpec::from_json(j1);
    CHECK(back.to_json() == j1);
    CHECK(back.kind == s.kind);
    CHECK(back.h == s.h);
  }
  CHECK(scene_from_name("ball") == SceneKind::Ball);
  CHECK_THROWS_AS(scene_from_name("rope"), ConfigError);
}

TEST_CASE("spec validation rejects inconsistent scenes") {
  SystemSpec s = make_cradle();
  s.K = 1;
  CHECK_THROWS_AS(s.validate(), ConfigError);

  s = make_ball();
  s.h = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);

  s = make_ball();
  s.e = 1.5;
  CHECK_THROWS_AS(s.validate(), ConfigError);

  s = make_pendulum();
  s.masses = {-1.0};
  CHECK_THROWS_AS(s.validate(), ConfigError);

  s = make_pendulum();
  s.q0 = {1.0, 2.0};
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("generalized inertia: plain mass for the ball, m*l^2 for arms") {
  SystemSpec ball = make_ball();
  ball.masses = {2.5};
  CHECK(ball.inertia(0) == doctest::Approx(2.5).epsilon(1e-15));

  SystemSpec pend = make_pendulum();
  pend.masses = {2.0};
  pend.length = 3.0;
  CHECK(pend.inertia(0) == doctest::Approx(18.0).epsilon(1e-15));

  const SystemSpec cradle = make_cradle();
  const Tensor M = cradle.inertia_diag();
  const Tensor Mi = cradle.inv_inertia_diag();
  CHECK(M(0, 0) == 1.0);
  CHECK(M(1, 1) == 1.0);
  CHECK(M(0, 1) == 0.0);
  CHECK(Mi(1, 1) == 1.0);
}

TEST_CASE("true force matches -dV/dQ by central differences") {
  const double fd_h = 1e-6;
  for (SystemSpec s : {make_pendulum(), make_ball(), make_cradle()}) {
    Tensor q = Tensor::zeros(s.K, 1);
    for (int k = 0; k < s.K; ++k) q(k, 0) = 0.3 + 0.4 * k;  // generic point
    const Tensor f = true_force(s, q);
    for (int k = 0; k < s.K; ++k) {
      Tensor qp = q, qm = q;
      qp(k, 0) += fd_h;
      qm(k, 0) -= fd_h;
      const double fd = -(potential(s, qp) - potential(s, qm)) / (2 * fd_h);
      CHECK(f(k, 0) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("force and energy hand values") {
  const SystemSpec ball = make_ball();
  // Gravity is constant for the ball; batched queries share it.
  Tensor q = Tensor::from_rows(1, 3, {10.0, 0.0, -2.0});
  const Tensor f = true_force(ball, q);
  for (int b = 0; b < 3; ++b) CHECK(f(0, b) == doctest::Approx(-9.81).epsilon(1e-15));
  // Dropped from rest at 10: all energy potential, m*g*q0 = 98.1.
  CHECK(energy(ball, Tensor::col({10.0}), Tensor::col({0.0})) ==
        doctest::Approx(98.1).epsilon(1e-14));

  const SystemSpec pend = make_pendulum();
  CHECK(true_force(pend, Tensor::col({0.0}))(0, 0) == 0.0);
  CHECK(true_force(pend, Tensor::col({std::numbers::pi / 2}))(0, 0) ==
        doctest::Approx(-9.81).epsilon(1e-14));
  // Hanging straight down with angular speed 2: pure kinetic, (1/2)*1*2^2 = 2.
  CHECK(energy(pend, Tensor::col({0.0}), Tensor::col({2.0})) ==
        doctest::Approx(2.0).epsilon(1e-14));
  // At angle q the height term is m*g*l*(1 - cos q).
  CHECK(potential(pend, Tensor::col({1.0})) ==
        doctest::Approx(9.81 * (1.0 - std::cos(1.0))).epsilon(1e-14));

  const SystemSpec cradle = make_cradle();
  CHECK(kinetic(cradle, Tensor::col({2.0, 0.0})) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(potential(cradle, Tensor::col({0.0, 0.0})) == 0.0);
}

TEST_CASE("gap and contact flags per scene") {
  SystemSpec ball = make_ball();
  CHECK(gap(ball, Tensor::col({0.3}))(0, 0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(gap(ball, Tensor::col({-0.1}))(0, 0) == doctest::Approx(-0.1).epsilon(1e-15));
  ball.floor = 1.0;
  CHECK(gap(ball, Tensor::col({1.0}))(0, 0) == 0.0);
  CHECK(contact_flags(ball, Tensor::col({1.0})) == std::vector<int>{1});
  CHECK(contact_flags(ball, Tensor::col({1.0 + 1e-12})) == std::vector<int>{0});

  const SystemSpec cradle = make_cradle();
  const Tensor d = gap(cradle, Tensor::col({0.2, 0.5}));
  CHECK(d(0, 0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(d(1, 0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(contact_flags(cradle, Tensor::col({0.5, 0.2})) == std::vector<int>{1, 1});
  CHECK(contact_flags(cradle, Tensor::col({0.0, 0.0})) == std::vector<int>{1, 1});

  const SystemSpec pend = make_pendulum();
  CHECK(gap(pend, Tensor::col({1.0}))(0, 0) == std::numeric_limits<double>::infinity());
  CHECK(contact_flags(pend, Tensor::col({1.0})) == std::vector<int>{0});

  // Batched gaps evaluate each column independently.
  SystemSpec b2 = make_ball();
  Tensor qb = Tensor::from_rows(1, 2, {0.5, -0.5});
  const Tensor db = gap(b2, qb);
  CHECK(db(0, 0) == 0.5);
  CHECK(db(0, 1) == -0.5);
}

TEST_CASE("contact normals and incidence matrices") {
  const SystemSpec ball = make_ball();
  const Tensor Lb = build_L(ball);
  CHECK(Lb.rows == 1);
  CHECK(Lb(0, 0) == 1.0);

  const SystemSpec cradle = make_cradle();
  const Tensor Lc = build_L(cradle);
  CHECK(Lc(0, 0) == 1.0);
  CHECK(Lc(1, 0) == -1.0);

  CHECK(build_L(make_pendulum()).rows == 0);

  const Tensor Ab1 = build_A(ball, {1});
  CHECK(Ab1(0, 0) == -1.0);
  CHECK(build_A(ball, {0})(0, 0) == 0.0);

  const Tensor Ac = build_A(cradle, {1, 1});
  CHECK(Ac(0, 0) == -1.0);
  CHECK(Ac(0, 1) == 1.0);
  CHECK(Ac(1, 0) == 1.0);
  CHECK(Ac(1, 1) == -1.0);
  CHECK(sum_all(Ac) == 0.0);  // mutual pair: rows and columns balance
  CHECK(sum_all(build_A(cradle, {0, 0})) == 0.0);
  CHECK_THROWS_AS(build_A(cradle, {1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(build_A(ball, {1, 1}), std::invalid_argument);
}

TEST_CASE("effective mass: reciprocal of the nonzero entries of A M^-1 A^T") {
  SystemSpec ball = make_ball();
  ball.masses = {2.0};
  const Tensor Hb = build_H(ball, build_A(ball, {1}));
  CHECK(Hb(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  // No contact: A = 0, so H stays zero.
  CHECK(max_abs(build_H(ball, build_A(ball, {0}))) == 0.0);

  const SystemSpec cradle = make_cradle();  // equal unit inertias
  const Tensor Hc = build_H(cradle, build_A(cradle, {1, 1}));
  CHECK(Hc(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(Hc(0, 1) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(Hc(1, 0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(Hc(1, 1) == doctest::Approx(0.5).epsilon(1e-15));

  // Unequal masses: the magnitude is the reduced inertia m1*m2/(m1+m2).
  SystemSpec uneven = make_cradle();
  uneven.masses = {1.0, 3.0};
  const Tensor Hu = build_H(uneven, build_A(uneven, {1, 1}));
  CHECK(Hu(0, 0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(Hu(1, 0) == doctest::Approx(-0.75).epsilon(1e-14));
}

TEST_CASE("trajectory JSON and CSV round-trips") {
  Trajectory t;
  t.h = 0.02;
  t.sigma = 0.1;
  t.seed = 42;
  for (int i = 0; i < 3; ++i) {
    StaggeredState s;
    s.Q = Tensor::col({0.1 * i, -0.2 * i});
    s.Qdot = Tensor::col({1.0 + i, 2.0 - i});
    t.states.push_back(std::move(s));
    t.contacts.push_back({i % 2, 1});
  }

  const std::string j = trajectory_to_json(t);
  const Trajectory back = trajectory_from_json(j);
  CHECK(back.n_points() == 3);
  CHECK(back.h == t.h);
  CHECK(back.sigma == t.sigma);
  CHECK(back.seed == t.seed);
  for (int i = 0; i < 3; ++i) {
    CHECK(back.states[i].Q(0, 0) == t.states[i].Q(0, 0));
    CHECK(back.states[i].Qdot(1, 0) == t.states[i].Qdot(1, 0));
    CHECK(back.contacts[i] == t.contacts[i]);
  }
  CHECK(trajectory_to_json(back) == j);

  const Tensor P = pack_positions(t);
  CHECK(P.rows == 2);
  CHECK(P.cols == 3);
  CHECK(P(1, 2) == doctest::Approx(-0.4).epsilon(1e-15));
  const Tensor C = pack_contacts(t);
  CHECK(C(0, 1) == 1.0);
  CHECK(C(0, 0) == 0.0);

  const std::string csv = trajectory_to_csv(t);
  CHECK(csv.substr(0, csv.find('\n')) == "t,q_1,q_2,v_1,v_2,c_1,c_2");
  // Header plus one row per point.
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 4);

  // Mismatched arrays are rejected.
  CHECK_THROWS_AS(trajectory_from_json("{\"h\":0.1,\"sigma\":0,\"seed\":0,"
                                       "\"Q\":[[1]],\"Qdot\":[],\"c\":[[0]]}"),
                  ConfigError);
}
