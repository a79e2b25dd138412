#include <random>

#include <gtest/gtest.h>

#include "dkit/errors.hpp"
#include "dkit/solver.hpp"
#include "support/planted.hpp"

namespace dkit {
namespace {

using R = Rational;
using MR = Matrix<Rational>;

InputSignal<R> constant_input(long k0, std::size_t count, const MR& value) {
  return InputSignal<R>{k0, std::vector<MR>(count, value)};
}

struct DiagFixture {
  DescriptorSystem<R> sys{MR{{1, 0}, {0, 0}}, MR{{2, 0}, {0, 1}}, MR{{1}, {1}}, MR::identity(2)};
  WeierstrassDecomposition<R> w = decompose(sys.pencil());
  TransformedInput<R> tin = transform_input(w, sys.B());
  InputSignal<R> u = constant_input(0, 4, MR{{1}});
};

TEST(ComputeDk, DiagonalExample) {
  DiagFixture d;
  const auto dk = compute_dk(d.w, d.tin, d.u, 2);
  EXPECT_EQ(dk.forward, (MR{{3}}));
  EXPECT_EQ(dk.backward, (MR{{-1}}));
  EXPECT_EQ(compute_dk(d.w, d.tin, d.u, 0).stacked(), (MR{{0}, {-1}}));
}

TEST(ComputeDk, ZeroInputGivesZero) {
  DiagFixture d;
  const auto zero = constant_input(0, 6, MR{{0}});
  for (long k = 0; k < 5; ++k) EXPECT_TRUE(compute_dk(d.w, d.tin, zero, k).stacked().is_zero());
}

TEST(ComputeDk, NoInfinitePartHasEmptyBottom) {
  const DescriptorSystem<R> sys(MR::identity(1), MR{{3}}, MR{{2}}, MR{{1}});
  const auto w = decompose(sys.pencil());
  const auto dk = compute_dk(w, transform_input(w, sys.B()), constant_input(0, 3, MR{{1}}), 3);
  EXPECT_EQ(dk.backward.rows(), 0u);
  // 3^2*2 + 3*2 + 2
  EXPECT_EQ(dk.forward, (MR{{26}}));
}

TEST(Consistency, DiagonalExamples) {
  DiagFixture d;
  const auto ok = check_consistency(d.sys, d.w, d.tin, d.u, MR{{5}, {-1}});
  EXPECT_TRUE(ok.consistent);
  ASSERT_TRUE(ok.zp0);
  EXPECT_EQ(*ok.zp0, (MR{{5}}));
  EXPECT_TRUE(ok.residual.is_zero());

  const auto bad = check_consistency(d.sys, d.w, d.tin, d.u, MR{{5}, {7}});
  EXPECT_FALSE(bad.consistent);
  EXPECT_FALSE(bad.zp0);
  EXPECT_EQ(bad.residual, (MR{{0}, {8}}));
}

TEST(Consistency, NoInfinitePartAcceptsEverything) {
  std::mt19937_64 rng(1);
  const DescriptorSystem<R> sys(MR{{2, 1}, {1, 1}}, MR{{6, -1}, {3, -1}}, MR{{1}, {0}}, MR{{1, 1}});
  const auto w = decompose(sys.pencil());
  ASSERT_EQ(w.q, 0u);
  const auto tin = transform_input(w, sys.B());
  for (int i = 0; i < 10; ++i) {
    const MR y0 = testing::random_int_matrix(2, 1, rng, 9);
    EXPECT_TRUE(check_consistency(sys, w, tin, testing::random_input(1, 0, 3, rng), y0).consistent);
  }
}

TEST(Solve, DiagonalTrajectory) {
  DiagFixture d;
  const auto traj = solve(d.sys, d.w, d.tin, d.u, MR{{5}, {-1}}, 3);
  ASSERT_EQ(traj.states.size(), 4u);
  const long expected[] = {5, 11, 23, 47};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(traj.states[k], (MR{{expected[k]}, {-1}}));
    EXPECT_EQ(traj.outputs[k], traj.states[k]);
  }
  const auto res = residual_oracle(d.sys, d.u, traj, MR{{5}, {-1}});
  EXPECT_TRUE(res.exact_zero);
  EXPECT_EQ(res.max_step_residual, 0.0);
}

TEST(Solve, ErrorsForInconsistentStateAndShortHorizon) {
  DiagFixture d;
  EXPECT_THROW(solve(d.sys, d.w, d.tin, d.u, MR{{5}, {7}}, 3), InconsistentInitialCondition);
  EXPECT_THROW(solve(d.sys, d.w, d.tin, d.u, MR{{5}, {-1}}, 4), InputHorizonTooShort);

  const DescriptorSystem<R> nil(MR{{1, 0, 0}, {0, 0, 1}, {0, 0, 0}}, MR::identity(3), MR{{0}, {0}, {1}},
                                MR{{1, 0, 0}});
  const auto w = decompose(nil.pencil());
  const auto tin = transform_input(w, nil.B());
  const auto four = constant_input(0, 4, MR{{1}});
  EXPECT_THROW(solve(nil, w, tin, four, MR{{2}, {-1}, {-1}}, 3), InputHorizonTooShort);
  EXPECT_NO_THROW(solve(nil, w, tin, constant_input(0, 5, MR{{1}}), MR{{2}, {-1}, {-1}}, 3));
}

TEST(ResidualOracle, CorruptedTrajectoryIsDetected) {
  DiagFixture d;
  auto traj = solve(d.sys, d.w, d.tin, d.u, MR{{5}, {-1}}, 3);
  traj.states[2](0, 0) += 1;
  const auto res = residual_oracle(d.sys, d.u, traj, MR{{5}, {-1}});
  EXPECT_FALSE(res.exact_zero);
  EXPECT_GT(res.max_step_residual, 0.0);
}

TEST(Solve, ScalarRecursion) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const R a(testing::uniform(rng, -3, 3));
    const R b(testing::uniform(rng, -3, 3));
    const DescriptorSystem<R> sys(MR{{1}}, MR{{a}}, MR{{b}}, MR{{1}});
    const auto w = decompose(sys.pencil());
    const auto u = testing::random_input(1, 0, 10, rng);
    const R y0(testing::uniform(rng, -5, 5));
    const auto traj = solve(sys, w, transform_input(w, sys.B()), u, MR{{y0}}, 10);
    R y = y0;
    for (long k = 0; k <= 10; ++k) {
      EXPECT_EQ(traj.states[static_cast<std::size_t>(k)](0, 0), y);
      y = a * y + b * u.at(k)(0, 0);
    }
  }
}

TEST(Solve, PureNilpotentTracksInput) {
  const DescriptorSystem<R> sys(MR{{0}}, MR{{1}}, MR{{3}}, MR{{1}});
  const auto w = decompose(sys.pencil());
  ASSERT_EQ(w.q_star, 1u);
  const auto tin = transform_input(w, sys.B());
  std::mt19937_64 rng(4);
  const auto u = testing::random_input(1, 0, 6, rng);
  const MR y0 = MR{{-3 * u.at(0)(0, 0)}};
  const auto traj = solve(sys, w, tin, u, y0, 6);
  for (long k = 0; k <= 6; ++k) EXPECT_EQ(traj.zq[static_cast<std::size_t>(k)], -(tin.Bq * u.at(k)));
}

TEST(Solve, NonzeroInitialTime) {
  DescriptorSystem<R> sys(MR{{1, 0}, {0, 0}}, MR{{2, 0}, {0, 1}}, MR{{1}, {1}}, MR::identity(2));
  const auto w = decompose(sys.pencil());
  const auto tin = transform_input(w, sys.B());
  const auto u = constant_input(-3, 4, MR{{1}});
  const auto traj = solve(sys, w, tin, u, MR{{5}, {-1}}, 0);
  EXPECT_EQ(traj.k0, -3);
  EXPECT_EQ(traj.last_index(), 0);
  EXPECT_EQ(traj.states.back(), (MR{{47}, {-1}}));
  EXPECT_TRUE(residual_oracle(sys, u, traj, MR{{5}, {-1}}).exact_zero);
}

TEST(SolverProperties, RandomSystemsSolveExactlyAndClosedFormMatches) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 80; ++trial) {
    const auto planted = testing::random_planted_system(rng, trial % 2 == 0);
    const DescriptorSystem<R> sys(planted.F, planted.G, planted.B, planted.C);
    const auto w = decompose(sys.pencil());
    const auto tin = transform_input(w, sys.B());
    const long k0 = testing::uniform(rng, -2, 2);
    const long horizon = k0 + testing::uniform(rng, 1, 12);
    const auto u = testing::random_input(sys.inputs(), k0, horizon + static_cast<long>(w.q_star), rng);
    const MR z = testing::random_int_matrix(w.p, 1, rng, 4);
    const MR y0 = w.Qp() * z + w.Q * compute_dk(w, tin, u, k0).stacked();
    const auto traj = solve(sys, w, tin, u, y0, horizon, Tolerances{});
    EXPECT_TRUE(residual_oracle(sys, u, traj, y0).exact_zero);
    for (long k = k0; k <= horizon; ++k)
      EXPECT_EQ(traj.zp[static_cast<std::size_t>(k - k0)], finite_state_closed_form(w, tin, u, z, k));
    const auto again = solve(sys, w, tin, u, y0, horizon);
    EXPECT_EQ(again.states, traj.states);
  }
}

TEST(SolverProperties, ConsistencyMatchesStackedSolvability) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 80; ++trial) {
    const auto planted = testing::random_planted_system(rng, true);
    const DescriptorSystem<R> sys(planted.F, planted.G, planted.B, planted.C);
    const auto w = decompose(sys.pencil());
    const auto tin = transform_input(w, sys.B());
    const auto u = testing::random_input(sys.inputs(), 0, 2 * static_cast<long>(w.q_star) + 2, rng);
    const MR y0 = testing::random_int_matrix(sys.n(), 1, rng, 3);
    const bool consistent = check_consistency(sys, w, tin, u, y0).consistent;
    EXPECT_EQ(consistent, testing::stacked_steps_solvable(sys, u, y0, std::max<std::size_t>(w.q_star, 1)));
  }
}

// For n = 2 and a short horizon, enumerate every trajectory with states on a
// small rational grid; only the computed one has zero residual.
TEST(SolverProperties, BruteForceUniqueness) {
  std::vector<R> grid;
  for (long num = -16; num <= 16; ++num) grid.push_back(R(num) / R(2));

  DiagFixture d;
  const MR y0{{R(1, 2)}, {-1}};
  const auto traj = solve(d.sys, d.w, d.tin, d.u, y0, 2);
  int matches = 0;
  for (const auto& a1 : grid)
    for (const auto& b1 : grid) {
      const MR y1{{a1}, {b1}};
      if (!(d.sys.F() * y1 - d.sys.G() * y0 - d.sys.B() * d.u.at(0)).is_zero()) continue;
      for (const auto& a2 : grid)
        for (const auto& b2 : grid) {
          const MR y2{{a2}, {b2}};
          if (!(d.sys.F() * y2 - d.sys.G() * y1 - d.sys.B() * d.u.at(1)).is_zero()) continue;
          // The algebraic row also binds Y_2 through the step 2 -> 3.
          if (!(y2(1, 0) == -d.u.at(2)(0, 0))) continue;
          ++matches;
          EXPECT_EQ(y1, traj.states[1]);
          EXPECT_EQ(y2, traj.states[2]);
        }
    }
  EXPECT_EQ(matches, 1);
}

TEST(SolveFloat, DiagonalTrajectory) {
  using MC = Matrix<Complex>;
  const DescriptorSystem<Complex> sys(MC{{1, 0}, {0, 0}}, MC{{2, 0}, {0, 1}}, MC{{1}, {1}}, MC::identity(2));
  const auto w = decompose(sys.pencil());
  const auto tin = transform_input(w, sys.B());
  const InputSignal<Complex> u{0, std::vector<MC>(4, MC{{1}})};
  const auto traj = solve(sys, w, tin, u, MC{{5}, {-1}}, 3);
  EXPECT_NEAR(std::abs(traj.states[3](0, 0) - Complex(47, 0)), 0.0, 1e-9);
  EXPECT_LE(residual_oracle(sys, u, traj, MC{{5}, {-1}}).max_step_residual, 1e-9);
  EXPECT_THROW(solve(sys, w, tin, u, MC{{5}, {7}}, 3), InconsistentInitialCondition);
}

}  // namespace
}  // namespace dkit
