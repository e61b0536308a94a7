#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace satcl;

namespace {

const Criterion kAbs{CriterionKind::PerSampleAbs, Rat(1, 2)};

EmpiricalTask scalar(std::size_t id, std::vector<std::pair<Rat, Rat>> xy) {
  std::vector<Atom> atoms;
  for (auto& [x, y] : xy) atoms.push_back({{x}, {y}});
  return EmpiricalTask(id, std::move(atoms));
}

Rat hinge(const Vec& theta, const EmpiricalTask& task, const Criterion& c) {
  return RegAlgorithm::objective(theta, theta, Rat(0), task, c);
}

std::vector<EmpiricalTask> planted(std::uint64_t seed, std::size_t T = 5, std::size_t n = 4) {
  StreamSpec s;
  s.seed = seed;
  s.T = T;
  s.n_per_task = n;
  return generate(s);
}

}  // namespace

TEST(Exact, OverlappingIntervals) {
  const Criterion c{CriterionKind::PerSampleAbs, Rat(1)};
  ExactAlgorithm exact;
  auto s = exact.step(exact.init(1), scalar(1, {{Rat(1), Rat(1)}}), c);
  EXPECT_EQ(s.theta, Vec{Rat(1)});
  s = exact.step(s, scalar(2, {{Rat(1), Rat(2)}}), c);
  EXPECT_EQ(s.theta, Vec{Rat(3, 2)});
  EXPECT_EQ(s.memory.size(), 4u);
  EXPECT_EQ(s.t, 2u);
}

TEST(Exact, DisjointIntervalsAreInfeasibleAtTwo) {
  CLState s = exact_step(ExactAlgorithm{}.init(1), scalar(1, {{Rat(1), Rat(1, 2)}}), kAbs);
  try {
    exact_step(s, scalar(2, {{Rat(1), Rat(5, 2)}}), kAbs);
    FAIL() << "expected Infeasible";
  } catch (const Infeasible& e) {
    EXPECT_EQ(e.t(), 2u);
  }
}

TEST(Exact, SingletonIntersectionIsRecoveredExactly) {
  for (const Rat& a : {Rat(0), Rat(3, 7), Rat(-5, 4)}) {
    const Rat eps(1, 2);
    const Criterion c{CriterionKind::PerSampleAbs, eps};
    auto s = exact_step(ExactAlgorithm{}.init(1), scalar(1, {{Rat(1), a}}), c);
    s = exact_step(s, scalar(2, {{Rat(1), a + 2 * eps}}), c);
    EXPECT_EQ(s.theta, Vec{a + eps});
    const auto& region = std::get<ExactMemory>(s.memory.payload).constraints;
    EXPECT_EQ(chebyshev_ball(region).radius, Rat(0));
  }
}

TEST(Exact, InvariantsOnPlantedStreams) {
  Rng rng(77);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto stream = planted(seed);
    ExactAlgorithm exact;
    CLState s = exact.init(2);
    ConvexRegion truth = ConvexRegion::whole(2);
    std::size_t expected_size = 0;
    for (const auto& task : stream) {
      s = exact.step(s, task, kAbs);
      const auto region = sat_region(kAbs, task);
      truth = intersect(truth, region);
      expected_size += region.constraint_count();
      const auto& mem = std::get<ExactMemory>(s.memory.payload).constraints;
      EXPECT_TRUE(contains(mem, s.theta));
      EXPECT_EQ(s.memory.size(), expected_size);
      for (int k = 0; k < 100; ++k) {
        const Vec p = rng.grid_vec(2, Rat(-2), Rat(2), 4);
        EXPECT_EQ(contains(mem, p), contains(truth, p));
      }
    }
  }
}

TEST(Exact, HandlesBallRegions) {
  StreamSpec spec;
  spec.kind = StreamKind::BallMeans;
  spec.seed = 4;
  spec.T = 4;
  const Criterion c{CriterionKind::MeanSqEuclid, Rat(1, 2)};
  const auto stream = generate(spec);
  const auto trace = run(ExactAlgorithm{}, stream, c);
  ASSERT_TRUE(trace.complete());
  EXPECT_TRUE(check_optimality(trace));
}

TEST(Exact, EmptyBallIntersectionIsInfeasible) {
  const Criterion c{CriterionKind::MeanSqEuclid, Rat(1)};
  const std::vector<EmpiricalTask> stream{EmpiricalTask(1, {{{}, {Rat(0)}}}), EmpiricalTask(2, {{{}, {Rat(5)}}})};
  const auto trace = run(ExactAlgorithm{}, stream, c);
  ASSERT_TRUE(trace.infeasible_at.has_value());
  EXPECT_EQ(*trace.infeasible_at, 2u);
}

TEST(Replay, FirstStepIsMinimaxFit) {
  // Residuals of θ on atoms (1, 0), (1, 2): minimax at θ = 1 with value 1.
  ReplayAlgorithm replay;
  const auto s = replay.step(replay.init(1), scalar(1, {{Rat(1), Rat(0)}, {Rat(1), Rat(2)}}), kAbs);
  EXPECT_EQ(s.theta, Vec{Rat(1)});
}

TEST(Replay, KeepsLargestResidualAtom) {
  // The kept atom is recomputed from the fitted θ; ties go to the lower index.
  ReplayAlgorithm one(1);
  const EmpiricalTask t = scalar(1, {{Rat(1), Rat(0)}, {Rat(2), Rat(3)}});
  const auto s = one.step(one.init(1), t, kAbs);
  const auto& m = std::get<ReplayMemory>(s.memory.payload);
  ASSERT_EQ(m.coreset.size(), 1u);
  std::vector<Rat> res;
  for (const auto& a : t.atoms()) res.push_back(abs(residual(a, s.theta)));
  const std::size_t expect = res[1] > res[0] ? 1 : 0;
  EXPECT_EQ(m.coreset[0], t.atoms()[expect]);
}

TEST(Replay, SelectsMaxResidualWithOppositeSigns) {
  ReplayAlgorithm one(1);
  const EmpiricalTask t = scalar(1, {{Rat(1), Rat(-1, 4)}, {Rat(1), Rat(3, 2)}});
  // Under θ = 0: residuals −1/4 and 3/2.
  EXPECT_EQ(one.select({Rat(0)}, t, kAbs), std::vector<std::size_t>{1});
  // Under θ = 2: residuals −9/4 and −1/2.
  EXPECT_EQ(one.select({Rat(2)}, t, kAbs), std::vector<std::size_t>{0});
  // Tie goes to the lower index.
  EXPECT_EQ(one.select({Rat(5, 8)}, t, kAbs), std::vector<std::size_t>{0});
}

TEST(Replay, FullMemoryIsOptimalOnPlantedStreams) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto stream = planted(seed);
    EXPECT_TRUE(check_optimality(run(ExactAlgorithm{}, stream, kAbs)));
    EXPECT_TRUE(check_optimality(run(ReplayAlgorithm{}, stream, kAbs))) << "seed " << seed;
  }
}

TEST(Replay, CoresetIsBoundedSubsetOfSeenAtoms) {
  const auto stream = planted(9, 5, 4);
  ReplayAlgorithm two(2);
  CLState s = two.init(2);
  std::vector<Atom> seen;
  for (const auto& task : stream) {
    s = two.step(s, task, kAbs);
    seen.insert(seen.end(), task.atoms().begin(), task.atoms().end());
    const auto& m = std::get<ReplayMemory>(s.memory.payload);
    EXPECT_LE(m.coreset.size(), 2 * s.t);
    for (const auto& a : m.coreset) EXPECT_NE(std::find(seen.begin(), seen.end(), a), seen.end());
  }
}

TEST(Replay, NamesAndValidation) {
  EXPECT_EQ(ReplayAlgorithm{}.name(), "replay:k=inf");
  EXPECT_EQ(ReplayAlgorithm{3}.name(), "replay:k=3");
  EXPECT_THROW(ReplayAlgorithm{0}, InvalidInput);
}

TEST(Replay, MeanSqUsesCoresetMean) {
  const Criterion c{CriterionKind::MeanSqEuclid, Rat(1)};
  ReplayAlgorithm replay;
  const auto s = replay.step(replay.init(2), EmpiricalTask(1, {{{}, {Rat(0), Rat(0)}}, {{}, {Rat(2), Rat(1)}}}), c);
  EXPECT_EQ(s.theta, (Vec{Rat(1), Rat(1, 2)}));
}

TEST(Reg, SmallPenaltyReachesZeroHinge) {
  StreamSpec spec;
  spec.seed = 5;
  spec.T = 1;
  const auto task = generate(spec).front();
  RegAlgorithm reg(Rat(1, 1000));
  const CLState far{{Rat(5), Rat(-3)}, Memory{RegMemory{{Rat(5), Rat(-3)}, Rat(1, 1000)}}, 0};
  const auto s = reg.step(far, task, kAbs);
  EXPECT_LT(hinge(s.theta, task, kAbs), Rat(1, 50));
}

TEST(Reg, HugePenaltyStaysAtAnchor) {
  StreamSpec spec;
  spec.seed = 6;
  spec.T = 1;
  const auto task = generate(spec).front();
  RegAlgorithm reg(Rat(1000000));
  const Vec anchor{Rat(3), Rat(-2)};
  const CLState start{anchor, Memory{RegMemory{anchor, Rat(1000000)}}, 0};
  const auto s = reg.step(start, task, kAbs);
  EXPECT_LT(squared_distance(s.theta, anchor), Rat(1, 10000));
}

TEST(Reg, AdversarialInstanceLeavesFirstSat) {
  StreamSpec spec;
  spec.kind = StreamKind::AdversarialShift;
  spec.T = 2;
  const auto stream = generate(spec);
  RegAlgorithm reg(Rat(10));
  auto s = reg.step(reg.init(2), stream[0], kAbs);
  EXPECT_EQ(s.theta, (Vec{Rat(0), Rat(0)}));
  s = reg.step(s, stream[1], kAbs);
  EXPECT_FALSE(evaluate_criterion(kAbs, s.theta, stream[0]));
  EXPECT_NEAR(s.theta[0].get_d(), 1.2475, 0.05);
  EXPECT_NEAR(s.theta[1].get_d(), 1.2475, 0.05);
  // A point of Sat₁ ∩ Sat₂ exists on the 1/8 grid.
  const auto both = intersect(sat_region(kAbs, stream[0]), sat_region(kAbs, stream[1]));
  EXPECT_TRUE(oracle::grid_hits(both, oracle::grid_2d()));
}

TEST(Reg, MemoryIsConstantAndValidation) {
  const auto stream = planted(2);
  const auto trace = run(RegAlgorithm(Rat(1)), stream, kAbs);
  for (const auto& rec : trace.records) EXPECT_EQ(rec.memory_size, 1u);
  EXPECT_THROW(RegAlgorithm(Rat(-1)), InvalidInput);
  RegAlgorithm reg(Rat(1));
  EXPECT_THROW(reg.step(reg.init(1), EmpiricalTask(1, {{{}, {Rat(0)}}}), {CriterionKind::MeanSqEuclid, Rat(1)}),
               InvalidInput);
  EXPECT_EQ(reg.name(), "reg:lambda=1");
}

TEST(Reg, ObjectiveIsExact) {
  const EmpiricalTask t = scalar(1, {{Rat(1), Rat(2)}});
  // |2 − θ| − 1/2 at θ = 1/2 is 1; penalty 3·(1/2)² = 3/4.
  EXPECT_EQ(RegAlgorithm::objective({Rat(1, 2)}, {Rat(0)}, Rat(3), t, kAbs), Rat(7, 4));
}

TEST(Factory, ParsesAlgorithmNames) {
  EXPECT_EQ(make_algorithm("exact")->name(), "exact");
  EXPECT_EQ(make_algorithm("replay")->name(), "replay:k=inf");
  EXPECT_EQ(make_algorithm("replay:k=full")->name(), "replay:k=inf");
  EXPECT_EQ(make_algorithm("replay:k=4")->name(), "replay:k=4");
  EXPECT_EQ(make_algorithm("reg:lambda=1/2")->name(), "reg:lambda=1/2");
  for (const char* bad : {"sgd", "replay:k=", "replay:k=-1", "reg:lambda=x", "replay:k=0"})
    EXPECT_THROW(make_algorithm(bad), InvalidInput) << bad;
}

TEST(Factory, StepHelpersMatchClasses) {
  const auto task = planted(1).front();
  EXPECT_EQ(exact_step(ExactAlgorithm{}.init(2), task, kAbs), ExactAlgorithm{}.step(ExactAlgorithm{}.init(2), task, kAbs));
  EXPECT_EQ(replay_step(ReplayAlgorithm{}.init(2), task, kAbs), ReplayAlgorithm{}.step(ReplayAlgorithm{}.init(2), task, kAbs));
}
