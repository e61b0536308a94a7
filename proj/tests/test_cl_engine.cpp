#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"

using namespace satcl;

namespace {

const Criterion kAbs{CriterionKind::PerSampleAbs, Rat(1, 2)};

// d = 1 task whose Sat under ε = 1/2 is [center − 1/2, center + 1/2].
EmpiricalTask interval_task(std::size_t id, const Rat& center) { return EmpiricalTask(id, {{{Rat(1)}, {center}}}); }

std::vector<EmpiricalTask> planted(std::uint64_t seed, std::size_t T = 5) {
  StreamSpec s;
  s.seed = seed;
  s.T = T;
  return generate(s);
}

// Records the order in which the two maps are called.
class OrderProbe final : public CLAlgorithm {
 public:
  explicit OrderProbe(std::vector<std::string>& log) : log_(log) {}
  std::string name() const override { return "probe"; }
  Vec update_theta(const CLState& prev, const EmpiricalTask&, const Criterion&) const override {
    log_.push_back("theta");
    Vec v = prev.theta;
    v[0] += 1;
    return v;
  }
  Memory update_memory(const Vec& theta, const CLState& prev, const EmpiricalTask&, const Criterion&) const override {
    log_.push_back("memory");
    // Memory sees the new θ, not the previous one.
    EXPECT_EQ(theta[0], prev.theta[0] + 1);
    return Memory{RegMemory{theta, Rat(0)}};
  }

 private:
  std::vector<std::string>& log_;
};

}  // namespace

TEST(Engine, StepComputesThetaBeforeMemory) {
  std::vector<std::string> log;
  OrderProbe probe(log);
  const auto trace = run(probe, {interval_task(1, Rat(0)), interval_task(2, Rat(0))}, kAbs);
  EXPECT_EQ(log, (std::vector<std::string>{"theta", "memory", "theta", "memory"}));
  EXPECT_EQ(trace.records.back().theta, Vec{Rat(2)});
}

TEST(Engine, SingleTaskExactRun) {
  const auto trace = run(ExactAlgorithm{}, {interval_task(1, Rat(1))}, kAbs);
  ASSERT_EQ(trace.records.size(), 1u);
  EXPECT_EQ(trace.records[0].satisfied, std::vector<bool>{true});
  EXPECT_TRUE(check_optimality(trace));
}

TEST(Engine, PlantedStreamsAreOptimalForExact) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto trace = run(ExactAlgorithm{}, planted(seed), kAbs);
    ASSERT_TRUE(trace.complete());
    for (const auto& rec : trace.records) {
      EXPECT_EQ(rec.satisfied.size(), rec.t);
      EXPECT_EQ(forgetting_count(rec), 0u);
    }
    EXPECT_TRUE(check_optimality(trace)) << "seed " << seed;
  }
}

TEST(Engine, AdversarialRegularizerForgets) {
  StreamSpec s;
  s.kind = StreamKind::AdversarialShift;
  s.T = 2;
  const auto trace = run(RegAlgorithm(Rat(10)), generate(s), kAbs);
  ASSERT_EQ(trace.records.size(), 2u);
  EXPECT_FALSE(trace.records[1].satisfied[0]);
  EXPECT_FALSE(check_optimality(trace));
}

TEST(Engine, CheckOptimalityOnHandBuiltTraces) {
  Trace ones;
  ones.records.push_back({1, {Rat(0)}, 0, {true}, 0});
  ones.records.push_back({2, {Rat(0)}, 0, {true, true}, 0});
  EXPECT_TRUE(check_optimality(ones));
  Trace zero = ones;
  zero.records[1].satisfied[0] = false;
  EXPECT_FALSE(check_optimality(zero));
  Trace cut = ones;
  cut.infeasible_at = 3;
  EXPECT_FALSE(check_optimality(cut));
}

TEST(Engine, InfeasibleStepTruncatesTrace) {
  // Sat₁ = [0, 1], Sat₂ = [2, 3].
  const auto trace = run(ExactAlgorithm{}, {interval_task(1, Rat(1, 2)), interval_task(2, Rat(5, 2))}, kAbs);
  EXPECT_EQ(trace.records.size(), 1u);
  ASSERT_TRUE(trace.infeasible_at.has_value());
  EXPECT_EQ(*trace.infeasible_at, 2u);
  std::ostringstream os;
  write_trace_csv(os, trace, false);
  EXPECT_EQ(os.str(), "t,theta,memory_size,satisfied,wall_time_us\n1,1/2,2,1,0\n2,INFEASIBLE,,,\n");
}

TEST(Engine, RunIsDeterministic) {
  const auto stream = planted(3);
  for (const auto& name : {"exact", "replay:k=1", "reg:lambda=1"}) {
    const auto alg = make_algorithm(name);
    const auto a = run(*alg, stream, kAbs), b = run(*alg, stream, kAbs);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      EXPECT_EQ(a.records[i].theta, b.records[i].theta);
      EXPECT_EQ(a.records[i].satisfied, b.records[i].satisfied);
    }
    std::ostringstream x, y;
    write_trace_csv(x, a, false);
    write_trace_csv(y, b, false);
    EXPECT_EQ(x.str(), y.str());
  }
}

TEST(Engine, SatisfactionBitsMatchRecomputation) {
  const auto stream = planted(21);
  for (const auto& name : {"exact", "replay:k=1", "reg:lambda=10"}) {
    const auto trace = run(*make_algorithm(name), stream, kAbs);
    for (const auto& rec : trace.records) {
      for (std::size_t i = 0; i < rec.t; ++i) EXPECT_EQ(rec.satisfied[i], evaluate_criterion(kAbs, rec.theta, stream[i]));
      EXPECT_EQ(forgetting_count(rec), oracle::recount_forgetting(rec));
    }
  }
}

TEST(Engine, RejectsEmptyOrMixedStreams) {
  EXPECT_THROW(run(ExactAlgorithm{}, {}, kAbs), InvalidInput);
  EXPECT_THROW(run(ExactAlgorithm{}, {interval_task(1, Rat(0)), EmpiricalTask(2, {{{Rat(1), Rat(1)}, {Rat(0)}}})}, kAbs),
               InvalidInput);
  EXPECT_THROW(run_idealized(lift_to_idealized(std::make_shared<ExactAlgorithm>()), {}), InvalidInput);
}

TEST(Lift, ExactTracesAgreeWithIdealizedRun) {
  const auto exact = std::make_shared<ExactAlgorithm>();
  const auto ideal = lift_to_idealized(exact);
  for (std::uint64_t seed = 100; seed < 150; ++seed) {
    const auto stream = planted(seed);
    std::vector<ConvexRegion> regions;
    for (const auto& t : stream) regions.push_back(sat_region(kAbs, t));
    const auto raw = run(*exact, stream, kAbs);
    const auto lifted = run_idealized(ideal, regions);
    ASSERT_EQ(raw.records.size(), lifted.records.size());
    for (std::size_t i = 0; i < raw.records.size(); ++i) {
      EXPECT_EQ(raw.records[i].theta, lifted.records[i].theta);
      EXPECT_EQ(raw.records[i].satisfied, lifted.records[i].satisfied);
    }
  }
}

TEST(Lift, AtomReadersAreNotLiftable) {
  EXPECT_THROW(lift_to_idealized(std::make_shared<ReplayAlgorithm>()), NotLiftable);
  EXPECT_THROW(lift_to_idealized(std::make_shared<RegAlgorithm>(Rat(1))), NotLiftable);
  ReplayAlgorithm replay;
  EXPECT_THROW(replay.update_theta_region(replay.init(1), ConvexRegion::whole(1)), NotLiftable);
}

TEST(SatInvariance, DuplicatedAndPermutedTasks) {
  Rng rng(8);
  std::vector<std::pair<EmpiricalTask, EmpiricalTask>> pairs;
  for (int i = 0; i < 10; ++i) {
    std::vector<Atom> atoms;
    const Vec star = rng.grid_vec(2, Rat(-1), Rat(1), 3);
    for (int k = 0; k < 3; ++k) {
      Vec x = rng.grid_vec(2, Rat(-2), Rat(2), 3);
      atoms.push_back({x, {dot(x, star)}});
    }
    auto doubled = atoms;
    doubled.insert(doubled.end(), atoms.begin(), atoms.end());
    auto permuted = atoms;
    std::rotate(permuted.begin(), permuted.begin() + 1, permuted.end());
    pairs.emplace_back(EmpiricalTask(1, atoms), EmpiricalTask(1, doubled));
    pairs.emplace_back(EmpiricalTask(1, atoms), EmpiricalTask(1, permuted));
  }
  EXPECT_TRUE(check_sat_invariance(ExactAlgorithm{}, kAbs, pairs));
}

TEST(SatInvariance, DifferentSatIsDetected) {
  const EmpiricalTask a(1, {{{Rat(1)}, {Rat(0)}}}), shifted(1, {{{Rat(1)}, {Rat(1)}}});
  EXPECT_FALSE(check_sat_invariance(ExactAlgorithm{}, kAbs, {{a, shifted}}));
}

TEST(OracleSet, ReconstructionPerMemoryKind) {
  const std::vector<EmpiricalTask> stream{interval_task(1, Rat(1)), interval_task(2, Rat(2))};
  const auto exact = ExactAlgorithm{}.step(ExactAlgorithm{}.step(ExactAlgorithm{}.init(1), stream[0], kAbs), stream[1], kAbs);
  const auto region = reconstruct_oracle_set(exact);
  EXPECT_EQ(canonical(region), canonical(intersect(sat_region(kAbs, stream[0]), sat_region(kAbs, stream[1]))));
  EXPECT_EQ(region.constraint_count(), 4u);

  ReplayAlgorithm replay;
  auto rs = replay.init(1);
  for (const auto& t : stream) rs = replay.step(rs, t, kAbs);
  EXPECT_EQ(canonical(reconstruct_oracle_set(rs)), canonical(region));

  RegAlgorithm reg(Rat(1));
  auto gs = reg.step(reg.init(1), stream[0], kAbs);
  const auto pt = reconstruct_oracle_set(gs);
  ASSERT_EQ(pt.balls().size(), 1u);
  EXPECT_EQ(pt.balls()[0].radius_sq, Rat(0));
  EXPECT_EQ(pt.balls()[0].center, gs.theta);

  EXPECT_TRUE(reconstruct_oracle_set(CLState{{Rat(0)}, Memory{}, 0}).is_whole());
}

TEST(Memory, SizesAndSerialization) {
  EXPECT_EQ(Memory{}.size(), 0u);
  EXPECT_EQ(serialize(Memory{}), "none");
  const Memory reg{RegMemory{{Rat(1, 2), Rat(0)}, Rat(10)}};
  EXPECT_EQ(reg.size(), 1u);
  EXPECT_EQ(serialize(reg), "reg:1/2,0|10");
  const Memory ex{ExactMemory{ConvexRegion::from(1, {{{Rat(1)}, Rat(2)}})}};
  EXPECT_EQ(ex.size(), 1u);
  EXPECT_EQ(serialize(ex), "exact:[1|2]");
  ReplayMemory rm;
  rm.coreset = {{{Rat(1)}, {Rat(3, 4)}}};
  EXPECT_EQ(Memory{rm}.size(), 1u);
  EXPECT_EQ(serialize(Memory{rm}), "replay:[1|3/4]");
}

TEST(Trace, CsvAndHelpers) {
  EXPECT_EQ(bitstring({true, false, true}), "101");
  EXPECT_EQ(format_micros(1234567), "1234.567");
  EXPECT_EQ(format_micros(5), "0.005");
  TraceRecord rec{2, {Rat(1)}, 4, {true, false}, 0};
  EXPECT_EQ(forgetting_count(rec), 1u);
}
