#pragma once

// Untrusted two-component device: a fixed initial state, fixed Kraus
// families on each component and a round-indexed schedule of unitaries
// applied between rounds. Simulated exactly, round by round.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bellrand/bell.hpp"
#include "bellrand/qmath.hpp"
#include "bellrand/rng.hpp"

namespace bellrand {

// Chooses the unitary applied after round j (1-based), i.e. U_{j+1}.
// Returns an index into the schedule's unitaries, or nullopt for identity.
struct InterRoundSchedule {
  std::vector<Unitary> unitaries;
  std::function<std::optional<std::size_t>(int round)> select;

  static InterRoundSchedule none();
  static InterRoundSchedule constant(Unitary u);
};

class DeviceStrategy {
 public:
  inline static constexpr int kMaxComponentDim = 16;

  DeviceStrategy(std::string name, DensityMatrix initial_state, MeasurementFamily meas_a,
                 MeasurementFamily meas_b, InterRoundSchedule schedule);

  const std::string& name() const { return name_; }
  const DensityMatrix& initial_state() const { return initial_state_; }
  const MeasurementFamily& meas_a() const { return meas_a_; }
  const MeasurementFamily& meas_b() const { return meas_b_; }
  const InterRoundSchedule& schedule() const { return schedule_; }
  Alphabets alphabets() const;
  int dim() const { return initial_state_.dim(); }

  // Ka (x) Kb for every (x, y, a, b), laid out like Alphabets::index.
  const ComplexMatrix& joint_kraus(int x, int y, int a, int b) const {
    return joint_kraus_[alphabets().index(a, b, x, y)];
  }
  // Eigen-decomposition of the initial state (weights > 0, unit kets).
  const std::vector<std::pair<double, Ket>>& initial_ensemble() const { return ensemble_; }
  const Unitary* unitary_after(int round) const;

 private:
  std::string name_;
  DensityMatrix initial_state_;
  MeasurementFamily meas_a_;
  MeasurementFamily meas_b_;
  InterRoundSchedule schedule_;
  std::vector<ComplexMatrix> joint_kraus_;
  std::vector<std::pair<double, Ket>> ensemble_;
};

struct Outcome {
  int a = 0;
  int b = 0;
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

// Evolving conditional state of one device. The state is held as a weighted
// ensemble of kets (its initial eigendecomposition), which every Kraus
// operator and unitary maps branch by branch; current_state() rebuilds the
// density matrix on demand. Copying an engine forks the device.
class InteractionEngine {
 public:
  InteractionEngine(std::shared_ptr<const DeviceStrategy> strategy, std::uint64_t seed);

  const DeviceStrategy& strategy() const { return *strategy_; }
  // 1-based index of the upcoming round.
  int round_index() const { return static_cast<int>(history_.size()) + 1; }
  const std::vector<RoundRecord>& history() const { return history_; }
  DensityMatrix current_state() const;

  ConditionalDistribution round_distribution() const;
  double outcome_probability(int x, int y, int a, int b) const;

  // Samples (a, b) by inverse CDF over the lexicographic (a, b) table, then
  // collapses, applies the scheduled unitary and records the round.
  Outcome round(int x, int y);
  // Same as round() but with a prescribed outcome; throws ZeroProbability
  // if that outcome is impossible.
  void advance(int x, int y, int a, int b);

 private:
  struct Branch {
    double weight;
    Ket ket;
  };

  void check_inputs(int x, int y) const;

  std::shared_ptr<const DeviceStrategy> strategy_;
  std::vector<Branch> branches_;
  std::vector<RoundRecord> history_;
  Rng rng_;
};

InteractionEngine new_engine(std::shared_ptr<const DeviceStrategy> strategy, std::uint64_t seed);

struct RoundBellTrace {
  std::vector<double> per_round;
  double average = 0.0;
};

struct RunResult {
  Transcript transcript;
  RoundBellTrace trace;
};

// Runs the inputs on an existing engine. I_j is the Bell value of the
// engine's round distribution before round j consumes its inputs.
RunResult run(InteractionEngine& engine, std::span<const std::pair<int, int>> inputs,
              const InputDistribution& input_dist, const BellCoefficients& c);
RunResult run(std::shared_ptr<const DeviceStrategy> strategy,
              std::span<const std::pair<int, int>> inputs, const InputDistribution& input_dist,
              const BellCoefficients& c, std::uint64_t seed);

// Strategy library (all CHSH alphabets).
std::shared_ptr<const DeviceStrategy> strategy_honest_chsh();
// f and g are the output tables a = f[x], b = g[y].
std::shared_ptr<const DeviceStrategy> strategy_deterministic(std::array<int, 2> f, std::array<int, 2> g);
// Classical mixture of the honest device and the constant (0, 0) device
// with round-1 Bell value v in [2, 2 sqrt 2].
std::shared_ptr<const DeviceStrategy> strategy_partial(double v);
// Honest for rounds 1..switch_round, constant (0, 0) afterwards.
std::shared_ptr<const DeviceStrategy> strategy_memory_cheater(int switch_round);

// Library members used across exhaustive checks: honest, three deterministic,
// partial(2.4) and memory_cheater(switch_round).
std::vector<std::shared_ptr<const DeviceStrategy>> strategy_library(int cheater_switch_round);

}  // namespace bellrand
