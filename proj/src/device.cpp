#include "bellrand/device.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "bellrand/errors.hpp"
#include "bellrand/simd/kernels.hpp"

namespace bellrand {
namespace {

// Weights below this are dropped from the ensemble after a collapse.
constexpr double kNegligibleWeight = 1e-300;

double squared_norm(const Ket& v) {
  std::span<const double> r(reinterpret_cast<const double*>(v.data()), static_cast<std::size_t>(2 * v.size()));
  return simd::dot(r, r);
}

}  // namespace

InterRoundSchedule InterRoundSchedule::none() {
  return {{}, [](int) -> std::optional<std::size_t> { return std::nullopt; }};
}

InterRoundSchedule InterRoundSchedule::constant(Unitary u) {
  InterRoundSchedule s;
  s.unitaries.push_back(std::move(u));
  s.select = [](int) -> std::optional<std::size_t> { return 0; };
  return s;
}

DeviceStrategy::DeviceStrategy(std::string name, DensityMatrix initial_state, MeasurementFamily meas_a,
                               MeasurementFamily meas_b, InterRoundSchedule schedule)
    : name_(std::move(name)),
      initial_state_(std::move(initial_state)),
      meas_a_(std::move(meas_a)),
      meas_b_(std::move(meas_b)),
      schedule_(std::move(schedule)) {
  if (meas_a_.dim() > kMaxComponentDim || meas_b_.dim() > kMaxComponentDim)
    throw DimensionError("component dimension exceeds " + std::to_string(kMaxComponentDim));
  if (meas_a_.dim() * meas_b_.dim() != initial_state_.dim())
    throw DimensionError("state dimension is not the product of the component dimensions");
  for (const auto& u : schedule_.unitaries)
    if (u.dim() != initial_state_.dim()) throw DimensionError("scheduled unitary does not match state dimension");
  const Alphabets al = alphabets();
  joint_kraus_.resize(al.table_size());
  for (int x = 0; x < al.x; ++x)
    for (int y = 0; y < al.y; ++y)
      for (int a = 0; a < al.a; ++a)
        for (int b = 0; b < al.b; ++b) joint_kraus_[al.index(a, b, x, y)] = tensor(meas_a_.op(x, a), meas_b_.op(y, b));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(initial_state_.matrix());
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i) {
    double w = es.eigenvalues()(i);
    if (w > kImpossible) ensemble_.emplace_back(w, es.eigenvectors().col(i));
  }
}

Alphabets DeviceStrategy::alphabets() const {
  return {meas_a_.outcomes(), meas_b_.outcomes(), meas_a_.inputs(), meas_b_.inputs()};
}

const Unitary* DeviceStrategy::unitary_after(int round) const {
  if (!schedule_.select) return nullptr;
  auto idx = schedule_.select(round);
  if (!idx) return nullptr;
  if (*idx >= schedule_.unitaries.size()) throw DomainError("schedule selects a missing unitary");
  return &schedule_.unitaries[*idx];
}

InteractionEngine::InteractionEngine(std::shared_ptr<const DeviceStrategy> strategy, std::uint64_t seed)
    : strategy_(std::move(strategy)), rng_(seed) {
  if (!strategy_) throw DomainError("engine needs a strategy");
  for (const auto& [w, ket] : strategy_->initial_ensemble()) branches_.push_back({w, ket});
}

DensityMatrix InteractionEngine::current_state() const {
  const int d = strategy_->dim();
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  double total = 0.0;
  for (const auto& br : branches_) {
    m += br.weight * (br.ket * br.ket.adjoint());
    total += br.weight;
  }
  return DensityMatrix::from_matrix(m / total);
}

void InteractionEngine::check_inputs(int x, int y) const {
  const Alphabets al = strategy_->alphabets();
  if (x < 0 || x >= al.x || y < 0 || y >= al.y) throw DomainError("input out of range");
}

double InteractionEngine::outcome_probability(int x, int y, int a, int b) const {
  check_inputs(x, y);
  const Alphabets al = strategy_->alphabets();
  if (a < 0 || a >= al.a || b < 0 || b >= al.b) throw DomainError("outcome out of range");
  const ComplexMatrix& k = strategy_->joint_kraus(x, y, a, b);
  double p = 0.0, total = 0.0;
  for (const auto& br : branches_) {
    p += br.weight * squared_norm(k * br.ket);
    total += br.weight;
  }
  return std::clamp(p / total, 0.0, 1.0);
}

ConditionalDistribution InteractionEngine::round_distribution() const {
  const Alphabets al = strategy_->alphabets();
  std::vector<double> t(al.table_size());
  for (int x = 0; x < al.x; ++x)
    for (int y = 0; y < al.y; ++y)
      for (int a = 0; a < al.a; ++a)
        for (int b = 0; b < al.b; ++b) t[al.index(a, b, x, y)] = outcome_probability(x, y, a, b);
  return ConditionalDistribution(al, std::move(t));
}

Outcome InteractionEngine::round(int x, int y) {
  check_inputs(x, y);
  const Alphabets al = strategy_->alphabets();
  const double u = rng_.uniform();
  double cum = 0.0;
  Outcome pick{-1, -1};
  bool found = false;
  for (int a = 0; a < al.a && !found; ++a)
    for (int b = 0; b < al.b && !found; ++b) {
      double p = outcome_probability(x, y, a, b);
      if (p <= kImpossible) continue;
      cum += p;
      pick = {a, b};  // last possible outcome absorbs rounding at the top
      found = u < cum;
    }
  if (pick.a < 0) throw ZeroProbability("no possible outcome");
  advance(x, y, pick.a, pick.b);
  return pick;
}

void InteractionEngine::advance(int x, int y, int a, int b) {
  const double p = outcome_probability(x, y, a, b);
  if (p <= kImpossible) throw ZeroProbability("prescribed outcome has probability zero");
  const ComplexMatrix& k = strategy_->joint_kraus(x, y, a, b);
  std::vector<Branch> next;
  next.reserve(branches_.size());
  double total = 0.0;
  for (const auto& br : branches_) {
    Ket v = k * br.ket;
    double n2 = squared_norm(v);
    double w = br.weight * n2;
    if (w <= kNegligibleWeight) continue;
    next.push_back({w, v / std::sqrt(n2)});
    total += w;
  }
  for (auto& br : next) br.weight /= total;
  branches_ = std::move(next);
  history_.push_back({x, y, a, b});
  if (const Unitary* u = strategy_->unitary_after(static_cast<int>(history_.size())))
    for (auto& br : branches_) br.ket = u->matrix() * br.ket;
}

InteractionEngine new_engine(std::shared_ptr<const DeviceStrategy> strategy, std::uint64_t seed) {
  return InteractionEngine(std::move(strategy), seed);
}

RunResult run(InteractionEngine& engine, std::span<const std::pair<int, int>> inputs,
              const InputDistribution& input_dist, const BellCoefficients& c) {
  const Alphabets al = engine.strategy().alphabets();
  if (!(al == c.alphabets())) throw DimensionError("device and coefficients use different alphabets");
  RunResult r;
  r.transcript.alphabets = al;
  r.transcript.input_dist = input_dist;
  r.transcript.coefficients_id = c.id();
  r.transcript.rounds.reserve(inputs.size());
  r.trace.per_round.reserve(inputs.size());
  double sum = 0.0;
  for (const auto& [x, y] : inputs) {
    double ij = bell_value(engine.round_distribution(), c);
    r.trace.per_round.push_back(ij);
    sum += ij;
    Outcome o = engine.round(x, y);
    r.transcript.rounds.push_back({x, y, o.a, o.b});
  }
  r.trace.average = inputs.empty() ? 0.0 : sum / static_cast<double>(inputs.size());
  return r;
}

RunResult run(std::shared_ptr<const DeviceStrategy> strategy, std::span<const std::pair<int, int>> inputs,
              const InputDistribution& input_dist, const BellCoefficients& c, std::uint64_t seed) {
  InteractionEngine e(std::move(strategy), seed);
  RunResult r = run(e, inputs, input_dist, c);
  r.transcript.seed = seed;
  return r;
}

// ---------------------------------------------------------------------------
// Strategy library

namespace {

using std::numbers::pi;

Ket basis(int dim, int i) {
  Ket k = Ket::Zero(dim);
  k(i) = 1.0;
  return k;
}

ComplexMatrix ket_bra(const Ket& k, const Ket& b) { return k * b.adjoint(); }

Ket projector_ket(double theta, int a) {
  Ket k(2);
  if (a == 0)
    k << std::cos(theta / 2), std::sin(theta / 2);
  else
    k << -std::sin(theta / 2), std::cos(theta / 2);
  return k;
}

// Measure along cos(t) Z + sin(t) X, then reset to |0>.
MeasurementFamily measure_and_reset(double t0, double t1) {
  std::vector<ComplexMatrix> ops;
  for (double t : {t0, t1})
    for (int a = 0; a < 2; ++a) ops.push_back(ket_bra(basis(2, 0), projector_ket(t, a)));
  return MeasurementFamily(2, 2, std::move(ops));
}

// Same, on a system qubit with a flag qubit; flag |1> outputs 0 and keeps
// the system untouched.
MeasurementFamily flagged_measure_and_reset(double t0, double t1) {
  const ComplexMatrix f0 = ket_bra(basis(2, 0), basis(2, 0)), f1 = ket_bra(basis(2, 1), basis(2, 1));
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2), zero = ComplexMatrix::Zero(2, 2);
  std::vector<ComplexMatrix> ops;
  for (double t : {t0, t1})
    for (int a = 0; a < 2; ++a)
      ops.push_back(tensor(ket_bra(basis(2, 0), projector_ket(t, a)), f0) + tensor(a == 0 ? id : zero, f1));
  return MeasurementFamily(2, 2, std::move(ops));
}

Ket singlet() {
  Ket k = Ket::Zero(4);
  k(1) = 1.0 / std::sqrt(2.0);
  k(2) = -1.0 / std::sqrt(2.0);
  return k;
}

// (Z (x) I)(I (x) X) CNOT (H (x) I): |00> -> singlet.
ComplexMatrix prepare_singlet() {
  ComplexMatrix h(2, 2), x(2, 2), z(2, 2), cnot = ComplexMatrix::Zero(4, 4);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  return tensor(z, id) * tensor(id, x) * cnot * tensor(h, id);
}

// Permutation taking (s_a, s_b, f_a, f_b) ordered amplitudes to the device
// layout (s_a, f_a, s_b, f_b).
ComplexMatrix flag_layout() {
  ComplexMatrix p = ComplexMatrix::Zero(16, 16);
  for (int sa = 0; sa < 2; ++sa)
    for (int sb = 0; sb < 2; ++sb)
      for (int fa = 0; fa < 2; ++fa)
        for (int fb = 0; fb < 2; ++fb) p(((sa * 2 + fa) * 2 + sb) * 2 + fb, ((sa * 2 + sb) * 2 + fa) * 2 + fb) = 1.0;
  return p;
}

// Honest CHSH angles: Alice {0, pi/2}, Bob {5pi/4, 3pi/4}.
constexpr double kA0 = 0.0, kA1 = pi / 2, kB0 = 5 * pi / 4, kB1 = 3 * pi / 4;

}  // namespace

std::shared_ptr<const DeviceStrategy> strategy_honest_chsh() {
  return std::make_shared<const DeviceStrategy>("honest", DensityMatrix::pure(singlet()), measure_and_reset(kA0, kA1),
                                                measure_and_reset(kB0, kB1),
                                                InterRoundSchedule::constant(Unitary::from_matrix(prepare_singlet())));
}

std::shared_ptr<const DeviceStrategy> strategy_deterministic(std::array<int, 2> f, std::array<int, 2> g) {
  for (int v : {f[0], f[1], g[0], g[1]})
    if (v != 0 && v != 1) throw DomainError("deterministic outputs must be 0 or 1");
  auto family = [](std::array<int, 2> t) {
    std::vector<ComplexMatrix> ops;
    for (int x = 0; x < 2; ++x)
      for (int a = 0; a < 2; ++a)
        ops.push_back(a == t[static_cast<std::size_t>(x)] ? ComplexMatrix(ComplexMatrix::Identity(2, 2))
                                                         : ComplexMatrix(ComplexMatrix::Zero(2, 2)));
    return MeasurementFamily(2, 2, std::move(ops));
  };
  std::string name = "deterministic:" + std::to_string(f[0]) + std::to_string(f[1]) + ":" + std::to_string(g[0]) +
                     std::to_string(g[1]);
  return std::make_shared<const DeviceStrategy>(name, DensityMatrix::pure(basis(4, 0)), family(f), family(g),
                                                InterRoundSchedule::none());
}

std::shared_ptr<const DeviceStrategy> strategy_partial(double v) {
  const double imax = 2.0 * std::sqrt(2.0);
  if (!(v >= 2.0 - 1e-12 && v <= imax + 1e-12)) throw DomainError("partial strategy needs v in [2, 2 sqrt 2]");
  const double w = std::clamp((v - 2.0) / (imax - 2.0), 0.0, 1.0);
  const ComplexMatrix p = flag_layout();
  const Ket s = singlet(), zz = basis(4, 0), ones = basis(4, 3);
  ComplexMatrix rho = w * tensor(Ket(s), zz) * tensor(Ket(s), zz).adjoint() +
                      (1.0 - w) * tensor(zz, ones) * tensor(zz, ones).adjoint();
  ComplexMatrix u = p * tensor(prepare_singlet(), ComplexMatrix::Identity(4, 4)) * p.adjoint();
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::make_shared<const DeviceStrategy>(
      "partial:" + std::string(buf, r.ptr), DensityMatrix::from_matrix(p * rho * p.adjoint()),
      flagged_measure_and_reset(kA0, kA1), flagged_measure_and_reset(kB0, kB1),
      InterRoundSchedule::constant(Unitary::from_matrix(u)));
}

std::shared_ptr<const DeviceStrategy> strategy_memory_cheater(int switch_round) {
  if (switch_round < 0) throw DomainError("switch round must be nonnegative");
  const ComplexMatrix p = flag_layout();
  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  const ComplexMatrix prep = p * tensor(prepare_singlet(), ComplexMatrix::Identity(4, 4)) * p.adjoint();
  const ComplexMatrix flip = p * tensor(ComplexMatrix::Identity(4, 4), tensor(x, x)) * p.adjoint();
  Ket start = switch_round == 0 ? tensor(basis(4, 0), basis(4, 3)) : tensor(singlet(), basis(4, 0));
  InterRoundSchedule sched;
  sched.unitaries = {Unitary::from_matrix(prep), Unitary::from_matrix(flip)};
  sched.select = [switch_round](int j) -> std::optional<std::size_t> {
    if (j < switch_round) return 0;
    if (j == switch_round) return 1;
    return std::nullopt;
  };
  return std::make_shared<const DeviceStrategy>("memory:" + std::to_string(switch_round),
                                                DensityMatrix::pure(p * start), flagged_measure_and_reset(kA0, kA1),
                                                flagged_measure_and_reset(kB0, kB1), std::move(sched));
}

std::vector<std::shared_ptr<const DeviceStrategy>> strategy_library(int cheater_switch_round) {
  return {strategy_honest_chsh(),
          strategy_deterministic({0, 0}, {0, 0}),
          strategy_deterministic({0, 1}, {0, 0}),
          strategy_deterministic({0, 1}, {1, 1}),
          strategy_partial(2.4),
          strategy_memory_cheater(cheater_switch_round)};
}

}  // namespace bellrand
