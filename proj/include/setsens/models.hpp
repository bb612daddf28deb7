#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "setsens/domain_sets.hpp"
#include "setsens/kernels.hpp"

namespace setsens {

// ---------------------------------------------------------------------------
// Toy excursion set: g(x,u) = -x1^2 + 5 x2 - u1 + u2^2 - 1 on [-5,5]^2, with a
// third input that never enters g.

double toy_constraint(std::span<const double> x, std::span<const double> u);
RegionOracle toy_excursion();

// ---------------------------------------------------------------------------
// Damped oscillator  m Y'' + c Y' + k Y = eta(t).

struct Forcing {
  enum class Kind { step, sine };
  Kind kind = Kind::step;
  double amplitude = 10.0;
  double frequency = 1.0;  // sine only, in rad per unit time

  double operator()(double t) const noexcept;
  std::string describe() const;
};

// "step", "step:<amplitude>", "sine:<freq>" or "sine:<freq>:<amplitude>".
Forcing parse_forcing(std::string_view text);

struct OscillatorSettings {
  Forcing forcing;
  double horizon = 10.0;
  double dt = 0.01;
};

struct InitialState {
  double position = 0.0;
  double velocity = 0.0;
};

struct TrajectoryExtrema {
  double max_velocity = 0.0;      // max of Y' on the time grid
  double max_acceleration = 0.0;  // max of Y'' on the time grid
  double final_position = 0.0;
  double final_velocity = 0.0;
};

// Fixed-step RK4 from `initial`; Y'' is recovered from the equation of motion
// at each grid point.
TrajectoryExtrema oscillator_trajectory(double mass, double damping, double stiffness,
                                        const Forcing& forcing, double horizon, double dt,
                                        InitialState initial = {});

// Memoises trajectory extrema per (x, u) bit pattern. Safe for concurrent use.
class TrajectoryCache {
public:
  explicit TrajectoryCache(OscillatorSettings settings) : settings_(settings) {}

  // x = (x1, x2); u = (u1, u2, up, ur1, ur2, ur3).
  TrajectoryExtrema get(std::span<const double> x, std::span<const double> u);
  std::uint64_t solves() const noexcept { return solves_.load(); }
  const OscillatorSettings& settings() const noexcept { return settings_; }

private:
  struct Key {
    std::uint64_t bits[5];
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  OscillatorSettings settings_;
  std::mutex mutex_;
  std::unordered_map<Key, TrajectoryExtrema, KeyHash> cache_;
  std::atomic<std::uint64_t> solves_{0};
};

enum class OscillatorOutput { g1, g2, pair, intersection };

// One oracle per output component: g1/g2/intersection give one, pair gives two
// (g1 then g2) whose set-kernel grams are multiplied entrywise.
std::vector<RegionOracle> oscillator_excursions(std::shared_ptr<TrajectoryCache> cache,
                                                OscillatorOutput output);

// ---------------------------------------------------------------------------
// Built-in cases addressed by name.

struct ModelInstance {
  std::string name;
  BoxDomain domain;
  std::vector<MarginalDistribution> marginals;
  std::vector<std::string> input_names;
  std::vector<RegionOracle> components;  // product kernel when more than one
  bool product_output = false;           // product of set kernels may not be characteristic
  std::shared_ptr<TrajectoryCache> cache;           // oscillator cases only
  std::shared_ptr<std::atomic<std::uint64_t>> calls;  // toy case only

  // Number of model evaluations (toy constraint calls or trajectory solves).
  std::uint64_t model_evaluations() const noexcept;
};

inline constexpr std::string_view kModelNames[] = {
    "toy", "oscillator_g1", "oscillator_g2", "oscillator_pair", "oscillator_intersection"};

ModelInstance make_model(std::string_view name, const OscillatorSettings& settings = {});

}  // namespace setsens
