#include "setsens/models.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace setsens {

double toy_constraint(std::span<const double> x, std::span<const double> u) {
  return -x[0] * x[0] + 5.0 * x[1] - u[0] + u[1] * u[1] - 1.0;
}

RegionOracle toy_excursion() {
  return {[](std::span<const double> x, std::span<const double> u) {
    return toy_constraint(x, u) <= 0.0;
  }};
}

double Forcing::operator()(double t) const noexcept {
  return kind == Kind::step ? amplitude : amplitude * std::sin(frequency * t);
}

std::string Forcing::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == Kind::step)
    os << "step:" << amplitude;
  else
    os << "sine:" << frequency << ":" << amplitude;
  return os.str();
}

namespace {

double parse_number(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw std::invalid_argument("invalid " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

Forcing parse_forcing(std::string_view text) {
  const auto parts = split(text, ':');
  Forcing f;
  if (parts[0] == "step") {
    if (parts.size() > 2) throw std::invalid_argument("forcing: expected step[:<amplitude>]");
    f.kind = Forcing::Kind::step;
    if (parts.size() == 2) f.amplitude = parse_number(parts[1], "forcing amplitude");
  } else if (parts[0] == "sine") {
    if (parts.size() < 2 || parts.size() > 3)
      throw std::invalid_argument("forcing: expected sine:<freq>[:<amplitude>]");
    f.kind = Forcing::Kind::sine;
    f.frequency = parse_number(parts[1], "forcing frequency");
    if (parts.size() == 3) f.amplitude = parse_number(parts[2], "forcing amplitude");
  } else {
    throw std::invalid_argument("unknown forcing '" + std::string(text) + "'");
  }
  return f;
}

TrajectoryExtrema oscillator_trajectory(double mass, double damping, double stiffness,
                                        const Forcing& forcing, double horizon, double dt,
                                        InitialState initial) {
  if (!(mass > 0.0)) throw std::domain_error("nonphysical mass");
  if (!(stiffness > 0.0)) throw std::domain_error("nonphysical stiffness");
  if (!(dt > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("oscillator: dt and horizon must be positive");

  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  const double inv_m = 1.0 / mass;
  auto accel = [&](double t, double y, double v) {
    return (forcing(t) - damping * v - stiffness * y) * inv_m;
  };

  double y = initial.position, v = initial.velocity;
  TrajectoryExtrema e;
  e.max_velocity = v;
  e.max_acceleration = accel(0.0, y, v);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    const double k1y = v, k1v = accel(t, y, v);
    const double k2y = v + 0.5 * dt * k1v, k2v = accel(t + 0.5 * dt, y + 0.5 * dt * k1y, k2y);
    const double k3y = v + 0.5 * dt * k2v, k3v = accel(t + 0.5 * dt, y + 0.5 * dt * k2y, k3y);
    const double k4y = v + dt * k3v, k4v = accel(t + dt, y + dt * k3y, k4y);
    y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    e.max_velocity = std::max(e.max_velocity, v);
    e.max_acceleration = std::max(e.max_acceleration, accel(static_cast<double>(s + 1) * dt, y, v));
  }
  e.final_position = y;
  e.final_velocity = v;
  return e;
}

std::size_t TrajectoryCache::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : k.bits) {
    h ^= b;
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

TrajectoryExtrema TrajectoryCache::get(std::span<const double> x, std::span<const double> u) {
  const Key key{{std::bit_cast<std::uint64_t>(x[0]), std::bit_cast<std::uint64_t>(x[1]),
                 std::bit_cast<std::uint64_t>(u[0]), std::bit_cast<std::uint64_t>(u[1]),
                 std::bit_cast<std::uint64_t>(u[2])}};
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const auto e = oscillator_trajectory(x[0] + u[0], u[2], x[1] + u[1], settings_.forcing,
                                       settings_.horizon, settings_.dt);
  std::lock_guard lock(mutex_);
  if (cache_.emplace(key, e).second) ++solves_;
  return e;
}

std::vector<RegionOracle> oscillator_excursions(std::shared_ptr<TrajectoryCache> cache,
                                                OscillatorOutput output) {
  auto g1 = [cache](std::span<const double> x, std::span<const double> u) {
    return u[3] - cache->get(x, u).max_velocity <= 0.0;
  };
  auto g2 = [cache](std::span<const double> x, std::span<const double> u) {
    return u[4] - cache->get(x, u).max_acceleration <= 0.0;
  };
  switch (output) {
    case OscillatorOutput::g1: return {{g1}};
    case OscillatorOutput::g2: return {{g2}};
    case OscillatorOutput::pair: return {{g1}, {g2}};
    case OscillatorOutput::intersection:
      return {{[cache](std::span<const double> x, std::span<const double> u) {
        const auto e = cache->get(x, u);
        return u[3] - e.max_velocity <= 0.0 && u[4] - e.max_acceleration <= 0.0;
      }}};
  }
  return {};
}

std::uint64_t ModelInstance::model_evaluations() const noexcept {
  if (cache) return cache->solves();
  if (calls) return calls->load();
  return 0;
}

ModelInstance make_model(std::string_view name, const OscillatorSettings& settings) {
  if (name == "toy") {
    auto calls = std::make_shared<std::atomic<std::uint64_t>>(0);
    RegionOracle counted{[calls](std::span<const double> x, std::span<const double> u) {
      calls->fetch_add(1, std::memory_order_relaxed);
      return toy_constraint(x, u) <= 0.0;
    }};
    const auto m = MarginalDistribution::uniform(-5.0, 5.0);
    return ModelInstance{std::string(name),
                         BoxDomain({-5.0, -5.0}, {5.0, 5.0}),
                         {m, m, m},
                         {"U1", "U2", "U3"},
                         {counted},
                         false,
                         nullptr,
                         calls};
  }

  OscillatorOutput out;
  if (name == "oscillator_g1")
    out = OscillatorOutput::g1;
  else if (name == "oscillator_g2")
    out = OscillatorOutput::g2;
  else if (name == "oscillator_pair")
    out = OscillatorOutput::pair;
  else if (name == "oscillator_intersection")
    out = OscillatorOutput::intersection;
  else
    throw std::invalid_argument("unknown model '" + std::string(name) + "'");

  auto cache = std::make_shared<TrajectoryCache>(settings);
  return ModelInstance{std::string(name),
                       BoxDomain({1.0, 20.0}, {5.0, 50.0}),
                       {MarginalDistribution::uniform(-0.3, 0.3), MarginalDistribution::uniform(-1.0, 1.0),
                        MarginalDistribution::uniform(0.5, 1.5), MarginalDistribution::normal(1.0, 0.1),
                        MarginalDistribution::normal(2.5, 0.25), MarginalDistribution::normal(15.0, 3.0)},
                       {"U1", "U2", "Up", "Ur1", "Ur2", "Ur3"},
                       oscillator_excursions(cache, out),
                       out == OscillatorOutput::pair,
                       cache,
                       nullptr};
}

}  // namespace setsens
