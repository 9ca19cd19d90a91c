#include "sublis/engine.hpp"

#include <cmath>

namespace sublis {

std::size_t zeta_for(std::size_t n, double zeta_constant) {
  if (n < 2) return 1;
  return static_cast<std::size_t>(std::ceil(zeta_constant * std::log(static_cast<double>(n))));
}

double Schedule::gamma(double t) const { return std::pow(std::max(t, 1.0), gamma_exponent); }

double cutoff_depth(double epsilon, double h_constant) {
  return h_constant * (1.0 / std::sqrt(epsilon)) * std::log2(1.0 / epsilon);
}

Schedule parameter_schedule(std::size_t instance_size, double epsilon, unsigned depth,
                            const ScheduleConfig& cfg) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in (0,1]");
  Schedule s;
  const double beta = cfg.beta;
  if (instance_size < cfg.beta) {
    s.tau = 1;
  } else {
    const double target = std::pow(static_cast<double>(instance_size), epsilon);
    long e = std::lround(std::log(target) / std::log(beta));
    e = std::max(e, 1L);
    std::size_t tau = 1;
    for (long i = 0; i < e; ++i) tau *= cfg.beta;
    s.tau = std::min<std::size_t>(tau, floor_power(cfg.beta, instance_size));
  }
  const double h = cutoff_depth(epsilon, cfg.h_constant);
  bool dense_only = static_cast<double>(depth) >= h - 1e-12;
  if (cfg.global_n > 1) {
    const double b = std::pow(static_cast<double>(cfg.global_n), std::pow(epsilon, h));
    if (static_cast<double>(instance_size) <= b) dense_only = true;
  }
  s.dense_only = dense_only;
  s.gamma_exponent = dense_only ? 1.0 : std::sqrt(epsilon);
  return s;
}

Sods& Engine::sods(const Window& w) {
  const std::uint64_t salt = w.source ? w.source->salt() : 0;
  const std::uint64_t key = mix_key(w.view.identity(), w.offset);
  auto& slot = sods_[{salt, key}];
  if (!slot) slot = std::make_unique<Sods>(w, mix_key(mix_key(seed_, salt), key));
  return *slot;
}

void Engine::release(std::uint64_t salt) {
  auto lo = sods_.lower_bound({salt, 0});
  auto hi = sods_.lower_bound({salt + 1, 0});
  if (salt == ~std::uint64_t{0}) hi = sods_.end();
  sods_.erase(lo, hi);
}

const std::size_t* Engine::memo_find(std::uint64_t key) const {
  auto it = memo_.find(key);
  return it == memo_.end() ? nullptr : &it->second;
}

}  // namespace sublis
