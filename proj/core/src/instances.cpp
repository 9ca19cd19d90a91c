#include "sublis/instances.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sublis/rng.hpp"

namespace sublis {

namespace {

void shuffle(std::vector<Value>& v, CounterRng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.uniform_int(0, i - 1)]);
}

std::vector<Value> permutation(std::size_t n, CounterRng& rng) {
  std::vector<Value> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i + 1;
  shuffle(v, rng);
  return v;
}

void sort_at(std::vector<Value>& v, const std::vector<std::size_t>& pos) {
  std::vector<Value> vals;
  for (auto p : pos) vals.push_back(v[p]);
  std::sort(vals.begin(), vals.end());
  for (std::size_t i = 0; i < pos.size(); ++i) v[pos[i]] = vals[i];
}

std::size_t chain_length(const InstanceSpec& s) {
  const auto m = static_cast<std::size_t>(std::ceil(s.lambda_plant * static_cast<double>(s.n) - 1e-9));
  return std::clamp<std::size_t>(m, std::min<std::size_t>(1, s.n), s.n);
}

}  // namespace

BlockSequence generate(const InstanceSpec& spec) {
  auto rng = CounterRng::derive(spec.seed, {static_cast<std::uint64_t>(spec.family), spec.n, spec.k});
  const std::size_t n = spec.n;
  if (spec.family == Family::BlockRandom) {
    const std::size_t k = std::max<std::size_t>(1, spec.k);
    BlockSequence y(n, k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j)
        if (!rng.bernoulli(0.25)) y.set(i, j, rng.uniform_int(1, std::max<std::size_t>(1, n * k)));
    return y;
  }
  auto v = permutation(n, rng);
  const std::size_t m = chain_length(spec);
  std::vector<std::size_t> pos;
  switch (spec.family) {
    case Family::RandomPermutation:
      break;
    case Family::PlantedChain: {
      std::vector<Value> idx(n);
      for (std::size_t i = 0; i < n; ++i) idx[i] = i;
      for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[rng.uniform_int(i, n - 1)]);
      pos.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m));
      std::sort(pos.begin(), pos.end());
      break;
    }
    case Family::ConcentratedOpt: {
      const std::size_t start = n > m ? rng.uniform_int(0, n - m) : 0;
      for (std::size_t i = 0; i < m; ++i) pos.push_back(start + i);
      break;
    }
    case Family::UniformOpt:
      for (std::size_t i = 0; i < m; ++i) pos.push_back(i * n / m);
      break;
    case Family::BlockRandom:
      break;
  }
  sort_at(v, pos);
  return BlockSequence::from_values(v);
}

Family parse_family(std::string_view name) {
  if (name == "random_permutation") return Family::RandomPermutation;
  if (name == "planted_chain") return Family::PlantedChain;
  if (name == "concentrated_opt") return Family::ConcentratedOpt;
  if (name == "uniform_opt") return Family::UniformOpt;
  if (name == "block_random") return Family::BlockRandom;
  throw ConfigError("unknown family: " + std::string(name));
}

std::string family_name(Family f) {
  switch (f) {
    case Family::RandomPermutation: return "random_permutation";
    case Family::PlantedChain: return "planted_chain";
    case Family::ConcentratedOpt: return "concentrated_opt";
    case Family::UniformOpt: return "uniform_opt";
    case Family::BlockRandom: return "block_random";
  }
  return "unknown";
}

}  // namespace sublis
