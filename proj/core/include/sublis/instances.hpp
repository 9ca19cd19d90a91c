#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "sublis/core.hpp"

namespace sublis {

enum class Family { RandomPermutation, PlantedChain, ConcentratedOpt, UniformOpt, BlockRandom };

struct InstanceSpec {
  Family family = Family::RandomPermutation;
  std::size_t n = 0;
  std::size_t k = 1;           // used by block_random only
  double lambda_plant = 0.1;   // planted families: chain length ceil(lambda_plant * n)
  std::uint64_t seed = 1;
};

// All values are >= 1. Planted families start from a random permutation and sort the values at
// the planted positions, so longer chains can still arise by chance.
BlockSequence generate(const InstanceSpec& spec);

Family parse_family(std::string_view name);  // throws ConfigError
std::string family_name(Family f);

}  // namespace sublis
