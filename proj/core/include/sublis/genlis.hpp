#pragma once

#include <vector>

#include "sublis/engine.hpp"
#include "sublis/genlis_instance.hpp"
#include "sublis/oracle.hpp"
#include "sublis/ptree.hpp"

namespace sublis {

// Greedy extraction of exact longest increasing subsequences (at most one slot per block) while
// their length is at least lambda*n/4. n defaults to g.n.
std::vector<std::vector<Coord>> extract_pseudo_solutions(const GenLisInstance& g, double lambda,
                                                         std::size_t n = 0);

struct Bucket {
  double ell = 0;
  double lo = 0;  // exclusive lower bound on |P|
  double hi = 0;  // inclusive upper bound on |P|
  std::vector<std::size_t> members;  // indices into the solution list
  std::vector<Coord> coords;         // union U_ell
};

// Length classes ell in E_2(4/lambda)/4 = {1/4, 1/2, 1, ...}.
std::vector<double> bucket_grid(double lambda);
// Solutions longer than the top class land in the top bucket.
std::vector<Bucket> bucket_solutions(const std::vector<std::vector<Coord>>& solutions, double lambda,
                                     std::size_t n);

// Sum of counts minus the `removed` largest ones.
std::size_t sum_without_largest(std::vector<std::size_t> counts, std::size_t removed);

double dense_estimate(double ell, double kappa, double lambda, std::size_t n, std::size_t k, double zeta);

struct GenLisResult {
  std::size_t estimate = 0;
  double dense = 0;   // best dense value before clamping
  double sparse = 0;  // best sparse value
  std::size_t tests = 0;        // flag tests charged during this call
  std::size_t budget = 0;       // 10*zeta*k/lambda plus one test per slot of a present block
  double rate = 0;              // realized block sampling rate
  std::size_t sampled_blocks = 0;
  std::size_t solutions = 0;
};

// Genuine-LIS estimate. The sparse estimator is skipped when gamma >= k/lambda.
GenLisResult est_genlis(Engine& engine, GenLisInstance& g, double lambda, double gamma, std::size_t tau,
                        const TreeView& view, unsigned depth = 0);

// est_genlis on the non-empty blocks with n' = d and lambda' = lambda*n/d.
GenLisResult sparse_genlis(Engine& engine, GenLisInstance& g, double lambda, const Schedule& sched,
                           const TreeView& view, unsigned depth);

// floor(min(I)/ell) for |I| in [ell, 2*ell).
Value phi_ell(const Interval& I, std::uint64_t ell);

// GenLIS over interval values via rank compression, length classes and phi_ell.
double interval_reduce(Engine& engine, IntervalGenLisInstance& g, double lambda, const TreeView& view,
                       const Schedule& sched, unsigned depth);

}  // namespace sublis
