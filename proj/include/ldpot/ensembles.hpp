#pragma once

#include "ldpot/core.hpp"
#include "ldpot/polynomials.hpp"
#include "ldpot/weight.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace ldpot {

struct PartitionFunction {
  int k = 0;
  Index Nk = 0;
  double logZ = 0.0;        // log(N_k!) + log det Gram; -inf when singular
  double normalized = 0.0;  // Z_k^(1/(2 k N_k))
};

/// Z_k = N_k! det(Gram), the Gram determinant taken from an Arnoldi
/// orthogonalization over the atoms of nu.
PartitionFunction partitionFunction(const DiscreteMeasure& nu, const Weight& Q, int k);
/// Same with the weight given by its values at the atoms.
PartitionFunction partitionFunction(const DiscreteMeasure& nu, const Eigen::VectorXd& qValues,
                                    int k);

enum class Sampler { DppExact, Mcmc };

struct EnsembleSample {
  int k = 0;
  std::vector<Configuration> configs;  // log|VDM^Q| cached on each
  std::vector<std::vector<Index>> atomIndices;
  Sampler sampler = Sampler::DppExact;
  std::uint64_t seed = 0;
  int tasks = 1;
  double acceptanceRate = std::numeric_limits<double>::quiet_NaN();
  std::string nuId;
  std::string weightId;
};

/// Exact draws from Prob_k on the atoms of nu (sequential projection DPP
/// sampler). Draws are split over `tasks` threads, each with its own RNG
/// substream; output is reproducible for a fixed (seed, tasks) pair.
EnsembleSample sampleDpp(const DiscreteMeasure& nu, const Weight& Q, int k, Index count,
                         std::uint64_t seed, int tasks = 1);
EnsembleSample sampleDpp(const DiscreteMeasure& nu, const Eigen::VectorXd& qValues,
                         const std::string& weightId, int k, Index count, std::uint64_t seed,
                         int tasks = 1);

/// Metropolis chain with uniform single-point replacement proposals.
EnsembleSample sampleMcmc(const DiscreteMeasure& nu, const Weight& Q, int k, Index count,
                          Index burnIn, Index thin, std::uint64_t seed, int tasks = 1);

/// One-point intensity K_k(z, z) mass(z) at each atom; sums to N_k.
Eigen::VectorXd inclusionIntensity(const DiscreteMeasure& nu, const Weight& Q, int k);

struct TailBoundReport {
  double eta = 0.0;
  double deltaBar = 0.0;
  double bound = 0.0;      // (1 - eta / (2 deltaBar))^(2 k N_k)
  double empirical = 0.0;  // fraction with |VDM^Q|^2 < (deltaBar - eta)^(2 k N_k)
  double stderr = 0.0;
  Index outside = 0;
  Index total = 0;
  bool pass = false;  // empirical <= bound + 2 stderr
};

TailBoundReport tailBoundCheck(const EnsembleSample& sample, double eta, double deltaBar);

/// Empirical measures (1/N_k) sum delta_{x_j} of each configuration.
std::vector<DiscreteMeasure> pushforwardSigmaK(const EnsembleSample& sample);

}  // namespace ldpot
