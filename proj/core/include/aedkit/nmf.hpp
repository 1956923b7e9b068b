#pragma once

#include <cstdint>
#include <vector>

#include "aedkit/types.hpp"

namespace aed {

// KL-divergence NMF with multiplicative updates, in three modes:
//   nmf_factorize        V ~ W H, both factors estimated
//   nmf_supervised       basis fixed, only activations estimated
//   nmf_semi_supervised  fixed basis extended with estimable noise atoms
//
// All modes floor the factors and the reconstruction at epsilon_floor inside
// division steps, stop on max_iters or relative cost change < tolerance, and
// are deterministic for a given seed.
struct NmfConfig {
  int rank = 2;                  // r; full factorization requires r < min(p, q)
  int max_iters = 200;
  double epsilon_floor = 1e-12;
  double tolerance = 1e-6;       // relative cost-change stopping threshold
  std::uint64_t seed = 0;
};

struct NmfResult {
  Matrix basis;        // p x r, columns L1-normalized
  Matrix activations;  // r x q, carries the normalization energy
  std::vector<double> cost_trace;  // KL cost after each iteration
  int iterations_run = 0;
};

struct SupervisedNmfResult {
  Matrix activations;  // r x q
  std::vector<double> cost_trace;
  int iterations_run = 0;
};

struct SemiSupervisedNmfResult {
  Matrix noise_basis;        // p x noise_rank, estimated
  Matrix event_activations;  // rows matching the fixed basis columns
  Matrix noise_activations;  // noise_rank x q; kept for inspection only
  std::vector<double> cost_trace;
  int iterations_run = 0;
};

// Generalized KL divergence sum_ij [ v*ln(v/a) - v + a ] with 0*ln(0/a) = 0.
// `approx` entries are floored at epsilon_floor before use.
double kl_divergence(const Matrix& v, const Matrix& approx,
                     double epsilon_floor = 1e-12);

NmfResult nmf_factorize(const Matrix& v, const NmfConfig& cfg);

// `basis` is never modified; cfg.rank is ignored (the basis defines it).
SupervisedNmfResult nmf_supervised(const Matrix& v, const Matrix& basis,
                                   const NmfConfig& cfg);

// noise_rank == 0 degrades to nmf_supervised (bit-identical activations for
// the same seed).
SemiSupervisedNmfResult nmf_semi_supervised(const Matrix& v, const Matrix& basis,
                                            int noise_rank, const NmfConfig& cfg);

}  // namespace aed
