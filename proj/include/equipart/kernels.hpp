#pragma once

// Data-parallel inner loops over structure-of-arrays point blocks.
//
// Every kernel has a scalar reference implementation and an AVX2 variant that
// performs the same IEEE operations in the same order (no FMA contraction), so
// the two produce bit-identical results. The active variant is chosen once at
// runtime from CPUID and can be forced for testing.

#include <cstddef>
#include <string_view>

namespace equipart::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  // out[k] = ((0 + x_0[k]*g_0) + x_1[k]*g_1 + ...) + offset
  void (*affine)(const double* const* coords, std::size_t dim, const double* grad, double offset,
                 std::size_t n, double* out);
  // out[k] = 1 / (1 + exp(-(in[k] - shift) * inv_tau))
  void (*logistic)(const double* in, double shift, double inv_tau, std::size_t n, double* out);
  // Column-wise softmax of r rows (rows[i][k]) at inverse temperature inv_tau,
  // written in place: rows[i][k] <- exp((rows[i][k] - max_j rows[j][k]) * inv_tau) / sum.
  void (*softmax)(double* const* rows, std::size_t r, double inv_tau, std::size_t n);
  // out[k] = exp(in[k]) using the shared polynomial approximation.
  void (*exp)(const double* in, std::size_t n, double* out);
};

const KernelTable& table(Isa isa);
// Table for the active ISA.
const KernelTable& active();

Isa active_isa();
bool isa_supported(Isa isa);
// Overrides runtime detection; throws std::invalid_argument if unsupported.
void force_isa(Isa isa);
std::string_view isa_name(Isa isa);

// Scalar exp approximation shared by all variants (relative error < 1e-13).
// Inputs are clamped to [-708, 709] first, so the result is always finite.
double exp_approx(double x);

}  // namespace equipart::kernels
