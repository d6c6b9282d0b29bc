#include <atomic>
#include <stdexcept>

#include "equipart/kernels.hpp"
#include "kernels_impl.hpp"

namespace equipart::kernels {

namespace {

constexpr KernelTable kScalar{&scalar::affine, &scalar::logistic, &scalar::softmax, &scalar::exp};
#if defined(EQUIPART_HAVE_AVX2)
constexpr KernelTable kAvx2{&avx2::affine, &avx2::logistic, &avx2::softmax, &avx2::exp};
#endif

Isa detect() {
#if defined(EQUIPART_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  if (__builtin_cpu_supports("avx2")) {
    return Isa::Avx2;
  }
#endif
  return Isa::Scalar;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool isa_supported(Isa isa) {
  if (isa == Isa::Scalar) {
    return true;
  }
#if defined(EQUIPART_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& table(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("kernel ISA not supported on this machine");
  }
#if defined(EQUIPART_HAVE_AVX2)
  if (isa == Isa::Avx2) {
    return kAvx2;
  }
#endif
  return kScalar;
}

const KernelTable& active() { return table(selected().load(std::memory_order_relaxed)); }

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("kernel ISA not supported on this machine");
  }
  selected().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace equipart::kernels
