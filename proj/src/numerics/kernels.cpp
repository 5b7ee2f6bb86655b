#include "liftplan/kernels.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace liftplan::kern {
namespace {

const Kernels& select() {
  const Kernels* avx2 = avx2_kernels();
  if (const char* env = std::getenv("LIFTPLAN_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return scalar_kernels();
    if (std::strcmp(env, "avx2") == 0) {
      if (avx2) return *avx2;
      std::fprintf(stderr, "liftplan: AVX2 requested but unavailable, using scalar kernels\n");
      return scalar_kernels();
    }
    std::fprintf(stderr, "liftplan: unknown LIFTPLAN_KERNELS value '%s', using default\n", env);
  }
  return avx2 ? *avx2 : scalar_kernels();
}

}  // namespace

const Kernels& active() {
  static const Kernels& k = select();
  return k;
}

}  // namespace liftplan::kern
