#include <cstdlib>
#include <string_view>

#include "smre/kernels.hpp"

namespace smre::kernels {

#if defined(SMRE_HAVE_AVX2_TU)
const KernelTable& avx2_table_impl();
#endif
#if defined(SMRE_HAVE_NEON_TU)
const KernelTable& neon_table_impl();
#endif

const KernelTable* avx2_table() {
#if defined(SMRE_HAVE_AVX2_TU)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_table() {
#if defined(SMRE_HAVE_NEON_TU)
  return &neon_table_impl();
#else
  return nullptr;
#endif
}

namespace {

const KernelTable& select() {
  const char* env = std::getenv("SMRE_KERNELS");
  if (env != nullptr && std::string_view(env) == "scalar") return scalar_table();
  if (const auto* t = avx2_table()) return *t;
  if (const auto* t = neon_table()) return *t;
  return scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace smre::kernels
