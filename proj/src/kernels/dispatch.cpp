#include <atomic>
#include <cstdlib>
#include <cstring>

#include "zollforge/kernels.hpp"

namespace zf::kern {

#ifdef ZF_WITH_AVX2
const Table* avx2_table_impl();
const Table* avx2_table() { return avx2_table_impl(); }
#else
const Table* avx2_table() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(ZF_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Backend initial_backend() {
  const char* env = std::getenv("ZOLLFORGE_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Backend::Scalar;
  return (avx2_table() && cpu_has_avx2()) ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{initial_backend()};
  return b;
}

}  // namespace

Backend active_backend() { return current().load(); }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !(avx2_table() && cpu_has_avx2())) b = Backend::Scalar;
  current().store(b);
}

std::string_view backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

const Table& table() {
  return active_backend() == Backend::Avx2 ? *avx2_table() : scalar_table();
}

}  // namespace zf::kern
