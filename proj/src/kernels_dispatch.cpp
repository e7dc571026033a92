#include "signglm/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace signglm::kernels {
namespace {

const Ops* select() {
  if (const char* env = std::getenv("SIGNGLM_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &scalar();
    if (std::strcmp(env, "avx2") == 0 && avx2() != nullptr) return avx2();
  }
#if defined(__x86_64__) || defined(__i386__)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    if (const Ops* t = avx2()) return t;
  }
#endif
  return &scalar();
}

}  // namespace

const Ops& active() {
  static const Ops* table = select();
  return *table;
}

}  // namespace signglm::kernels
