#include "brt/util.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace brt {

std::int64_t resolve_workers(std::int64_t requested) {
    if (requested > 0) return requested;
    std::uint64_t env = env_u64("BRT_WORKERS", 0);
    if (env > 0) return std::int64_t(env);
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace brt
