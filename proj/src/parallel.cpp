#include "hdgauss/parallel.hpp"

#include <cstdlib>
#include <string>

namespace hdgauss {

unsigned resolve_threads(int requested) {
    if (requested > 0) return static_cast<unsigned>(requested);
    if (const char* env = std::getenv("HDGAUSS_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

}  // namespace hdgauss
