#include "erwhex/parallel.hpp"

#include <cstdlib>
#include <string>

namespace erwhex {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ERWHEX_THREADS")) {
        try {
            const int value = std::stoi(env);
            if (value > 0) return value;
        } catch (const std::exception&) {
        }
    }
    return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

}  // namespace erwhex
