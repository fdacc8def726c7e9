#include "skl/parallel.hpp"

#include "skl/errors.hpp"

#include <charconv>
#include <cstdlib>
#include <string>
#include <string_view>

namespace skl {

unsigned thread_budget() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("SKL_THREADS");
    if (env == nullptr || *env == '\0') return hw;
    const std::string_view text(env);
    unsigned cap = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
    if (ec != std::errc() || ptr != text.data() + text.size() || cap == 0) {
        throw InvalidArgument("SKL_THREADS must be a positive integer, got '" + std::string(text) + "'");
    }
    return std::min(hw, cap);
}

}  // namespace skl
