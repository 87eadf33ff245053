#include "crnforge/verify/criteria.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
    std::uint64_t seed = 42;
    if (const char* env = std::getenv("CRNFORGE_SEED")) seed = std::strtoull(env, nullptr, 10);
    const std::string suite = argc > 1 ? argv[1] : "all";

    int failed = 0;
    for (const auto& r : crnforge::verify::run_suite(suite, seed)) {
        std::printf("%s\n", crnforge::verify::format_line(r).c_str());
        if (!r.pass) ++failed;
    }
    std::printf("%d criteria failed (seed %llu)\n", failed, static_cast<unsigned long long>(seed));
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
