#include "hardy/verify.hpp"

#include <cstdlib>
#include <iostream>
#include <thread>

int main() {
    int workers = int(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("HARDY_WORKERS")) workers = std::max(1, std::atoi(env));
    bool all = true;
    for (const auto& r : hardy::run_acceptance(workers)) {
        std::cout << hardy::format_result(r) << std::endl;
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
