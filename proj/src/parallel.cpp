#include <mutex>
#include <atomic>
#include <thread>
#include <vector>

#include "ubl/common.hpp"

namespace ubl {

namespace {
int g_threads = 1;
}

int parallel_threads() { return g_threads; }

void set_parallel_threads(int n) { g_threads = std::max(1, n); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    int nt = std::min<std::size_t>(g_threads, n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace ubl
