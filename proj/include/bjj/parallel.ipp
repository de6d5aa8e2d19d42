#pragma once

#include <atomic>
#include <exception>
#include <optional>
#include <thread>

namespace bjj {

template <class T>
std::vector<T> parallel_map(std::size_t n, std::size_t threads, const std::function<T(std::size_t)>& fn) {
    std::vector<std::optional<T>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t count = std::max<std::size_t>(1, std::min(threads, n));
    if (count == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(count);
        for (std::size_t k = 0; k < count; ++k) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<T> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace bjj
