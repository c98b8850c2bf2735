#include "dynpolar/parallel.hpp"

#include <algorithm>

#include <omp.h>

namespace dynpolar {

namespace {

constexpr std::size_t kBlock = 64;

} // namespace

int max_threads() noexcept { return omp_get_max_threads(); }

void for_each_index(std::size_t n, Execution exec, const std::function<void(std::size_t)>& body) {
    if (exec == Execution::Serial) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::vector<Trajectory> advect_batch(const VelocityField& f, const std::vector<Vec>& seeds, const TimeGrid& grid,
                                     Execution exec) {
    std::vector<Trajectory> out(seeds.size());
    for_each_index(seeds.size(), exec, [&](std::size_t i) { out[i] = advect(f, seeds[i], grid); });
    return out;
}

Vec weighted_vector_sum(std::size_t n, const std::function<double(std::size_t)>& weight,
                        const std::function<Vec(std::size_t)>& term, int dim, Execution exec) {
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<Vec> partial(blocks, Vec(dim));
    for_each_index(blocks, exec, [&](std::size_t b) {
        Vec acc(dim);
        const std::size_t end = std::min(n, (b + 1) * kBlock);
        for (std::size_t i = b * kBlock; i < end; ++i) acc += weight(i) * term(i);
        partial[b] = acc;
    });
    Vec total(dim);
    for (const Vec& p : partial) total += p;
    return total;
}

} // namespace dynpolar
