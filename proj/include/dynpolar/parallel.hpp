#pragma once

// OpenMP kernels for the data-parallel loops (seed advection, stage-wise body
// means, sphere quadrature sums). Every kernel has a serial reference path
// selected by Execution::Serial; both paths produce bit-identical results
// because reductions are always accumulated in index order.

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

#include "dynpolar/integrate.hpp"

namespace dynpolar {

enum class Execution { Serial, Parallel };

int max_threads() noexcept;

// Runs body(i) for i in [0, n). Exceptions thrown inside the parallel region
// are captured and the first one (lowest index) is rethrown afterwards.
void for_each_index(std::size_t n, Execution exec, const std::function<void(std::size_t)>& body);

// Advects every seed on the same grid.
std::vector<Trajectory> advect_batch(const VelocityField& f, const std::vector<Vec>& seeds, const TimeGrid& grid,
                                     Execution exec = Execution::Parallel);

// sum_i weights[i] * term(i), accumulated in fixed blocks and combined in
// block order so the result does not depend on the thread count.
Vec weighted_vector_sum(std::size_t n, const std::function<double(std::size_t)>& weight,
                        const std::function<Vec(std::size_t)>& term, int dim, Execution exec = Execution::Parallel);

} // namespace dynpolar
