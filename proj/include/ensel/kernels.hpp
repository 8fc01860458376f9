#pragma once

#include <cstddef>
#include <span>

// Data-parallel inner loops. Every routine exists twice: `serial` is the
// reference kept for tests and benchmarks, `omp` is what the library calls.
// The two produce bit-identical output because each output element is
// computed by the same sequence of floating point operations; only the
// assignment of elements to threads differs.

namespace ensel::kernels {

struct PairSums {
  double aa = 0.0;
  double bb = 0.0;
  double ab = 0.0;
};

namespace serial {

/// out[i] = sum_k weights[k] * members[k][i] / sum_k weights[k]
void weighted_average(std::span<const std::span<const double>> members, std::span<const double> weights,
                      std::span<double> out);

/// out[i] = (weight_sum * combined[i] + w * added[i]) / (weight_sum + w)
void blend(std::span<const double> combined, double weight_sum, std::span<const double> added, double w,
           std::span<double> out);

}  // namespace serial

namespace omp {

void weighted_average(std::span<const std::span<const double>> members, std::span<const double> weights,
                      std::span<double> out);

void blend(std::span<const double> combined, double weight_sum, std::span<const double> added, double w,
           std::span<double> out);

}  // namespace omp

// Reductions over examples stay sequential so that summation order, and
// therefore every downstream ranking, is independent of the thread count.
PairSums raw_sums(std::span<const double> a, std::span<const double> b);
PairSums centered_sums(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Minimum element count before the omp variants spawn threads.
inline constexpr std::size_t kParallelGrain = 1 << 14;

}  // namespace ensel::kernels
