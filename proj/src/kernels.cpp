#include "ensel/kernels.hpp"

#include <cstdint>

namespace ensel::kernels {

namespace {

inline double weight_total(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  return total;
}

inline double average_at(std::span<const std::span<const double>> members, std::span<const double> weights,
                         double total, std::size_t i) {
  double acc = 0.0;
  for (std::size_t k = 0; k < members.size(); ++k) acc += weights[k] * members[k][i];
  return acc / total;
}

}  // namespace

namespace serial {

void weighted_average(std::span<const std::span<const double>> members, std::span<const double> weights,
                      std::span<double> out) {
  const double total = weight_total(weights);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = average_at(members, weights, total, i);
}

void blend(std::span<const double> combined, double weight_sum, std::span<const double> added, double w,
           std::span<double> out) {
  const double denom = weight_sum + w;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (weight_sum * combined[i] + w * added[i]) / denom;
}

}  // namespace serial

namespace omp {

void weighted_average(std::span<const std::span<const double>> members, std::span<const double> weights,
                      std::span<double> out) {
  const double total = weight_total(weights);
  const auto n = static_cast<std::int64_t>(out.size());
  const bool big = out.size() * members.size() >= kParallelGrain;
#pragma omp parallel for schedule(static) if (big)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = average_at(members, weights, total, static_cast<std::size_t>(i));
  }
}

void blend(std::span<const double> combined, double weight_sum, std::span<const double> added, double w,
           std::span<double> out) {
  const double denom = weight_sum + w;
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) if (out.size() >= kParallelGrain)
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = (weight_sum * combined[i] + w * added[i]) / denom;
  }
}

}  // namespace omp

PairSums raw_sums(std::span<const double> a, std::span<const double> b) {
  PairSums s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s.aa += a[i] * a[i];
    s.bb += b[i] * b[i];
    s.ab += a[i] * b[i];
  }
  return s;
}

PairSums centered_sums(std::span<const double> a, std::span<const double> b) {
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  const auto n = static_cast<double>(a.size());
  ma /= n;
  mb /= n;
  PairSums s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double da = a[i] - ma, db = b[i] - mb;
    s.aa += da * da;
    s.bb += db * db;
    s.ab += da * db;
  }
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace ensel::kernels
