#include "mgsolve/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "mgsolve/game.hpp"

namespace mgsolve {

void ProjectSimplexInto(std::span<const double> v, std::span<double> out,
                        std::vector<double>& scratch) {
  const std::size_t n = v.size();
  if (n == 0) throw InvalidArgument("ProjectSimplex: empty vector");
  if (out.size() != n) throw InvalidArgument("ProjectSimplex: output size mismatch");
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidArgument("ProjectSimplex: non-finite entry");
  }
  if (n == 1) {
    out[0] = 1.0;
    return;
  }

  // The threshold depends only on the sorted values, so the order among
  // equal entries does not matter.
  scratch.assign(v.begin(), v.end());
  std::sort(scratch.begin(), scratch.end(), std::greater<>());
  double prefix = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    prefix += scratch[k];
    const double candidate = (prefix - 1.0) / static_cast<double>(k + 1);
    if (scratch[k] - candidate > 0.0) theta = candidate;
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double p = v[i] - theta;
    if (p < 0.0) p = 0.0;
    out[i] = p;
    sum += p;
  }
  // Rounding cleanup: keep the output exactly on the simplex up to one ulp.
  if (sum != 1.0) {
    for (std::size_t i = 0; i < n; ++i) out[i] /= sum;
  }
}

std::vector<double> ProjectSimplex(std::span<const double> v) {
  std::vector<double> out(v.size());
  std::vector<double> scratch;
  ProjectSimplexInto(v, out, scratch);
  return out;
}

void MixInPlace(std::span<double> accumulator, std::span<const double> sample, double weight) {
  if (accumulator.size() != sample.size()) {
    throw InvalidArgument("MixInto: length mismatch (" + std::to_string(accumulator.size()) +
                          " vs " + std::to_string(sample.size()) + ")");
  }
  if (weight == 1.0) {
    std::copy(sample.begin(), sample.end(), accumulator.begin());
    return;
  }
  for (std::size_t i = 0; i < accumulator.size(); ++i) {
    accumulator[i] = (1.0 - weight) * accumulator[i] + weight * sample[i];
  }
}

std::vector<double> MixInto(std::span<const double> accumulator, std::span<const double> sample,
                            double weight) {
  std::vector<double> out(accumulator.begin(), accumulator.end());
  MixInPlace(out, sample, weight);
  return out;
}

}  // namespace mgsolve
