#pragma once

#include <span>
#include <vector>

namespace mgsolve {

// Euclidean projection onto the probability simplex {p >= 0, sum p = 1}.
//
// Sort-based threshold method: with v sorted descending, find the largest k
// such that v_(k) - (sum_{i<=k} v_(i) - 1) / k > 0 and subtract that
// threshold, clipping at zero. Throws InvalidArgument on empty or
// non-finite input.
std::vector<double> ProjectSimplex(std::span<const double> v);

// Same, writing into `out` (which may alias `v`). `scratch` is reused across
// calls to avoid allocation in hot loops.
void ProjectSimplexInto(std::span<const double> v, std::span<double> out,
                        std::vector<double>& scratch);

// (1 - weight) * accumulator + weight * sample.
std::vector<double> MixInto(std::span<const double> accumulator, std::span<const double> sample,
                            double weight);

// In-place variant used by the running averages.
void MixInPlace(std::span<double> accumulator, std::span<const double> sample, double weight);

}  // namespace mgsolve
