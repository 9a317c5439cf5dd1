// Copyright 2026 clusterps Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CLUSTERPS_STATS_H
#define CLUSTERPS_STATS_H

#include <cstdint>
#include <vector>

namespace clusterps {

// Two-sided z for 95% coverage.
inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const { return lo <= x && x <= hi; }
    bool overlaps(const Interval &other) const { return lo <= other.hi && other.lo <= hi; }
};

/// Wilson score interval for a binomial proportion. trials must be >= 1.
Interval wilson_interval(uint64_t successes, uint64_t trials, double z = kZ95);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

/// Ordinary least squares y = slope*x + intercept. Needs >= 2 points with at
/// least two distinct x. r_squared is 1 when the residuals vanish, including
/// the degenerate all-equal-y case.
LinearFit linear_fit(const std::vector<double> &xs, const std::vector<double> &ys);

/// Empirical quantile with linear interpolation over the sorted sample;
/// q in [0, 1]. The input must be sorted ascending and non-empty.
double sorted_quantile(const std::vector<double> &sorted, double q);

}  // namespace clusterps

#endif
