#pragma once

#include <span>
#include <vector>

namespace prl {

double mean(std::span<const double> xs);

/// Standard error of the mean; NaN for fewer than two samples.
double standard_error(std::span<const double> xs);

/// Spearman rank correlation with average ranks for ties; NaN when either
/// series is constant or shorter than two points.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Shannon entropy (nats) of the empirical distribution given by counts.
double entropy(std::span<const long long> counts);

}  // namespace prl
