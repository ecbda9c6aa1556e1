#pragma once

#include <cstddef>
#include <vector>

namespace bwg {

/// First `keep` coefficients of a * b. FFT for large inputs, schoolbook
/// otherwise; negative rounding residue is not clipped.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b, std::size_t keep);

/// exp(g) for g_0 = 0, coefficients 0..g.size()-1, by divide-and-conquer
/// over the recurrence n f_n = sum_k k g_k f_{n-k}.
std::vector<double> exp_series(const std::vector<double>& g);

}  // namespace bwg
