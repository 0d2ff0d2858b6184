#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace archmx {

using Rng = std::mt19937_64;

/// Counter-based seed derivation (splitmix64 finalizer chained over the keys).
/// Same keys give the same seed regardless of call order or thread.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept;

double normal_cdf(double x) noexcept;

double mean(std::span<const double> xs) noexcept;

/// Unbiased sample variance (n-1 denominator).
double sample_variance(std::span<const double> xs) noexcept;

/// Two-sided one-sample KS statistic D_n of xs against the standard normal CDF.
double ks_statistic_normal(std::span<const double> xs);

/// Two-sided one-sample KS statistic D_n of xs against Uniform(0,1).
double ks_statistic_uniform(std::span<const double> xs);

/// Asymptotic Kolmogorov survival function P(K > sqrt(n) D) with the
/// Stephens small-sample correction.
double kolmogorov_pvalue(double d, std::size_t n) noexcept;

/// 64-bit FNV-1a, used for input fingerprints in reports.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes) noexcept;

}  // namespace archmx
