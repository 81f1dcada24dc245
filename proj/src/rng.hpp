#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace fmb::detail {

/// Independent stream per (seed, index); the result does not depend on
/// which thread consumes it.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

/// Circular complex Gaussian with E|z|^2 = variance.
class CircularNormal {
public:
  explicit CircularNormal(double variance) : dist_(0.0, std::sqrt(variance / 2.0)) {}

  template <class Engine> std::complex<double> operator()(Engine& eng) {
    const double re = dist_(eng);
    const double im = dist_(eng);
    return {re, im};
  }

private:
  std::normal_distribution<double> dist_;
};

} // namespace fmb::detail
