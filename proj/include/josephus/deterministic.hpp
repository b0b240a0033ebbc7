#pragma once

#include <cstdint>
#include <vector>

#include "josephus/rational.hpp"

// Classical (every-second-person) Josephus survivor.
namespace josephus::det {

struct DeterministicSurvivor {
  std::uint64_t n_participants = 0;
  std::uint64_t survivor_zero_based = 0;  // a_N
  std::uint64_t survivor_one_based = 0;   // b_N = a_N + 1

  friend bool operator==(const DeterministicSurvivor&, const DeterministicSurvivor&) = default;
};

// b_N = 2 b_{floor(N/2)} - (-1)^N, b_1 = 1, walked along the halving chain.
DeterministicSurvivor survivor_recurrence(std::uint64_t n);

// N = 2^m + l with 0 <= l < 2^m gives b_N = 2l + 1.
DeterministicSurvivor survivor_closed_form(std::uint64_t n);

// b_N is N's binary expansion rotated left by one digit.
DeterministicSurvivor survivor_binary_rotation(std::uint64_t n);

// Truncated formal power series with exact integer coefficients.
class TruncatedSeries {
 public:
  explicit TruncatedSeries(std::size_t max_degree);
  TruncatedSeries(std::size_t max_degree, std::vector<BigInt> coefficients);

  std::size_t max_degree() const { return coeffs_.size() - 1; }
  const BigInt& operator[](std::size_t k) const { return coeffs_[k]; }
  BigInt& operator[](std::size_t k) { return coeffs_[k]; }
  const std::vector<BigInt>& coefficients() const { return coeffs_; }

  // Multiplicative inverse; the constant term must be +1 or -1.
  TruncatedSeries inverse() const;

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b);
  friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b);
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b);

 private:
  std::vector<BigInt> coeffs_;
};

// Coefficients x^0 .. x^max_degree of
//   1 + (1/(1-x)) * ((3x-1)/(1-x) - sum_{k>=1} 2^k x^(2^k)).
// The coefficient of x^N equals b_N for every N >= 1.
std::vector<BigInt> generating_series_coefficients(std::size_t max_degree);

}  // namespace josephus::det
