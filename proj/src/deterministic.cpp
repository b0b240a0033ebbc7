#include "josephus/deterministic.hpp"

#include <algorithm>
#include <bit>

#include "josephus/errors.hpp"

namespace josephus::det {
namespace {

void require_positive(std::uint64_t n) {
  if (n == 0) throw DomainError("the number of participants must be at least 1");
}

DeterministicSurvivor make(std::uint64_t n, std::uint64_t b) { return {n, b - 1, b}; }

}  // namespace

DeterministicSurvivor survivor_recurrence(std::uint64_t n) {
  require_positive(n);
  // Parities along N, N/2, N/4, ..., 2; unwinding them from b_1 = 1 applies
  // the recurrence once per link of the chain.
  std::vector<bool> odd;
  for (std::uint64_t m = n; m > 1; m /= 2) odd.push_back(m % 2 == 1);
  std::uint64_t b = 1;
  for (auto it = odd.rbegin(); it != odd.rend(); ++it) b = *it ? 2 * b + 1 : 2 * b - 1;
  return make(n, b);
}

DeterministicSurvivor survivor_closed_form(std::uint64_t n) {
  require_positive(n);
  const std::uint64_t power = std::bit_floor(n);
  const std::uint64_t l = n - power;
  return make(n, 2 * l + 1);
}

DeterministicSurvivor survivor_binary_rotation(std::uint64_t n) {
  require_positive(n);
  const int width = std::bit_width(n);
  const std::uint64_t top = std::uint64_t{1} << (width - 1);
  // Drop the leading digit c_k, shift the rest up and append c_k = 1.
  return make(n, ((n - top) << 1) | 1);
}

TruncatedSeries::TruncatedSeries(std::size_t max_degree) : coeffs_(max_degree + 1) {}

TruncatedSeries::TruncatedSeries(std::size_t max_degree, std::vector<BigInt> coefficients)
    : coeffs_(std::move(coefficients)) {
  coeffs_.resize(max_degree + 1);
}

TruncatedSeries TruncatedSeries::inverse() const {
  const BigInt& c0 = coeffs_[0];
  if (c0 != 1 && c0 != -1) {
    throw DomainError("series inverse over the integers needs a unit constant term");
  }
  TruncatedSeries inv(max_degree());
  inv[0] = c0;  // 1/c0 == c0 for c0 = +-1
  for (std::size_t k = 1; k <= max_degree(); ++k) {
    BigInt acc = 0;
    for (std::size_t j = 1; j <= k; ++j) {
      if (!coeffs_[j].is_zero()) acc += coeffs_[j] * inv[k - j];
    }
    inv[k] = -acc * c0;
  }
  return inv;
}

TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
  TruncatedSeries out(std::min(a.max_degree(), b.max_degree()));
  for (std::size_t k = 0; k <= out.max_degree(); ++k) out[k] = a[k] + b[k];
  return out;
}

TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
  TruncatedSeries out(std::min(a.max_degree(), b.max_degree()));
  for (std::size_t k = 0; k <= out.max_degree(); ++k) out[k] = a[k] - b[k];
  return out;
}

TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
  TruncatedSeries out(std::min(a.max_degree(), b.max_degree()));
  const std::size_t d = out.max_degree();
  for (std::size_t i = 0; i <= d; ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; i + j <= d; ++j) {
      if (!b[j].is_zero()) out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

std::vector<BigInt> generating_series_coefficients(std::size_t max_degree) {
  if (max_degree == 0) throw DomainError("max_degree must be at least 1");
  const std::size_t d = max_degree;

  TruncatedSeries one(d);
  one[0] = 1;
  TruncatedSeries one_minus_x(d);
  one_minus_x[0] = 1;
  one_minus_x[1] = -1;
  TruncatedSeries three_x_minus_one(d);
  three_x_minus_one[0] = -1;
  three_x_minus_one[1] = 3;

  TruncatedSeries powers(d);
  for (std::size_t k = 2; k <= d; k *= 2) powers[k] = BigInt(k);  // 2^j x^(2^j)

  const TruncatedSeries geometric = one_minus_x.inverse();
  const TruncatedSeries series = one + geometric * (three_x_minus_one * geometric - powers);
  return series.coefficients();
}

}  // namespace josephus::det
