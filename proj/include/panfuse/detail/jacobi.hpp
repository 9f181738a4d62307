#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace panfuse::detail {

template <typename T>
struct SymmetricEigen {
  std::vector<T> values;   // unsorted
  std::vector<T> vectors;  // column k = eigenvector of values[k], row-major n*n
};

// Cyclic Jacobi rotations for a small symmetric matrix (band covariances are
// a handful of rows). Deterministic sweep order.
template <typename T>
SymmetricEigen<T> jacobi_symmetric(std::vector<T> a, std::size_t n) {
  std::vector<T> v(n * n, T(0));
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = T(1);

  auto off_norm = [&] {
    T s{};
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += a[p * n + q] * a[p * n + q];
    return s;
  };
  T scale{};
  for (std::size_t i = 0; i < n * n; ++i) scale += a[i] * a[i];

  for (int sweep = 0; sweep < 64 && off_norm() > scale * T(1e-30); ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const T apq = a[p * n + q];
        if (std::abs(apq) == T(0)) continue;
        const T beta = (a[q * n + q] - a[p * n + p]) / (T(2) * apq);
        const T t = (beta >= T(0) ? T(1) : T(-1)) /
                    (std::abs(beta) + std::sqrt(beta * beta + T(1)));
        const T c = T(1) / std::sqrt(t * t + T(1));
        const T s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const T akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const T apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const T vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<T> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a[i * n + i];
  return {std::move(values), std::move(v)};
}

}  // namespace panfuse::detail
