// Copyright 2026 The Milq Authors
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
//
// Test-only reference implementations. Everything here takes an
// independent numerical route (quadrature, hand-rolled elimination,
// closed-form eigenpairs) from the library code it checks.

#ifndef MILQ_TESTS_ORACLES_HPP_
#define MILQ_TESTS_ORACLES_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracles {

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature.

inline double simpson_slice(double a, double fa, double b, double fb,
                            double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double fa, double b, double fb,
                                   double m, double fm, double whole,
                                   double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_slice(a, fa, m, fm, flm);
  const double right = simpson_slice(m, fm, b, fb, frm);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0,
                              depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0,
                              depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-11) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson_slice(a, fa, b, fb, fm);
  return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

// ---------------------------------------------------------------------------
// Scalar Gaussian helpers (plain formulas, no library code).

inline double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * M_PI * var) + d * d / var);
}

// KL(p || q) for scalar Gaussians by numerical quadrature of p ln(p/q).
inline double kl_quadrature_1d(double mean_p, double var_p, double mean_q,
                               double var_q, double tol = 1e-11) {
  const double sd = std::sqrt(var_p);
  const double lo = mean_p - 14.0 * sd, hi = mean_p + 14.0 * sd;
  return integrate(
      [&](double x) {
        const double lp = log_normal_pdf(x, mean_p, var_p);
        const double lq = log_normal_pdf(x, mean_q, var_q);
        return std::exp(lp) * (lp - lq);
      },
      lo, hi, tol);
}

// Mixture MI for two scalar Gaussians by quadrature:
// sum_b alpha_b int p_b ln(p_b / (a0 p0 + a1 p1)).
inline double mi_mixture_quadrature_1d(double m0, double v0, double m1,
                                       double v1, double alpha1) {
  const double alpha0 = 1.0 - alpha1;
  const auto log_mix = [&](double x) {
    const double a = std::log(alpha0) + log_normal_pdf(x, m0, v0);
    const double b = std::log(alpha1) + log_normal_pdf(x, m1, v1);
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
  };
  double total = 0.0;
  const double sd0 = std::sqrt(v0), sd1 = std::sqrt(v1);
  {
    const double lo = m0 - 14.0 * sd0, hi = m0 + 14.0 * sd0;
    total += alpha0 * integrate(
                          [&](double x) {
                            const double lp = log_normal_pdf(x, m0, v0);
                            return std::exp(lp) * (lp - log_mix(x));
                          },
                          lo, hi);
  }
  {
    const double lo = m1 - 14.0 * sd1, hi = m1 + 14.0 * sd1;
    total += alpha1 * integrate(
                          [&](double x) {
                            const double lp = log_normal_pdf(x, m1, v1);
                            return std::exp(lp) * (lp - log_mix(x));
                          },
                          lo, hi);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Bivariate Gaussian log-pdf and tensor-Simpson KL for 2-D checks.

struct Gaussian2 {
  double mean[2];
  double cov[2][2];

  double log_pdf(double x0, double x1) const {
    const double det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
    const double i00 = cov[1][1] / det, i11 = cov[0][0] / det;
    const double i01 = -cov[0][1] / det;
    const double d0 = x0 - mean[0], d1 = x1 - mean[1];
    const double quad = d0 * d0 * i00 + 2.0 * d0 * d1 * i01 + d1 * d1 * i11;
    return -std::log(2.0 * M_PI) - 0.5 * std::log(det) - 0.5 * quad;
  }
};

// Composite Simpson over a +-10 sigma box around p's mean.
inline double kl_simpson_2d(const Gaussian2& p, const Gaussian2& q,
                            int points_per_axis = 241) {
  const int n = points_per_axis | 1;  // odd
  const double sd0 = std::sqrt(p.cov[0][0]), sd1 = std::sqrt(p.cov[1][1]);
  const double lo0 = p.mean[0] - 10.0 * sd0, hi0 = p.mean[0] + 10.0 * sd0;
  const double lo1 = p.mean[1] - 10.0 * sd1, hi1 = p.mean[1] + 10.0 * sd1;
  const double h0 = (hi0 - lo0) / (n - 1), h1 = (hi1 - lo1) / (n - 1);

  const auto weight = [n](int i) {
    if (i == 0 || i == n - 1) return 1.0;
    return (i % 2 == 1) ? 4.0 : 2.0;
  };

  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x0 = lo0 + i * h0;
    double inner = 0.0;
    for (int j = 0; j < n; ++j) {
      const double x1 = lo1 + j * h1;
      const double lp = p.log_pdf(x0, x1);
      const double lq = q.log_pdf(x0, x1);
      inner += weight(j) * std::exp(lp) * (lp - lq);
    }
    sum += weight(i) * inner;
  }
  return sum * h0 * h1 / 9.0;
}

// ---------------------------------------------------------------------------
// Dense linear solve by Gaussian elimination with partial pivoting.

inline std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0) {
      throw std::runtime_error("solve_dense: singular matrix");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double acc = b[r];
    for (std::size_t c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}

// ---------------------------------------------------------------------------
// Closed-form eigenpairs of a symmetric 2x2 matrix, descending order.

struct Eig2 {
  double values[2];
  double vectors[2][2];  // vectors[k] is the unit eigenvector of values[k]
};

inline Eig2 eig_sym_2x2(double a, double b, double c) {
  Eig2 out;
  const double tr = a + c;
  const double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  out.values[0] = 0.5 * tr + disc;
  out.values[1] = 0.5 * tr - disc;
  for (int k = 0; k < 2; ++k) {
    double v0, v1;
    if (std::abs(b) > 1e-300) {
      v0 = b;
      v1 = out.values[k] - a;
    } else {
      v0 = (k == 0) == (a >= c) ? 1.0 : 0.0;
      v1 = 1.0 - v0;
    }
    const double norm = std::sqrt(v0 * v0 + v1 * v1);
    out.vectors[k][0] = v0 / norm;
    out.vectors[k][1] = v1 / norm;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Temporary directory fixture.

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("milq_test_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace oracles

#endif  // MILQ_TESTS_ORACLES_HPP_
