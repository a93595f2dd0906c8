#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "gbs/types.hpp"

namespace gbs {

// Photon-count outcome of a measurement, one entry per mode.
struct PhotonPattern {
  std::vector<int> counts;

  PhotonPattern() = default;
  explicit PhotonPattern(std::vector<int> c) : counts(std::move(c)) {
    for (int v : counts)
      if (v < 0) throw validation_error("PhotonPattern: negative count");
  }

  int modes() const { return int(counts.size()); }

  int total() const {
    int k = 0;
    for (int v : counts) k += v;
    return k;
  }

  bool is_binary() const {
    for (int v : counts)
      if (v > 1) return false;
    return true;
  }
};

namespace detail {

// Compensated accumulator; keeps subset sums deterministic and tight.
template <typename Scalar>
struct Kahan {
  Scalar sum{0}, carry{0};
  void add(const Scalar& v) {
    Scalar y = v - carry;
    Scalar t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

template <typename Scalar>
void check_symmetric(const MatrixX<Scalar>& m, const char* who) {
  if (m.rows() != m.cols()) throw validation_error(std::string(who) + ": matrix not square");
  if (m.size() == 0) return;
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale)
    throw validation_error(std::string(who) + ": matrix not symmetric (max deviation " +
                           std::to_string(asym) + ")");
}

// Coefficient of x^v in exp(sum_k a_k x^k), a indexed from 1.
template <typename Scalar>
Scalar exp_series_coeff(const std::vector<Scalar>& a, int v) {
  std::vector<Scalar> f(v + 1, Scalar(0));
  f[0] = Scalar(1);
  for (int j = 1; j <= v; ++j) {
    Scalar s(0);
    for (int k = 1; k <= j; ++k) s += double(k) * a[k] * f[j - k];
    f[j] = s / double(j);
  }
  return f[v];
}

// Swap adjacent row pairs in place: rows (2i, 2i+1) exchange.  Equivalent to
// left-multiplying by the direct sum of s copies of [[0,1],[1,0]].
template <typename Scalar>
void swap_row_pairs(MatrixX<Scalar>& b) {
  for (int i = 0; i + 1 < b.rows(); i += 2) b.row(i).swap(b.row(i + 1));
}

// Inclusion-exclusion power-trace evaluation shared by hafnian and
// loop_hafnian.  `a` must be symmetric with even dimension; `loops` selects
// whether diagonal (loop) contributions enter.
template <typename Scalar>
Scalar powertrace_hafnian(const MatrixX<Scalar>& a, bool loops) {
  const int n = int(a.rows());
  const int v = n / 2;
  if (n == 0) return Scalar(1);

  Kahan<Scalar> acc;
  std::vector<int> pairs;
  pairs.reserve(v);
  for (std::uint64_t mask = 1; mask < (1ull << v); ++mask) {
    pairs.clear();
    for (int j = 0; j < v; ++j)
      if (mask & (1ull << j)) pairs.push_back(j);
    const int s = int(pairs.size());

    MatrixX<Scalar> sub(2 * s, 2 * s);
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c) {
        sub(2 * r, 2 * c) = a(2 * pairs[r], 2 * pairs[c]);
        sub(2 * r, 2 * c + 1) = a(2 * pairs[r], 2 * pairs[c] + 1);
        sub(2 * r + 1, 2 * c) = a(2 * pairs[r] + 1, 2 * pairs[c]);
        sub(2 * r + 1, 2 * c + 1) = a(2 * pairs[r] + 1, 2 * pairs[c] + 1);
      }

    VectorX<Scalar> u;
    if (loops) {
      u = sub.diagonal();
    }
    swap_row_pairs(sub);  // sub is now X * A_S

    std::vector<Scalar> coeff(v + 1, Scalar(0));
    MatrixX<Scalar> power = sub;
    VectorX<Scalar> y;
    if (loops) {
      y = u;
      for (int i = 0; i + 1 < y.size(); i += 2) std::swap(y(i), y(i + 1));  // y = X u
    }
    for (int k = 1; k <= v; ++k) {
      coeff[k] = power.trace() / double(2 * k);
      if (loops) coeff[k] += u.cwiseProduct(y).sum() / 2.0;  // u^T (XA)^{k-1} X u, no conjugation
      if (k < v) {
        power = power * sub;
        if (loops) y = sub * y;
      }
    }

    Scalar term = exp_series_coeff(coeff, v);
    acc.add(((v - s) % 2 == 0) ? term : -term);
  }
  return acc.sum;
}

template <typename Scalar>
Scalar hafnian_enum_rec(const MatrixX<Scalar>& a, std::vector<int>& idx, bool loops) {
  if (idx.empty()) return Scalar(1);
  const int i0 = idx[0];
  Scalar total(0);
  std::vector<int> rest(idx.begin() + 1, idx.end());
  if (loops) {
    total += a(i0, i0) * hafnian_enum_rec(a, rest, loops);
  }
  for (std::size_t j = 0; j < rest.size(); ++j) {
    std::vector<int> next;
    next.reserve(rest.size() - 1);
    for (std::size_t t = 0; t < rest.size(); ++t)
      if (t != j) next.push_back(rest[t]);
    total += a(i0, rest[j]) * hafnian_enum_rec(a, next, loops);
  }
  return total;
}

}  // namespace detail

// Submatrix of a 2m x 2m doubled matrix selecting row/column i with
// multiplicity counts[i] in the first half and i+m with the same multiplicity
// in the second half.  Result is 2k x 2k with k = total().
template <typename Derived>
MatrixX<typename Derived::Scalar> reduce_doubled(const Eigen::MatrixBase<Derived>& m,
                                                 const PhotonPattern& s) {
  using Scalar = typename Derived::Scalar;
  const int modes = s.modes();
  if (m.rows() != 2 * modes || m.cols() != 2 * modes)
    throw validation_error("reduce_doubled: matrix is " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()) + " but pattern has " +
                           std::to_string(modes) + " modes");
  std::vector<int> idx;
  idx.reserve(2 * s.total());
  for (int i = 0; i < modes; ++i)
    for (int r = 0; r < s.counts[i]; ++r) idx.push_back(i);
  const int k = int(idx.size());
  MatrixX<Scalar> out(2 * k, 2 * k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) {
      out(r, c) = m(idx[r], idx[c]);
      out(r, k + c) = m(idx[r], modes + idx[c]);
      out(k + r, c) = m(modes + idx[r], idx[c]);
      out(k + r, k + c) = m(modes + idx[r], modes + idx[c]);
    }
  return out;
}

// Single-index reduction: row/column i repeated counts[i] times.
template <typename Derived>
MatrixX<typename Derived::Scalar> reduce_single(const Eigen::MatrixBase<Derived>& m,
                                                const PhotonPattern& s) {
  using Scalar = typename Derived::Scalar;
  const int modes = s.modes();
  if (m.rows() != modes || m.cols() != modes)
    throw validation_error("reduce_single: matrix is " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()) + " but pattern has " +
                           std::to_string(modes) + " modes");
  std::vector<int> idx;
  idx.reserve(s.total());
  for (int i = 0; i < modes; ++i)
    for (int r = 0; r < s.counts[i]; ++r) idx.push_back(i);
  const int k = int(idx.size());
  MatrixX<Scalar> out(k, k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) out(r, c) = m(idx[r], idx[c]);
  return out;
}

// Hafnian of a symmetric matrix: sum over perfect matchings of products of
// matched entries.  Diagonal entries never participate and are ignored.
// Empty matrix -> 1, odd dimension -> 0.  Power-trace inclusion-exclusion,
// O(2^(n/2) n^4); practical to n ~ 26.
template <typename Derived>
typename Derived::Scalar hafnian(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> a = m;
  detail::check_symmetric(a, "hafnian");
  if (a.rows() % 2 != 0) return Scalar(0);
  a = ((a + a.transpose()) / 2.0).eval();
  a.diagonal().setZero();
  return detail::powertrace_hafnian(a, /*loops=*/false);
}

// Reference hafnian by direct perfect-matching enumeration, O((n-1)!!).
// Practical to n ~ 12; kept as the independent slow route.
template <typename Derived>
typename Derived::Scalar hafnian_enum(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> a = m;
  detail::check_symmetric(a, "hafnian_enum");
  if (a.rows() % 2 != 0) return Scalar(0);
  if (a.rows() == 0) return Scalar(1);
  std::vector<int> idx(a.rows());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = int(i);
  return detail::hafnian_enum_rec(a, idx, /*loops=*/false);
}

// Loop hafnian: sum over matchings with loops (involutions); diagonal entries
// weight the loops.  Odd dimension is handled by padding with a unit-diagonal
// mode, which leaves the value unchanged.
template <typename Derived>
typename Derived::Scalar loop_hafnian(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> a = m;
  detail::check_symmetric(a, "loop_hafnian");
  a = ((a + a.transpose()) / 2.0).eval();
  if (a.rows() % 2 != 0) {
    const int n = int(a.rows());
    MatrixX<Scalar> padded = MatrixX<Scalar>::Zero(n + 1, n + 1);
    padded.topLeftCorner(n, n) = a;
    padded(n, n) = Scalar(1);
    a.swap(padded);
  }
  return detail::powertrace_hafnian(a, /*loops=*/true);
}

// Reference loop hafnian by involution enumeration; practical to n ~ 10.
template <typename Derived>
typename Derived::Scalar loop_hafnian_enum(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> a = m;
  detail::check_symmetric(a, "loop_hafnian_enum");
  if (a.rows() == 0) return Scalar(1);
  std::vector<int> idx(a.rows());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = int(i);
  return detail::hafnian_enum_rec(a, idx, /*loops=*/true);
}

// Permanent via Ryser's formula with Gray-code row-sum updates, O(2^n n).
template <typename Derived>
typename Derived::Scalar permanent(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw validation_error("permanent: matrix not square");
  const int n = int(m.rows());
  if (n == 0) return Scalar(1);
  if (n > 30) throw resource_error("permanent: dimension " + std::to_string(n) + " exceeds guard (30)");
  MatrixX<Scalar> a = m;
  VectorX<Scalar> rowsum = VectorX<Scalar>::Zero(n);
  detail::Kahan<Scalar> acc;
  std::uint64_t gray = 0;
  for (std::uint64_t i = 1; i < (1ull << n); ++i) {
    std::uint64_t next = i ^ (i >> 1);
    std::uint64_t changed = next ^ gray;
    int j = std::countr_zero(changed);
    if (next & changed)
      rowsum += a.col(j);
    else
      rowsum -= a.col(j);
    gray = next;
    Scalar prod(1);
    for (int r = 0; r < n; ++r) prod *= rowsum(r);
    int bits = std::popcount(gray);
    acc.add(((n - bits) % 2 == 0) ? prod : -prod);
  }
  return acc.sum;
}

// Torontonian of a 2n x 2n Hermitian matrix O with doubled index convention
// (mode i <-> rows i and i+n):
//   Tor(O) = sum over Z subset of [n] of (-1)^(n-|Z|) / sqrt(det(I - O_Z))
// where O_Z keeps rows/columns Z and Z+n.  Each I - O_Z must be positive
// definite (true for O = I - Q^{-1} of a physical state); its Cholesky factor
// gives a real positive determinant, which is the principal branch.
template <typename Derived>
double torontonian(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> o = m;
  if (o.rows() != o.cols() || o.rows() % 2 != 0)
    throw validation_error("torontonian: matrix must be square with even dimension");
  const int n = int(o.rows()) / 2;
  double scale = o.size() == 0 ? 0.0 : o.cwiseAbs().maxCoeff();
  if (o.size() > 0 && (o - o.adjoint()).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, scale))
    throw validation_error("torontonian: matrix not Hermitian");
  if (n > 24) throw resource_error("torontonian: " + std::to_string(n) + " modes exceeds guard (24)");

  detail::Kahan<double> acc;
  std::vector<int> keep;
  keep.reserve(n);
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    keep.clear();
    for (int j = 0; j < n; ++j)
      if (mask & (1ull << j)) keep.push_back(j);
    const int s = int(keep.size());
    double det = 1.0;
    if (s > 0) {
      MatrixX<Scalar> block(2 * s, 2 * s);
      for (int r = 0; r < s; ++r)
        for (int c = 0; c < s; ++c) {
          block(r, c) = -o(keep[r], keep[c]);
          block(r, s + c) = -o(keep[r], n + keep[c]);
          block(s + r, c) = -o(n + keep[r], keep[c]);
          block(s + r, s + c) = -o(n + keep[r], n + keep[c]);
        }
      block.diagonal().array() += Scalar(1);
      Eigen::LLT<MatrixX<Scalar>> llt(block);
      if (llt.info() != Eigen::Success)
        throw numeric_error("torontonian: I - O_Z not positive definite");
      det = 1.0;
      for (int r = 0; r < 2 * s; ++r) det *= std::real(Scalar(llt.matrixLLT()(r, r)));
      det = det * det;
    }
    double term = 1.0 / std::sqrt(det);
    acc.add(((n - s) % 2 == 0) ? term : -term);
  }
  return acc.sum;
}

}  // namespace gbs
