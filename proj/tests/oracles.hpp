#pragma once

// Independent reference implementations used only by the tests. None of
// these share code with the library kernels they check.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "cpce/linalg.hpp"
#include "cpce/simulator.hpp"

namespace oracle {

using cd = std::complex<double>;

// Dense complex square matrix, row-major.
struct Dense {
  std::size_t d = 0;
  std::vector<cd> a;

  explicit Dense(std::size_t dim) : d(dim), a(dim * dim) {}
  cd& operator()(std::size_t i, std::size_t j) { return a[i * d + j]; }
  cd operator()(std::size_t i, std::size_t j) const { return a[i * d + j]; }

  static Dense identity(std::size_t dim) {
    Dense m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline Dense mul(const Dense& x, const Dense& y) {
  Dense out(x.d);
  for (std::size_t i = 0; i < x.d; ++i)
    for (std::size_t k = 0; k < x.d; ++k)
      for (std::size_t j = 0; j < x.d; ++j) out(i, j) += x(i, k) * y(k, j);
  return out;
}

// x (kron) y with x acting on the high bits.
inline Dense kron(const Dense& x, const Dense& y) {
  Dense out(x.d * y.d);
  for (std::size_t i = 0; i < x.d; ++i)
    for (std::size_t j = 0; j < x.d; ++j)
      for (std::size_t k = 0; k < y.d; ++k)
        for (std::size_t l = 0; l < y.d; ++l) out(i * y.d + k, j * y.d + l) = x(i, j) * y(k, l);
  return out;
}

inline Dense single(char letter) {
  Dense m(2);
  switch (letter) {
    case 'I': m(0, 0) = 1; m(1, 1) = 1; break;
    case 'X': m(0, 1) = 1; m(1, 0) = 1; break;
    case 'Y': m(0, 1) = cd(0, -1); m(1, 0) = cd(0, 1); break;
    case 'Z': m(0, 0) = 1; m(1, 1) = -1; break;
    default: throw std::invalid_argument("letter");
  }
  return m;
}

inline Dense ry(double theta) {
  Dense m(2);
  m(0, 0) = std::cos(theta / 2);
  m(0, 1) = -std::sin(theta / 2);
  m(1, 0) = std::sin(theta / 2);
  m(1, 1) = std::cos(theta / 2);
  return m;
}

// One-qubit gate g on qubit q of an eta-qubit register. Qubit 0 is the
// least-significant bit, i.e. the rightmost Kronecker factor.
inline Dense embed(const Dense& g, std::size_t q, std::size_t eta) {
  Dense out = Dense::identity(1);
  for (std::size_t k = eta; k-- > 0;) out = kron(out, k == q ? g : Dense::identity(2));
  return out;
}

// CZ from projectors: |0><0| (x) I + |1><1| (x) Z on the two qubits.
inline Dense cz(std::size_t q1, std::size_t q2, std::size_t eta) {
  Dense p0(2), p1(2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  Dense a = mul(embed(p0, q1, eta), Dense::identity(1 << eta));
  Dense b = mul(embed(p1, q1, eta), embed(single('Z'), q2, eta));
  for (std::size_t k = 0; k < a.a.size(); ++k) a.a[k] += b.a[k];
  return a;
}

inline Dense pauli(const std::string& letters) {
  Dense out = Dense::identity(1);
  for (std::size_t k = letters.size(); k-- > 0;) out = kron(out, single(letters[k]));
  return out;
}

// Full circuit unitary for the ring ansatz, written out gate by gate.
inline Dense hea_unitary(std::size_t eta, std::size_t layers, const std::vector<double>& theta) {
  Dense u = Dense::identity(std::size_t{1} << eta);
  for (std::size_t l = 0; l < layers; ++l) {
    for (std::size_t j = 0; j < eta; ++j) u = mul(embed(ry(theta[l * eta + j]), j, eta), u);
    if (eta == 2) {
      u = mul(cz(0, 1, 2), u);
    } else if (eta > 2) {
      for (std::size_t i = 0; i < eta; ++i) u = mul(cz(i, (i + 1) % eta, eta), u);
    }
  }
  return u;
}

inline std::vector<cd> first_column(const Dense& u) {
  std::vector<cd> v(u.d);
  for (std::size_t i = 0; i < u.d; ++i) v[i] = u(i, 0);
  return v;
}

inline cd sandwich(const std::vector<cd>& psi, const Dense& op) {
  cd sum = 0;
  for (std::size_t i = 0; i < op.d; ++i)
    for (std::size_t j = 0; j < op.d; ++j) sum += std::conj(psi[i]) * op(i, j) * psi[j];
  return sum;
}

// Gauss-Jordan inverse with partial pivoting on a plain row-major array.
inline std::vector<double> gauss_inverse(const std::vector<double>& m, std::size_t n) {
  std::vector<double> a = m, inv(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    for (std::size_t k = 0; k < n; ++k) {
      std::swap(a[col * n + k], a[piv * n + k]);
      std::swap(inv[col * n + k], inv[piv * n + k]);
    }
    const double p = a[col * n + col];
    for (std::size_t k = 0; k < n; ++k) {
      a[col * n + k] /= p;
      inv[col * n + k] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r * n + col];
      for (std::size_t k = 0; k < n; ++k) {
        a[r * n + k] -= f * a[col * n + k];
        inv[r * n + k] -= f * inv[col * n + k];
      }
    }
  }
  return inv;
}

inline double central_difference(const std::function<double(double)>& f, double x,
                                 double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

// Central difference of a loss in every angle.
inline std::vector<double> fd_gradient(const std::function<double(const cpce::ParamSet&)>& loss,
                                       const cpce::ParamSet& p, double h = 1e-5) {
  std::vector<double> g(p.size());
  cpce::ParamSet q = p;
  for (std::size_t mu = 0; mu < p.size(); ++mu) {
    q[mu] = p[mu] + h;
    const double up = loss(q);
    q[mu] = p[mu] - h;
    const double down = loss(q);
    q[mu] = p[mu];
    g[mu] = (up - down) / (2 * h);
  }
  return g;
}

}  // namespace oracle
