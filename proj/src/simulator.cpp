#include "cpce/simulator.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cpce/errors.hpp"

namespace cpce {

PauliString::PauliString(std::vector<Pauli> letters) : letters_(std::move(letters)) {}

PauliString PauliString::parse(std::string_view text) {
  std::vector<Pauli> letters;
  letters.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case 'I': letters.push_back(Pauli::I); break;
      case 'X': letters.push_back(Pauli::X); break;
      case 'Y': letters.push_back(Pauli::Y); break;
      case 'Z': letters.push_back(Pauli::Z); break;
      default:
        throw std::invalid_argument(std::string("PauliString: bad letter '") + ch + "'");
    }
  }
  return PauliString(std::move(letters));
}

PauliString PauliString::on_sites(std::size_t length, Pauli letter,
                                  std::initializer_list<std::size_t> sites) {
  std::vector<Pauli> letters(length, Pauli::I);
  for (std::size_t site : sites) {
    if (site >= length) throw std::out_of_range("PauliString: site out of range");
    letters[site] = letter;
  }
  return PauliString(std::move(letters));
}

std::size_t PauliString::weight() const {
  std::size_t w = 0;
  for (Pauli p : letters_) w += (p != Pauli::I);
  return w;
}

std::string PauliString::to_string() const {
  static constexpr char kNames[] = {'I', 'X', 'Y', 'Z'};
  std::string s;
  s.reserve(letters_.size());
  for (Pauli p : letters_) s.push_back(kNames[static_cast<int>(p)]);
  return s;
}

std::uint64_t PauliString::flip_mask() const {
  std::uint64_t m = 0;
  for (std::size_t k = 0; k < letters_.size(); ++k)
    if (letters_[k] == Pauli::X || letters_[k] == Pauli::Y) m |= (std::uint64_t{1} << k);
  return m;
}

std::uint64_t PauliString::phase_mask() const {
  std::uint64_t m = 0;
  for (std::size_t k = 0; k < letters_.size(); ++k)
    if (letters_[k] == Pauli::Y || letters_[k] == Pauli::Z) m |= (std::uint64_t{1} << k);
  return m;
}

std::size_t PauliString::y_count() const {
  std::size_t c = 0;
  for (Pauli p : letters_) c += (p == Pauli::Y);
  return c;
}

StateVector::StateVector(std::size_t eta) : eta_(eta) {
  if (eta < 1 || eta > kMaxQubits)
    throw std::invalid_argument("StateVector: qubit count must lie in [1, 24]");
  amps_.assign(std::size_t{1} << eta, Amplitude{0.0, 0.0});
}

StateVector::StateVector(std::size_t eta, std::vector<Amplitude> amplitudes)
    : eta_(eta), amps_(std::move(amplitudes)) {
  if (eta < 1 || eta > kMaxQubits)
    throw std::invalid_argument("StateVector: qubit count must lie in [1, 24]");
  if (amps_.size() != (std::size_t{1} << eta))
    throw ShapeMismatch("StateVector: amplitude count must be 2^eta");
}

double StateVector::norm_squared() const {
  double sum = 0.0;
  for (const Amplitude& a : amps_) sum += std::norm(a);
  return sum;
}

StateVector init_zero(std::size_t eta) {
  StateVector s(eta);
  s.amplitudes()[0] = 1.0;
  return s;
}

void apply_ry(StateVector& state, std::size_t qubit, double angle) {
  if (qubit >= state.qubits()) throw std::out_of_range("apply_ry: qubit out of range");
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  const std::size_t stride = std::size_t{1} << qubit;
  auto amps = state.amplitudes();
  for (std::size_t base = 0; base < amps.size(); base += 2 * stride)
    for (std::size_t k = base; k < base + stride; ++k) {
      const Amplitude a0 = amps[k];
      const Amplitude a1 = amps[k + stride];
      amps[k] = c * a0 - s * a1;
      amps[k + stride] = s * a0 + c * a1;
    }
}

void apply_cz(StateVector& state, std::size_t q1, std::size_t q2) {
  if (q1 >= state.qubits() || q2 >= state.qubits())
    throw std::out_of_range("apply_cz: qubit out of range");
  if (q1 == q2) throw std::invalid_argument("apply_cz: qubits must differ");
  const std::size_t mask = (std::size_t{1} << q1) | (std::size_t{1} << q2);
  auto amps = state.amplitudes();
  for (std::size_t k = 0; k < amps.size(); ++k)
    if ((k & mask) == mask) amps[k] = -amps[k];
}

namespace {

// i^k for k mod 4.
Amplitude i_power(std::size_t k) {
  switch (k % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void check_length(const StateVector& state, const PauliString& p) {
  if (p.size() != state.qubits())
    throw ShapeMismatch("Pauli string length " + std::to_string(p.size()) +
                        " does not match register of " + std::to_string(state.qubits()));
}

}  // namespace

StateVector apply_pauli(const StateVector& state, const PauliString& p) {
  check_length(state, p);
  const std::uint64_t flip = p.flip_mask();
  const std::uint64_t phase = p.phase_mask();
  const Amplitude global = i_power(p.y_count());
  StateVector out(state.qubits());
  auto src = state.amplitudes();
  auto dst = out.amplitudes();
  // X|b> = |1-b>, Z|b> = (-1)^b |b>, Y|b> = i (-1)^b |1-b>.
  for (std::size_t k = 0; k < src.size(); ++k) {
    const double sign = (std::popcount(k & phase) & 1) ? -1.0 : 1.0;
    dst[k ^ flip] = global * sign * src[k];
  }
  return out;
}

Amplitude expectation_complex(const StateVector& state, const PauliString& p) {
  check_length(state, p);
  const std::uint64_t flip = p.flip_mask();
  const std::uint64_t phase = p.phase_mask();
  auto amps = state.amplitudes();
  Amplitude sum{0.0, 0.0};
  // sum_k conj(psi[k ^ flip]) * (P psi)[k ^ flip], with (P psi)[k ^ flip]
  // = i^{#Y} (-1)^{|k & phase|} psi[k].
  for (std::size_t k = 0; k < amps.size(); ++k) {
    const Amplitude term = std::conj(amps[k ^ flip]) * amps[k];
    sum += (std::popcount(k & phase) & 1) ? -term : term;
  }
  return i_power(p.y_count()) * sum;
}

double expectation(const StateVector& state, const PauliString& p) {
  return expectation_complex(state, p).real();
}

std::vector<double> expectations_batch(const StateVector& state,
                                       std::span<const PauliString> observables) {
  std::vector<double> out;
  out.reserve(observables.size());
  for (const PauliString& p : observables) out.push_back(expectation(state, p));
  return out;
}

void CircuitSpec::validate() const {
  if (eta < 1 || eta > kMaxQubits)
    throw std::invalid_argument("CircuitSpec: qubit count must lie in [1, 24]");
  if (layers < 1) throw std::invalid_argument("CircuitSpec: need at least one layer");
}

std::vector<std::pair<std::size_t, std::size_t>> ring_edges(std::size_t eta) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  if (eta < 2) return edges;
  if (eta == 2) return {{0, 1}};
  for (std::size_t i = 0; i < eta; ++i) edges.emplace_back(i, (i + 1) % eta);
  return edges;
}

ParamSet::ParamSet(std::size_t layers, std::size_t eta, double fill)
    : layers_(layers), eta_(eta), angles_(layers * eta, fill) {}

ParamSet::ParamSet(std::size_t layers, std::size_t eta, std::vector<double> angles)
    : layers_(layers), eta_(eta), angles_(std::move(angles)) {
  if (angles_.size() != layers * eta) throw ShapeMismatch("ParamSet: angle count mismatch");
}

namespace {

void check_shape(const CircuitSpec& spec, const ParamSet& params) {
  spec.validate();
  if (!params.matches(spec))
    throw ShapeMismatch("ParamSet shape " + std::to_string(params.layers()) + "x" +
                        std::to_string(params.qubits()) + " does not match circuit " +
                        std::to_string(spec.layers) + "x" + std::to_string(spec.eta));
}

void apply_layer(StateVector& state, const ParamSet& params, std::size_t layer,
                 std::size_t first_qubit,
                 const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  for (std::size_t j = first_qubit; j < params.qubits(); ++j) apply_ry(state, j, params(layer, j));
  for (const auto& [a, b] : edges) apply_cz(state, a, b);
}

}  // namespace

StateVector run_hea(const CircuitSpec& spec, const ParamSet& params) {
  check_shape(spec, params);
  const auto edges = ring_edges(spec.eta);
  StateVector state = init_zero(spec.eta);
  for (std::size_t l = 0; l < spec.layers; ++l) apply_layer(state, params, l, 0, edges);
  return state;
}

ParamSet param_shift_expectation_grad(const CircuitSpec& spec, const ParamSet& params,
                                      const PauliString& p) {
  const ExpectationJacobian jac = param_shift_jacobian(spec, params, std::span(&p, 1));
  ParamSet grad(spec.layers, spec.eta);
  for (std::size_t mu = 0; mu < grad.size(); ++mu) grad[mu] = jac(0, mu);
  return grad;
}

ExpectationJacobian param_shift_jacobian(const CircuitSpec& spec, const ParamSet& params,
                                         std::span<const PauliString> observables) {
  check_shape(spec, params);
  ExpectationJacobian jac;
  jac.params = params.size();
  jac.values = expectations_batch(run_hea(spec, params), observables);
  jac.derivative.assign(observables.size() * jac.params, 0.0);
  ParamSet shifted = params;
  constexpr double kShift = std::numbers::pi / 2;
  for (std::size_t mu = 0; mu < jac.params; ++mu) {
    const double original = shifted[mu];
    shifted[mu] = original + kShift;
    const std::vector<double> plus = expectations_batch(run_hea(spec, shifted), observables);
    shifted[mu] = original - kShift;
    const std::vector<double> minus = expectations_batch(run_hea(spec, shifted), observables);
    shifted[mu] = original;
    for (std::size_t r = 0; r < observables.size(); ++r)
      jac.derivative[r * jac.params + mu] = 0.5 * (plus[r] - minus[r]);
  }
  return jac;
}

std::vector<double> param_shift_partial(const CircuitSpec& spec, const ParamSet& params,
                                        std::span<const PauliString> observables,
                                        std::size_t mu) {
  check_shape(spec, params);
  if (mu >= params.size()) throw std::out_of_range("param_shift_partial: index out of range");
  ParamSet shifted = params;
  shifted[mu] = params[mu] + std::numbers::pi / 2;
  const std::vector<double> plus = expectations_batch(run_hea(spec, shifted), observables);
  shifted[mu] = params[mu] - std::numbers::pi / 2;
  const std::vector<double> minus = expectations_batch(run_hea(spec, shifted), observables);
  std::vector<double> out(observables.size());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = 0.5 * (plus[r] - minus[r]);
  return out;
}

ParamSet adjoint_gradient(const CircuitSpec& spec, const ParamSet& params,
                          std::span<const PauliString> observables,
                          std::span<const double> weights) {
  check_shape(spec, params);
  if (observables.size() != weights.size())
    throw ShapeMismatch("adjoint_gradient: one weight per observable required");
  StateVector psi = run_hea(spec, params);
  StateVector lambda(spec.eta);
  for (std::size_t r = 0; r < observables.size(); ++r) {
    if (weights[r] == 0.0) continue;
    const StateVector term = apply_pauli(psi, observables[r]);
    auto dst = lambda.amplitudes();
    auto src = term.amplitudes();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += weights[r] * src[k];
  }
  const auto edges = ring_edges(spec.eta);
  ParamSet grad(spec.layers, spec.eta);
  for (std::size_t l = spec.layers; l-- > 0;) {
    for (const auto& [a, b] : edges) {
      apply_cz(psi, a, b);
      apply_cz(lambda, a, b);
    }
    for (std::size_t j = spec.eta; j-- > 0;) {
      // d/dtheta <psi|M|psi> = 2 Re <lambda| (-i Y_j / 2) |psi> = Im <lambda|Y_j|psi>
      const std::size_t bit = std::size_t{1} << j;
      auto lam = lambda.amplitudes();
      auto amp = psi.amplitudes();
      Amplitude z{0.0, 0.0};
      for (std::size_t k = 0; k < amp.size(); ++k) {
        if (k & bit) continue;
        // (Y psi)[k] = -i psi[k|bit], (Y psi)[k|bit] = i psi[k]
        z += std::conj(lam[k]) * Amplitude(0.0, -1.0) * amp[k | bit];
        z += std::conj(lam[k | bit]) * Amplitude(0.0, 1.0) * amp[k];
      }
      grad(l, j) = z.imag();
      apply_ry(psi, j, -params(l, j));
      apply_ry(lambda, j, -params(l, j));
    }
  }
  return grad;
}

namespace {

// Square complex matrix, row-major. Only used by the dense gradient.
class DenseOperator {
 public:
  explicit DenseOperator(std::size_t d) : d_(d), data_(d * d, Amplitude{0.0, 0.0}) {}

  Amplitude& operator()(std::size_t i, std::size_t j) { return data_[i * d_ + j]; }
  Amplitude operator()(std::size_t i, std::size_t j) const { return data_[i * d_ + j]; }
  std::size_t dim() const { return d_; }

  DenseOperator operator*(const DenseOperator& o) const {
    DenseOperator out(d_);
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t k = 0; k < d_; ++k) {
        const Amplitude a = (*this)(i, k);
        if (a == Amplitude{0.0, 0.0}) continue;
        for (std::size_t j = 0; j < d_; ++j) out(i, j) += a * o(k, j);
      }
    return out;
  }

  DenseOperator adjoint() const {
    DenseOperator out(d_);
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t j = 0; j < d_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  // Column j := state.
  void set_column(std::size_t j, const StateVector& state) {
    for (std::size_t i = 0; i < d_; ++i) (*this)(i, j) = state[i];
  }

 private:
  std::size_t d_;
  std::vector<Amplitude> data_;
};

DenseOperator pauli_operator(const PauliString& p) {
  const std::size_t eta = p.size();
  DenseOperator op(std::size_t{1} << eta);
  for (std::size_t k = 0; k < op.dim(); ++k) {
    StateVector basis(eta);
    basis.amplitudes()[k] = 1.0;
    op.set_column(k, apply_pauli(basis, p));
  }
  return op;
}

}  // namespace

double analytic_expectation_grad(const CircuitSpec& spec, const ParamSet& params,
                                 const PauliString& p, std::size_t which) {
  check_shape(spec, params);
  if (spec.eta > kMaxDenseQubits)
    throw std::invalid_argument("analytic_expectation_grad: register exceeds dense limit");
  if (which >= params.size()) throw std::out_of_range("analytic_expectation_grad: index");
  if (p.size() != spec.eta) throw ShapeMismatch("analytic_expectation_grad: Pauli length");

  const std::size_t layer = which / spec.eta;
  const std::size_t qubit = which % spec.eta;
  const std::size_t d = std::size_t{1} << spec.eta;
  const auto edges = ring_edges(spec.eta);

  // Columns of the gates applied after theta_{layer, qubit}.
  DenseOperator after(d);
  for (std::size_t k = 0; k < d; ++k) {
    StateVector col(spec.eta);
    col.amplitudes()[k] = 1.0;
    apply_layer(col, params, layer, qubit + 1, edges);
    for (std::size_t l = layer + 1; l < spec.layers; ++l) apply_layer(col, params, l, 0, edges);
    after.set_column(k, col);
  }

  DenseOperator generator = pauli_operator(PauliString::on_sites(spec.eta, Pauli::Y, {qubit}));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) generator(i, j) *= 0.5;

  const DenseOperator h_tilde = after * generator * after.adjoint();
  const DenseOperator pauli = pauli_operator(p);
  const DenseOperator pa = pauli * h_tilde;
  const DenseOperator ap = h_tilde * pauli;

  const StateVector psi = run_hea(spec, params);
  // tr(rho C) = <psi| C |psi> with rho = |psi><psi|.
  Amplitude trace{0.0, 0.0};
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      trace += std::conj(psi[i]) * (pa(i, j) - ap(i, j)) * psi[j];
  return (Amplitude{0.0, -1.0} * trace).real();
}

}  // namespace cpce
