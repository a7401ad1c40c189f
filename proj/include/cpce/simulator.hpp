#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cpce {

using Amplitude = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 24;
/// Register size up to which the dense commutator gradient is allowed.
inline constexpr std::size_t kMaxDenseQubits = 6;

enum class Pauli : std::uint8_t { I, X, Y, Z };

/// Tensor product of single-qubit Paulis. letters()[k] acts on qubit k.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::vector<Pauli> letters);
  /// Parses "IXIX"-style text; character k is qubit k.
  static PauliString parse(std::string_view text);
  /// Identity everywhere except `letter` on the listed qubits.
  static PauliString on_sites(std::size_t length, Pauli letter,
                              std::initializer_list<std::size_t> sites);

  std::size_t size() const noexcept { return letters_.size(); }
  Pauli operator[](std::size_t k) const { return letters_[k]; }
  const std::vector<Pauli>& letters() const noexcept { return letters_; }
  std::size_t weight() const;
  bool is_traceless() const { return weight() > 0; }
  std::string to_string() const;

  // Bit masks (qubit k -> bit k) used by the amplitude kernels.
  std::uint64_t flip_mask() const;   // X or Y
  std::uint64_t phase_mask() const;  // Y or Z
  std::size_t y_count() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  std::vector<Pauli> letters_;
};

/// 2^eta complex amplitudes; qubit 0 is the least-significant bit of the
/// basis index. Gates mutate in place.
class StateVector {
 public:
  explicit StateVector(std::size_t eta);
  StateVector(std::size_t eta, std::vector<Amplitude> amplitudes);

  std::size_t qubits() const noexcept { return eta_; }
  std::size_t dimension() const noexcept { return amps_.size(); }
  std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
  std::span<Amplitude> amplitudes() noexcept { return amps_; }
  Amplitude operator[](std::size_t k) const { return amps_[k]; }
  double norm_squared() const;

 private:
  std::size_t eta_;
  std::vector<Amplitude> amps_;
};

/// |0...0> on eta qubits, 1 <= eta <= 24.
StateVector init_zero(std::size_t eta);

/// exp(-i angle Y / 2) on `qubit`.
void apply_ry(StateVector& state, std::size_t qubit, double angle);
void apply_cz(StateVector& state, std::size_t q1, std::size_t q2);
/// P|psi>, returned as a new state.
StateVector apply_pauli(const StateVector& state, const PauliString& p);

struct CircuitSpec {
  std::size_t eta = 1;
  std::size_t layers = 1;

  std::size_t num_params() const noexcept { return eta * layers; }
  void validate() const;
};

/// Ring entangler edges (i, i+1 mod eta), each undirected edge once, in
/// ascending order of i. eta = 2 yields the single edge (0, 1); eta = 1
/// yields none.
std::vector<std::pair<std::size_t, std::size_t>> ring_edges(std::size_t eta);

/// Circuit angles theta[l][j] for layer l and qubit j, stored layer-major;
/// flat index mu = l * eta + j. Gradients use the same shape.
class ParamSet {
 public:
  ParamSet() = default;
  ParamSet(std::size_t layers, std::size_t eta, double fill = 0.0);
  ParamSet(std::size_t layers, std::size_t eta, std::vector<double> angles);
  explicit ParamSet(const CircuitSpec& spec) : ParamSet(spec.layers, spec.eta) {}

  std::size_t layers() const noexcept { return layers_; }
  std::size_t qubits() const noexcept { return eta_; }
  std::size_t size() const noexcept { return angles_.size(); }
  double operator()(std::size_t l, std::size_t j) const { return angles_[l * eta_ + j]; }
  double& operator()(std::size_t l, std::size_t j) { return angles_[l * eta_ + j]; }
  double operator[](std::size_t mu) const { return angles_[mu]; }
  double& operator[](std::size_t mu) { return angles_[mu]; }
  std::span<const double> flat() const noexcept { return angles_; }
  std::span<double> flat() noexcept { return angles_; }
  bool matches(const CircuitSpec& spec) const noexcept {
    return layers_ == spec.layers && eta_ == spec.eta;
  }

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  std::size_t layers_ = 0;
  std::size_t eta_ = 0;
  std::vector<double> angles_;
};

/// Hardware-efficient ansatz: per layer, Ry on every qubit (ascending), then
/// CZ over ring_edges(eta).
StateVector run_hea(const CircuitSpec& spec, const ParamSet& params);

/// <psi|P|psi> without rounding off the imaginary part.
Amplitude expectation_complex(const StateVector& state, const PauliString& p);
double expectation(const StateVector& state, const PauliString& p);
std::vector<double> expectations_batch(const StateVector& state,
                                       std::span<const PauliString> observables);

/// d<P>/d theta for every angle via the two-term shift rule (+-pi/2).
ParamSet param_shift_expectation_grad(const CircuitSpec& spec, const ParamSet& params,
                                      const PauliString& p);

/// Shift-rule derivatives of several observables at once. Row r, column mu
/// holds d<O_r>/d theta_mu; each shifted circuit is simulated once and all
/// observables are read from it.
struct ExpectationJacobian {
  std::vector<double> values;      // <O_r>(theta)
  std::vector<double> derivative;  // row-major, observables x params
  std::size_t params = 0;

  double operator()(std::size_t r, std::size_t mu) const { return derivative[r * params + mu]; }
};
ExpectationJacobian param_shift_jacobian(const CircuitSpec& spec, const ParamSet& params,
                                         std::span<const PauliString> observables);

/// Derivatives with respect to the single angle `mu` only.
std::vector<double> param_shift_partial(const CircuitSpec& spec, const ParamSet& params,
                                        std::span<const PauliString> observables,
                                        std::size_t mu);

/// Gradient of sum_r weights[r] <O_r> by one backward sweep over the
/// circuit (adjoint differentiation). Costs about three circuit runs.
ParamSet adjoint_gradient(const CircuitSpec& spec, const ParamSet& params,
                          std::span<const PauliString> observables,
                          std::span<const double> weights);

/// -i tr(rho [P, H~]) with H~ the generator Y_k/2 conjugated by the gates
/// that follow it, built as dense 2^eta matrices. eta <= 6.
double analytic_expectation_grad(const CircuitSpec& spec, const ParamSet& params,
                                 const PauliString& p, std::size_t which);

}  // namespace cpce
