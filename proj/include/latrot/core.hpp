#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

// Small fixed-dimension complex linear algebra for two- and four-level atoms:
// states, checked unitaries, rotation/pulse constructors, composition,
// commutators and fidelity measures. Everything is an immutable value type.

namespace latrot {

using complexd = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Construction-time tolerance for unitarity / normalization checks.
inline constexpr double unitary_tol = 1e-12;
/// End-to-end simulation tolerance (residuals after ~2^L matrix products).
inline constexpr double simulation_tol = 1e-10;

/// Wrap an angle into [0, 2*pi).
inline double wrap_two_pi(double x) {
  double r = std::fmod(x, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;  // fmod can land exactly on 2*pi after the add
  return r + 0.0;            // never hand out -0.0
}

/// Wrap an angle into (-pi, pi].
inline double wrap_pm_pi(double x) {
  double r = std::fmod(x, two_pi);
  if (r > pi) r -= two_pi;
  if (r <= -pi) r += two_pi;
  return r + 0.0;
}

/// The two addressing schemes: all beams at once, or one ordered pulse each.
enum class Scheme { interference, sequential };

/// A requested beam tilt would need |sin(theta)| > 1.
class infeasible_geometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The target site sees no drive, so no rotation can be calibrated.
class degenerate_target : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Dense row-major DxD complex matrix, D in {2, 4}.
// ---------------------------------------------------------------------------

template <std::size_t Dim>
class Matrix {
  static_assert(Dim == 2 || Dim == 4, "only 2- and 4-level systems exist here");

 public:
  Matrix() = default;

  static Matrix identity() {
    Matrix m;
    for (std::size_t i = 0; i < Dim; ++i) m(i, i) = 1.0;
    return m;
  }

  complexd& operator()(std::size_t r, std::size_t c) { return e_[r * Dim + c]; }
  const complexd& operator()(std::size_t r, std::size_t c) const { return e_[r * Dim + c]; }

  Matrix adjoint() const {
    Matrix a;
    for (std::size_t r = 0; r < Dim; ++r)
      for (std::size_t c = 0; c < Dim; ++c) a(c, r) = std::conj((*this)(r, c));
    return a;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix c;
    for (std::size_t i = 0; i < Dim; ++i)
      for (std::size_t k = 0; k < Dim; ++k) {
        const complexd aik = a(i, k);
        for (std::size_t j = 0; j < Dim; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    Matrix c;
    for (std::size_t i = 0; i < Dim * Dim; ++i) c.e_[i] = a.e_[i] + b.e_[i];
    return c;
  }

  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix c;
    for (std::size_t i = 0; i < Dim * Dim; ++i) c.e_[i] = a.e_[i] - b.e_[i];
    return c;
  }

  friend Matrix operator*(const complexd& s, const Matrix& a) {
    Matrix c;
    for (std::size_t i = 0; i < Dim * Dim; ++i) c.e_[i] = s * a.e_[i];
    return c;
  }

  complexd trace() const {
    complexd t = 0.0;
    for (std::size_t i = 0; i < Dim; ++i) t += (*this)(i, i);
    return t;
  }

  /// Largest entry magnitude (the max-entry norm used by every tolerance).
  double max_abs() const {
    double m = 0.0;
    for (const complexd& z : e_) m = std::max(m, std::abs(z));
    return m;
  }

  bool all_finite() const {
    for (const complexd& z : e_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

 private:
  std::array<complexd, Dim * Dim> e_{};
};

template <std::size_t Dim>
inline double max_abs_diff(const Matrix<Dim>& a, const Matrix<Dim>& b) {
  return (a - b).max_abs();
}

using Matrix2 = Matrix<2>;
using Matrix4 = Matrix<4>;

// ---------------------------------------------------------------------------
// Checked unitary: constructible only from a matrix with ||U'U - I|| <= 1e-12.
// ---------------------------------------------------------------------------

template <std::size_t Dim>
class Unitary {
 public:
  explicit Unitary(const Matrix<Dim>& m) : m_(m) {
    if (!m.all_finite()) throw std::invalid_argument("unitary entries must be finite");
    const double dev = max_abs_diff(m.adjoint() * m, Matrix<Dim>::identity());
    if (dev > unitary_tol)
      throw std::invalid_argument("matrix is not unitary: ||U'U - I|| = " + std::to_string(dev));
  }

  static Unitary identity() { return Unitary(Matrix<Dim>::identity()); }

  const Matrix<Dim>& matrix() const { return m_; }
  complexd operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

  Unitary adjoint() const { return Unitary(m_.adjoint()); }

  friend Unitary operator*(const Unitary& a, const Unitary& b) {
    return Unitary(a.m_ * b.m_);
  }

  double deviation_from(const Unitary& other) const { return max_abs_diff(m_, other.m_); }
  double deviation_from_identity() const { return max_abs_diff(m_, Matrix<Dim>::identity()); }

 private:
  Matrix<Dim> m_;
};

using Unitary2 = Unitary<2>;
using Unitary4 = Unitary<4>;

// ---------------------------------------------------------------------------
// Normalized pure states.
// ---------------------------------------------------------------------------

template <std::size_t Dim>
class PureState {
 public:
  explicit PureState(const std::array<complexd, Dim>& amps) : a_(amps) {
    double n2 = 0.0;
    for (const complexd& z : a_) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::invalid_argument("state amplitudes must be finite");
      n2 += std::norm(z);
    }
    if (std::abs(n2 - 1.0) > unitary_tol)
      throw std::invalid_argument("state is not normalized: |psi|^2 = " + std::to_string(n2));
  }

  /// Basis state |level>.
  static PureState basis(std::size_t level) {
    std::array<complexd, Dim> a{};
    a.at(level) = 1.0;
    return PureState(a);
  }

  const complexd& amplitude(std::size_t i) const { return a_[i]; }

  PureState apply(const Unitary<Dim>& u) const {
    std::array<complexd, Dim> out{};
    for (std::size_t r = 0; r < Dim; ++r)
      for (std::size_t c = 0; c < Dim; ++c) out[r] += u(r, c) * a_[c];
    return PureState(out);
  }

  complexd inner(const PureState& other) const {  // <this|other>
    complexd s = 0.0;
    for (std::size_t i = 0; i < Dim; ++i) s += std::conj(a_[i]) * other.a_[i];
    return s;
  }

  double max_abs_diff(const PureState& other) const {
    double m = 0.0;
    for (std::size_t i = 0; i < Dim; ++i) m = std::max(m, std::abs(a_[i] - other.a_[i]));
    return m;
  }

 private:
  std::array<complexd, Dim> a_;
};

using PureState2 = PureState<2>;
using PureState4 = PureState<4>;

// ---------------------------------------------------------------------------
// Rotation and pulse parameters.
// ---------------------------------------------------------------------------

/// Target rotation angles (xi, phi). Normalized so xi lands in [0, pi]
/// and phi in [0, 2*pi); U(-xi, phi) = U(xi, phi + pi) keeps the value intact.
struct RotationSpec {
  double xi;
  double phi;

  RotationSpec(double xi_, double phi_) {
    if (!std::isfinite(xi_) || !std::isfinite(phi_))
      throw std::invalid_argument("rotation angles must be finite");
    double x = wrap_pm_pi(xi_);
    if (x < 0.0) {
      x = -x;
      phi_ += pi;
    }
    xi = x;
    phi = wrap_two_pi(phi_);
  }
};

/// One pulse: accumulated half-angle (integral of Omega/2 dt) and drive phase.
/// Only the integral of the Rabi frequency enters the evolution, so Omega and
/// the duration never appear separately.
struct PulseParams {
  double area;
  double phase;

  PulseParams(double area_, double phase_) {
    if (!std::isfinite(area_) || !std::isfinite(phase_))
      throw std::invalid_argument("pulse parameters must be finite");
    if (area_ < 0.0) throw std::invalid_argument("pulse area must be non-negative");
    area = area_;
    phase = wrap_two_pi(phase_);
  }
};

/// Which pair of levels a pulse couples; a is the entry carrying e^{+i phase}.
struct LevelPair {
  std::size_t a;
  std::size_t b;
};

// ---------------------------------------------------------------------------
// Constructors and operations.
// ---------------------------------------------------------------------------

/// cos(xi) I - i sin(xi) (e^{i phi}|0><1| + h.c.)
inline Unitary2 make_rotation(const RotationSpec& spec) {
  Matrix2 m;
  const double c = std::cos(spec.xi);
  const double s = std::sin(spec.xi);
  const complexd off = complexd(0.0, -1.0) * s * std::polar(1.0, spec.phi);
  m(0, 0) = c;
  m(1, 1) = c;
  m(0, 1) = off;
  m(1, 0) = complexd(0.0, -1.0) * s * std::polar(1.0, -spec.phi);
  return Unitary2(m);
}

/// Pulse evolution on one transition of a Dim-level atom:
/// cos(area) on the coupled pair, -i sin(area) e^{+-i phase} off-diagonal,
/// identity on every other level.
template <std::size_t Dim>
inline Unitary<Dim> evolve_pulse(const PulseParams& p, const LevelPair& t) {
  if (t.a >= Dim || t.b >= Dim || t.a == t.b)
    throw std::invalid_argument("transition levels must be distinct and within dimension");
  Matrix<Dim> m = Matrix<Dim>::identity();
  const double c = std::cos(p.area);
  const double s = std::sin(p.area);
  m(t.a, t.a) = c;
  m(t.b, t.b) = c;
  m(t.a, t.b) = complexd(0.0, -1.0) * s * std::polar(1.0, p.phase);
  m(t.b, t.a) = complexd(0.0, -1.0) * s * std::polar(1.0, -p.phase);
  return Unitary<Dim>(m);
}

/// Two-level convenience overload on the qubit transition (0, 1).
inline Unitary2 evolve_pulse(const PulseParams& p) {
  return evolve_pulse<2>(p, LevelPair{0, 1});
}

/// Right-to-left product: ops[0] is the first pulse applied, i.e. the
/// rightmost factor. Empty input composes to the identity.
template <std::size_t Dim>
inline Unitary<Dim> compose(std::span<const Unitary<Dim>> ops) {
  Matrix<Dim> acc = Matrix<Dim>::identity();
  for (const Unitary<Dim>& u : ops) acc = u.matrix() * acc;
  return Unitary<Dim>(acc);
}

/// Commutator of two subsequent equal-area pulses, both as the closed-form
/// diagonal and as the direct product difference U2*U1 - U1*U2. The closed
/// form is only defined for equal areas (equal Rabi frequency per step);
/// with unequal areas it is absent and only the direct form is returned.
///
/// Sign convention: the scalar prefactor is chosen so the closed form equals
/// the direct commutator of the later pulse with the earlier one,
/// (e^{-i dphi} - e^{+i dphi}) sin^2(area) (|0><0| - |1><1|), dphi = phase2 - phase1.
struct CommutatorResult {
  std::optional<Matrix2> closed_form;
  Matrix2 direct;
};

inline CommutatorResult commutator_check(const PulseParams& p1, const PulseParams& p2) {
  const Matrix2 u1 = evolve_pulse(p1).matrix();
  const Matrix2 u2 = evolve_pulse(p2).matrix();
  CommutatorResult out{std::nullopt, u2 * u1 - u1 * u2};
  if (p1.area == p2.area) {
    const double dphi = p2.phase - p1.phase;
    const complexd factor =
        (std::polar(1.0, -dphi) - std::polar(1.0, dphi)) * std::sin(p1.area) * std::sin(p1.area);
    Matrix2 cf;
    cf(0, 0) = factor;
    cf(1, 1) = -factor;
    out.closed_form = cf;
  }
  return out;
}

/// Survival probability |<psi|U|psi>|^2.
template <std::size_t Dim>
inline double state_fidelity(const PureState<Dim>& psi, const Unitary<Dim>& u) {
  return std::norm(psi.inner(psi.apply(u)));
}

/// Survival amplitude |<psi|U|psi>|.
template <std::size_t Dim>
inline double state_overlap(const PureState<Dim>& psi, const Unitary<Dim>& u) {
  return std::abs(psi.inner(psi.apply(u)));
}

/// min over pure states of |<psi|U|psi>|. Writing U = e^{ia}(cos b - i sin b n.sigma)
/// gives |<psi|U|psi>| = sqrt(cos^2 b + sin^2 b <n.sigma>^2) >= |cos b| = |tr U|/2.
inline double worst_case_overlap(const Unitary2& u) {
  return 0.5 * std::abs(u.matrix().trace());
}

/// min over pure states of |<psi|U|psi>|^2; for a pulse of given area this is
/// cos^2(area).
inline double worst_case_fidelity(const Unitary2& u) {
  const double a = worst_case_overlap(u);
  return a * a;
}

}  // namespace latrot
