#include "dps/gaussian_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "detail.hpp"
#include "dps/error.hpp"

namespace dps {
namespace {

using detail::CompensatedSum;

constexpr double kLn2 = std::numbers::ln2;
constexpr int kModPPrime = 1009;

// log of 2 exp(-n u + (n/2) log(2 e u)): bound on the Gaussian mass of a coset
// outside radius sqrt(2 n u) sigma, relative to the centered sum (u >= 1).
double log_tail_factor(int n, double u) {
  return kLn2 - n * u + 0.5 * n * std::log(2.0 * std::numbers::e * u);
}

// Smallest u >= 1 (up to bisection accuracy) with log_tail_factor(n, u) <= target.
double solve_tail(int n, double log_target) {
  if (log_tail_factor(n, 1.0) <= log_target) return 1.0;
  double lo = 1.0;
  double hi = 2.0;
  while (log_tail_factor(n, hi) > log_target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 100 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (log_tail_factor(n, mid) <= log_target ? hi : lo) = mid;
  }
  return hi;
}

double log_add_exp(double a, double b) {
  const double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) fail(ErrorCode::NonPositive, "sigma must be positive");
}

void check_shift(const Lattice& lat, const Vector& shift) {
  if (shift.size() != lat.dim()) fail(ErrorCode::DimensionMismatch, "shift has wrong dimension");
}

// Unnormalized sum rho = sum exp(-|x|^2 / 2 sigma^2) over a coset.
struct ThetaEval {
  double log_rho = 0.0;
  double rel_err = 0.0;  // certified bound on (true - computed) / computed
  double excess = 0.0;   // rho - 1, only for centered sums
  double radius = 0.0;
};

// One coordinate of a product formula: the coset Z + shift, with both the plain
// sum a and the parity-signed sum b = sum (-1)^k exp(...), relative to the
// largest term exp(log_top).
struct AxisSum {
  double log_top = 0.0;
  double a = 1.0;
  double b = 1.0;
  double a_excess = 0.0;
  double b_excess = 0.0;
  double tau = 0.0;  // bound on the omitted part of a (and of b), relative to the top term
  double radius = 0.0;
};

AxisSum axis_sum(double shift, double sigma, double log_tau_target) {
  const double m = std::round(shift);
  const double r = shift - m;
  const bool odd = std::fmod(std::abs(m), 2.0) == 1.0;
  const double s2 = 2.0 * sigma * sigma;
  AxisSum out;
  out.log_top = -r * r / s2;
  // centered sum is at most 1 + sqrt(2 pi) sigma
  const double log_a0 = std::log1p(std::sqrt(detail::kTwoPi) * sigma);
  const double target = std::min(std::log(0.5), log_tau_target - kLn2 - log_a0 - out.log_top);
  const double u = solve_tail(1, target);
  out.radius = sigma * std::sqrt(2.0 * u);
  out.tau = std::exp(kLn2 + log_tail_factor(1, u) + log_a0 - out.log_top);
  const auto kmin = static_cast<std::int64_t>(std::ceil(-out.radius - r));
  const auto kmax = static_cast<std::int64_t>(std::floor(out.radius - r));
  CompensatedSum a_exc;
  CompensatedSum b_exc;
  for (std::int64_t k = kmin; k <= kmax; ++k) {
    if (k == 0) continue;
    const double kd = static_cast<double>(k);
    const double w = std::exp(-(kd * kd + 2.0 * kd * r) / s2);
    a_exc.add(w);
    b_exc.add((k % 2 == 0) ? w : -w);
  }
  out.a_excess = a_exc.value();
  out.b_excess = b_exc.value();
  out.a = 1.0 + out.a_excess;
  out.b = (odd ? -1.0 : 1.0) * (1.0 + out.b_excess);
  return out;
}

std::vector<AxisSum> axis_sums(const Vector& shift, const Vector& sigmas, double log_tau_target) {
  std::vector<AxisSum> out;
  out.reserve(static_cast<std::size_t>(shift.size()));
  for (Eigen::Index i = 0; i < shift.size(); ++i) out.push_back(axis_sum(shift(i), sigmas(i), log_tau_target));
  return out;
}

ThetaEval product_eval(const std::vector<AxisSum>& axes, bool centered) {
  ThetaEval e;
  double log_err = 0.0;
  double log_exc = 0.0;
  double radius2 = 0.0;
  for (const auto& ax : axes) {
    e.log_rho += ax.log_top + std::log(ax.a);
    log_err += std::log1p(ax.tau / ax.a);
    log_exc += std::log1p(ax.a_excess);
    radius2 += ax.radius * ax.radius;
  }
  e.rel_err = std::expm1(log_err);
  e.excess = centered ? std::expm1(log_exc) : 0.0;
  e.radius = std::sqrt(radius2);
  return e;
}

// D_n + t = {x + t : x in Z^n, sum x even}; rho = (prod a + prod b) / 2.
std::optional<ThetaEval> dn_eval(const std::vector<AxisSum>& axes, bool centered) {
  ThetaEval e = product_eval(axes, centered);
  const double a_excess = e.excess;
  double ratio = 1.0;
  double ratio_abs = 1.0;
  double ratio_pert = 1.0;
  double log_b_exc = 0.0;
  for (const auto& ax : axes) {
    ratio *= ax.b / ax.a;
    ratio_abs *= std::abs(ax.b) / ax.a;
    ratio_pert *= (std::abs(ax.b) + ax.tau) / ax.a;
    log_b_exc += std::log1p(ax.b_excess);
  }
  const double factor = 1.0 + ratio;
  if (!(factor > 0.0)) return std::nullopt;
  const double err_plain = e.rel_err;
  e.log_rho += std::log(0.5) + std::log1p(ratio);
  e.rel_err = (err_plain + (ratio_pert - ratio_abs)) / factor;
  e.excess = centered ? 0.5 * (a_excess + std::expm1(log_b_exc)) : 0.0;
  return e;
}

std::optional<ThetaEval> structured_eval(const Lattice& lat, const Vector& shift, double sigma,
                                         double log_tau_target, bool centered) {
  const int n = lat.dim();
  switch (lat.kind()) {
    case LatticeKind::Diagonal: {
      const Vector d = lat.diagonal().cwiseAbs();
      const Vector t = shift.cwiseQuotient(lat.diagonal());
      const Vector sig = (sigma * Vector::Ones(n)).cwiseQuotient(d);
      return product_eval(axis_sums(t, sig, log_tau_target), centered);
    }
    case LatticeKind::Dn: {
      const double c = lat.kind_scale();
      const Vector sig = Vector::Constant(n, sigma / c);
      return dn_eval(axis_sums(shift / c, sig, log_tau_target), centered);
    }
    case LatticeKind::E8: {
      const double c = lat.kind_scale();
      const Vector sig = Vector::Constant(n, sigma / c);
      const Vector t = shift / c;
      auto first = dn_eval(axis_sums(t, sig, log_tau_target), centered);
      auto second = dn_eval(axis_sums(t + Vector::Constant(n, 0.5), sig, log_tau_target), false);
      if (!first || !second) return std::nullopt;
      ThetaEval e;
      e.log_rho = log_add_exp(first->log_rho, second->log_rho);
      e.rel_err = first->rel_err * std::exp(first->log_rho - e.log_rho) +
                  second->rel_err * std::exp(second->log_rho - e.log_rho);
      e.excess = centered ? first->excess + std::exp(second->log_rho) : 0.0;
      e.radius = std::max(first->radius, second->radius);
      return e;
    }
    case LatticeKind::Generic: break;
  }
  return std::nullopt;
}

// Enumerated sum with certified truncation. `store`, when given, receives every
// point and its squared norm.
ThetaEval generic_eval(const Lattice& lat, const Vector& shift, double sigma, double rel_tol,
                       std::size_t cap, const std::function<void(const Vector&, double)>* store) {
  const int n = lat.dim();
  const double s2 = 2.0 * sigma * sigma;
  const bool centered = lat.contains(shift, 1e-12);
  const Vector t = centered ? Vector::Zero(n) : Vector(shift);
  const double qmin = centered ? 0.0 : mod_lattice(lat, -t).squaredNorm();

  double log_s0up = 0.0;
  if (!centered) {
    const double u0 = solve_tail(n, std::log(0.25));
    const double r0 = sigma * std::sqrt(2.0 * n * u0);
    CompensatedSum s0;
    visit_coset(lat, Vector::Zero(n), r0, [&](const Vector&, double q) { s0.add(std::exp(-q / s2)); }, cap);
    log_s0up = std::log(s0.value()) - std::log1p(-std::exp(log_tail_factor(n, u0)));
  }

  const double log_target = centered ? std::log(rel_tol / (1.0 + rel_tol))
                                     : std::log(rel_tol) - qmin / s2 - log_s0up;
  const double u = solve_tail(n, std::min(log_target, std::log(0.5)));
  const double radius = std::max(sigma * std::sqrt(2.0 * n * u), std::sqrt(qmin) * (1.0 + 1e-9) + 1e-300);
  const double u_actual = radius * radius / (2.0 * n * sigma * sigma);

  CompensatedSum others;
  double top = -1.0;
  visit_coset(
      lat, t, radius,
      [&](const Vector& x, double q) {
        const double w = std::exp(-(q - qmin) / s2);
        if (w > top) {
          if (top >= 0.0) others.add(top);
          top = w;
        } else {
          others.add(w);
        }
        if (store) (*store)(x, q);
      },
      cap);
  if (top < 0.0) fail(ErrorCode::InternalMismatch, "empty coset enumeration");

  ThetaEval e;
  e.radius = radius;
  e.log_rho = -qmin / s2 + std::log(top) + std::log1p(others.value() / top);
  e.excess = centered ? (top - 1.0) + others.value() : 0.0;
  const double lt = log_tail_factor(n, std::max(u_actual, 1.0));
  if (centered) {
    e.rel_err = std::exp(lt) / (1.0 - std::exp(lt));
  } else {
    e.rel_err = std::exp(lt + log_s0up - e.log_rho);
  }
  return e;
}

ThetaEval theta_eval(const Lattice& lat, const Vector& shift, double sigma, double rel_tol, std::size_t cap) {
  const bool centered = shift.isZero(0.0);
  if (lat.kind() != LatticeKind::Generic) {
    double log_tau = std::log(rel_tol) - std::log(static_cast<double>(lat.dim())) - 3.0 * std::log(10.0);
    for (int attempt = 0; attempt < 3; ++attempt) {
      auto e = structured_eval(lat, shift, sigma, log_tau, centered);
      if (e && e->rel_err <= rel_tol && std::isfinite(e->log_rho)) return *e;
      log_tau -= 10.0 * std::log(10.0);
    }
  }
  return generic_eval(lat, shift, sigma, rel_tol, cap, nullptr);
}

double normalizer_log(int n, double sigma) { return 0.5 * n * std::log(detail::kTwoPi * sigma * sigma); }

double radical_inverse(std::uint64_t index, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f *= inv;
  }
  return r;
}

std::vector<int> first_primes(int count) {
  std::vector<int> out;
  for (int p = 2; static_cast<int>(out.size()) < count; ++p) {
    if (is_prime(p)) out.push_back(p);
  }
  return out;
}

}  // namespace

double gaussian_pdf(double sigma, const Vector& x) {
  check_sigma(sigma);
  return std::exp(-x.squaredNorm() / (2.0 * sigma * sigma) - normalizer_log(static_cast<int>(x.size()), sigma));
}

ThetaSum gaussian_mass(const Lattice& lat, const Vector& shift, double sigma, double rel_tol, std::size_t cap) {
  check_sigma(sigma);
  check_shift(lat, shift);
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) fail(ErrorCode::InvalidParams, "rel_tol must lie in (0, 1)");
  const ThetaEval e = theta_eval(lat, shift, sigma, rel_tol, cap);
  ThetaSum out;
  out.log_value = e.log_rho - normalizer_log(lat.dim(), sigma);
  out.value = std::exp(out.log_value);
  out.truncation_radius = e.radius;
  out.tail_bound = e.rel_err;
  return out;
}

double mass_zero(const Lattice& lat, double sigma) {
  check_sigma(sigma);
  const ThetaEval e = theta_eval(lat, Vector::Zero(lat.dim()), sigma, kDefaultThetaTol, kDefaultEnumerationCap);
  return std::exp(-e.log_rho);
}

double smoothing_sum(const Lattice& lat, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) fail(ErrorCode::NonPositive, "scale must be positive");
  const Vector zero = Vector::Zero(lat.dim());
  ThetaEval e = theta_eval(lat, zero, 1.0 / s, kDefaultThetaTol, kDefaultEnumerationCap);
  // The excess can be far smaller than rho; tighten until it is resolved.
  const double rho = std::exp(e.log_rho);
  if (e.excess > 0.0 && e.rel_err * rho > 1e-11 * e.excess) {
    const double tol = std::max(1e-11 * e.excess / rho, 1e-300);
    e = theta_eval(lat, zero, 1.0 / s, tol, kDefaultEnumerationCap);
  }
  return e.excess;
}

double entropy_exact(const Lattice& lat, const Vector& shift, double sigma, double tol) {
  check_sigma(sigma);
  check_shift(lat, shift);
  const CosetSupport support(lat, shift, sigma);
  const double closed = support.entropy();
  const double direct = support.entropy_direct();
  if (!(std::abs(closed - direct) <= tol)) {
    fail(ErrorCode::InternalMismatch, "entropy computations disagree: " + std::to_string(closed) + " vs " +
                                          std::to_string(direct));
  }
  return closed;
}

double flatness_upper(const Lattice& lat, double sigma) {
  check_sigma(sigma);
  // Poisson summation: V f(Lambda + x) - 1 is bounded by the dual sum at 1/(2 pi sigma).
  const Lattice dual_lat = lat.dual();
  const double dual_sigma = 1.0 / (detail::kTwoPi * sigma);
  const ThetaEval e = theta_eval(dual_lat, Vector::Zero(lat.dim()), dual_sigma, 1e-12, kDefaultEnumerationCap);
  return e.excess + e.rel_err * std::exp(e.log_rho);
}

FlatnessBracket flatness_factor(const Lattice& lat, double sigma, int samples, std::uint64_t seed) {
  check_sigma(sigma);
  if (samples < 1) fail(ErrorCode::InvalidParams, "samples must be at least 1");
  const int n = lat.dim();
  FlatnessBracket out;
  out.sigma = sigma;
  out.upper = flatness_upper(lat, sigma);

  const auto primes = first_primes(n);
  RngStream rng(seed, 0x666c6174);
  Vector rotation(n);
  for (int i = 0; i < n; ++i) rotation(i) = rng.uniform();
  const double log_volume = std::log(lat.volume());
  Vector frac(n);
  for (int k = 0; k < samples; ++k) {
    Vector x = Vector::Zero(n);
    if (k > 0) {
      for (int i = 0; i < n; ++i) {
        const double h = radical_inverse(static_cast<std::uint64_t>(k), primes[static_cast<std::size_t>(i)]) + rotation(i);
        frac(i) = h - std::floor(h);
      }
      x = mod_lattice(lat, lat.basis() * frac);
    }
    const ThetaSum m = gaussian_mass(lat, x, sigma, 1e-12);
    const double deviation = std::abs(std::expm1(m.log_value + log_volume));
    out.lower = std::max(out.lower, deviation);
  }
  return out;
}

SmoothingResult smoothing_parameter(const Lattice& lat, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail(ErrorCode::InvalidParams, "epsilon must be positive");
  const double lambda1 = lat.min_distance();
  const double s_min = 1e-6 / lambda1;
  const double s_max = 1e6 / lambda1;
  SmoothingResult out;
  out.epsilon = epsilon;

  // A shortest vector pair alone gives g(s) >= 2 exp(-s^2 lambda1^2 / 2).
  double lo = epsilon < 2.0 ? std::sqrt(2.0 * std::log(2.0 / epsilon)) / lambda1 : 1.0 / lambda1;
  double g_lo = smoothing_sum(lat, lo);
  while (g_lo < epsilon) {
    lo *= 0.5;
    if (lo < s_min) fail(ErrorCode::BracketFailure, "no bracket for the smoothing parameter");
    g_lo = smoothing_sum(lat, lo);
  }
  double hi = lo;
  double g_hi = g_lo;
  while (g_hi >= epsilon) {
    lo = hi;
    hi *= 2.0;
    if (hi > s_max) fail(ErrorCode::BracketFailure, "no bracket for the smoothing parameter");
    g_hi = smoothing_sum(lat, hi);
  }

  double best = hi;
  double best_residual = std::abs(g_hi - epsilon);
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = smoothing_sum(lat, mid);
    out.iterations = it + 1;
    const double residual = std::abs(g - epsilon);
    if (residual < best_residual) {
      best = mid;
      best_residual = residual;
    }
    if (residual <= 1e-9 * epsilon || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    (g > epsilon ? lo : hi) = mid;
  }
  out.s = best;
  out.residual = best_residual;
  return out;
}

MeanCheckReport random_lattice_mean_check(int n, double volume, int trials, double sigma, std::uint64_t seed) {
  check_sigma(sigma);
  if (n < 1) fail(ErrorCode::InvalidParams, "n must be positive");
  if (trials < 1) fail(ErrorCode::InvalidParams, "trials must be at least 1");
  if (!(volume > 0.0)) fail(ErrorCode::NonPositive, "volume must be positive");
  MeanCheckReport out;
  out.trials = trials;
  out.seed = seed;
  out.predicted = std::exp(-normalizer_log(n, sigma)) + 1.0 / volume;
  const Vector zero = Vector::Zero(n);
  if (n == 1) {
    Matrix b(1, 1);
    b(0, 0) = volume;
    out.empirical_mean = gaussian_mass(Lattice(b), zero, sigma, 1e-12).value;
    return out;
  }
  RngStream rng(seed, 0x6d65616e);
  const double scale = std::pow(volume / kModPPrime, 1.0 / n);
  CompensatedSum sum;
  CompensatedSum sum_sq;
  for (int i = 0; i < trials; ++i) {
    const Lattice lat = random_mod_p_lattice(n, n - 1, kModPPrime, rng.next_u64()).scaled(scale);
    const double f = gaussian_mass(lat, zero, sigma, 1e-10).value;
    sum.add(f);
    sum_sq.add(f * f);
  }
  out.empirical_mean = sum.value() / trials;
  if (trials > 1) {
    const double var = std::max(0.0, (sum_sq.value() - trials * out.empirical_mean * out.empirical_mean) / (trials - 1));
    out.standard_error = std::sqrt(var / trials);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CosetSupport

CosetSupport::CosetSupport(const Lattice& lat, const Vector& shift, double sigma, double rel_tail,
                           std::size_t cap)
    : dim_(lat.dim()), sigma_(sigma) {
  check_sigma(sigma);
  check_shift(lat, shift);
  if (!(rel_tail > 0.0 && rel_tail < 1.0)) fail(ErrorCode::InvalidParams, "tail must lie in (0, 1)");
  if (lat.kind() == LatticeKind::Diagonal && dim_ > 1) {
    double log_keep = 0.0;
    double radius2 = 0.0;
    axes_.reserve(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) {
      Matrix b(1, 1);
      b(0, 0) = lat.basis()(i, i);
      Vector t(1);
      t(0) = shift(i);
      axes_.push_back(CosetSupport(Lattice(b), t, sigma, rel_tail / dim_, cap));
      log_keep += std::log1p(-axes_.back().tail_);
      radius2 += axes_.back().radius_ * axes_.back().radius_;
      log_rho_ += axes_.back().log_rho_;
    }
    tail_ = -std::expm1(log_keep);
    radius_ = std::sqrt(radius2);
    return;
  }

  std::vector<double> flat;
  std::vector<double> raw_norms;
  const std::function<void(const Vector&, double)> store = [&](const Vector& x, double q) {
    flat.insert(flat.end(), x.data(), x.data() + x.size());
    raw_norms.push_back(q);
  };
  // rel_err bounds omitted / kept; omitted / total is no larger.
  const ThetaEval e = generic_eval(lat, shift, sigma, rel_tail, cap, &store);
  radius_ = e.radius;
  tail_ = e.rel_err;

  const std::size_t m = raw_norms.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw_norms[a] < raw_norms[b]; });
  points_.resize(dim_, static_cast<Eigen::Index>(m));
  norms2_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    points_.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Vector>(flat.data() + order[i] * static_cast<std::size_t>(dim_), dim_);
    norms2_[i] = raw_norms[order[i]];
  }

  const double qmin = norms2_.front();
  const double s2 = 2.0 * sigma * sigma;
  std::vector<double> weights(m);
  CompensatedSum others;
  for (std::size_t i = 0; i < m; ++i) {
    weights[i] = std::exp(-(norms2_[i] - qmin) / s2);
    if (i > 0) others.add(weights[i]);
  }
  rest_ = others.value();
  const double rest = rest_;
  log_rho_ = -qmin / s2 + std::log1p(rest);
  const double total = 1.0 + rest;
  probs_.resize(m);
  cumulative_.resize(m);
  CompensatedSum acc;
  for (std::size_t i = 0; i < m; ++i) {
    probs_[i] = weights[i] / total;
    acc.add(probs_[i]);
    cumulative_[i] = acc.value();
  }
}

std::size_t CosetSupport::size() const {
  if (!factorized()) return probs_.size();
  std::size_t total = 1;
  for (const auto& ax : axes_) total *= ax.size();
  return total;
}

double CosetSupport::log_mass() const { return log_rho_ - normalizer_log(dim_, sigma_); }

double CosetSupport::mass() const { return std::exp(log_mass()); }

double CosetSupport::mean_sq_norm() const {
  CompensatedSum s;
  if (factorized()) {
    for (const auto& ax : axes_) s.add(ax.mean_sq_norm());
  } else {
    for (std::size_t i = 0; i < probs_.size(); ++i) s.add(probs_[i] * norms2_[i]);
  }
  return s.value();
}

double CosetSupport::entropy() const {
  if (factorized()) {
    CompensatedSum s;
    for (const auto& ax : axes_) s.add(ax.entropy());
    return s.value();
  }
  return log_rho_ + mean_sq_norm() / (2.0 * sigma_ * sigma_);
}

double CosetSupport::entropy_direct() const {
  CompensatedSum s;
  if (factorized()) {
    for (const auto& ax : axes_) s.add(ax.entropy_direct());
    return s.value();
  }
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double p = probs_[i];
    if (p <= 0.0) continue;
    // the leading probability is 1 / (1 + rest), possibly 1 - tiny
    const double logp = i == 0 ? -std::log1p(rest_) : std::log(p);
    s.add(-p * logp);
  }
  return s.value();
}

Vector CosetSupport::sample(RngStream& rng) const {
  if (factorized()) {
    Vector x(dim_);
    for (int i = 0; i < dim_; ++i) x(i) = axes_[static_cast<std::size_t>(i)].sample(rng)(0);
    return x;
  }
  const double u = rng.uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  if (idx >= probs_.size()) idx = probs_.size() - 1;
  return points_.col(static_cast<Eigen::Index>(idx));
}

}  // namespace dps
