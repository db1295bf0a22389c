#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "detail.hpp"
#include "dps/error.hpp"
#include "dps/lattice.hpp"

namespace dps {
namespace {

constexpr double kTieRel = 1e-12;

// Depth-first search over integer vectors c with ||r c - z||^2 <= radius2,
// children visited in Schnorr-Euchner zig-zag order. `leaf` receives the
// coefficient vector and its squared distance and may shrink radius2.
template <class Leaf>
void search_tree(const Matrix& r, const Vector& z, double& radius2, Leaf&& leaf) {
  const int n = static_cast<int>(r.cols());
  std::vector<std::int64_t> coeffs(n, 0);
  auto descend = [&](auto&& self, int k, double partial) -> void {
    double s = z(k);
    for (int j = k + 1; j < n; ++j) s -= r(k, j) * static_cast<double>(coeffs[j]);
    const double rkk = r(k, k);
    const double center = s / rkk;
    const double rkk2 = rkk * rkk;
    const double nearest = std::round(center);
    const std::int64_t base = static_cast<std::int64_t>(nearest);
    const std::int64_t step = nearest > center ? -1 : 1;
    for (std::int64_t i = 0;; ++i) {
      // base, base+step, base-step, base+2step, ... in nondecreasing distance
      const std::int64_t offset = (i % 2 == 1) ? step * ((i + 1) / 2) : -step * (i / 2);
      const std::int64_t value = base + offset;
      const double d = static_cast<double>(value) - center;
      const double next = partial + rkk2 * d * d;
      if (next > radius2) break;
      coeffs[k] = value;
      if (k == 0) {
        leaf(coeffs, next);
      } else {
        self(self, k - 1, next);
      }
    }
  };
  descend(descend, n - 1, 0.0);
}

// Plain bounded enumeration in increasing coefficient order.
template <class Leaf>
void enumerate_ball(const Matrix& r, const Vector& z, double radius2, Leaf&& leaf) {
  const int n = static_cast<int>(r.cols());
  std::vector<std::int64_t> coeffs(n, 0);
  auto descend = [&](auto&& self, int k, double partial) -> void {
    double s = z(k);
    for (int j = k + 1; j < n; ++j) s -= r(k, j) * static_cast<double>(coeffs[j]);
    const double rkk = r(k, k);
    const double center = s / rkk;
    const double rkk2 = rkk * rkk;
    const double remaining = radius2 - partial;
    if (remaining < 0.0) return;
    const double width = std::sqrt(remaining / rkk2);
    const auto lo = static_cast<std::int64_t>(std::ceil(center - width));
    const auto hi = static_cast<std::int64_t>(std::floor(center + width));
    for (std::int64_t v = lo; v <= hi; ++v) {
      const double d = static_cast<double>(v) - center;
      const double next = partial + rkk2 * d * d;
      if (next > radius2) continue;
      coeffs[k] = v;
      if (k == 0) {
        leaf(coeffs, next);
      } else {
        self(self, k - 1, next);
      }
    }
  };
  descend(descend, n - 1, 0.0);
}

struct RoundResult {
  double value;
  bool tie;
};

RoundResult round_checked(double x) {
  const double fl = std::floor(x);
  const double frac = x - fl;
  const double tol = kTieRel * std::max(1.0, std::abs(x)) * 1e3;
  if (std::abs(frac - 0.5) <= tol) return {fl, true};
  return {frac > 0.5 ? fl + 1.0 : fl, false};
}

// Closest point of the standard D_n = {x in Z^n : sum even}; nullopt on a tie.
std::optional<Vector> decode_dn(const Vector& x) {
  const Eigen::Index n = x.size();
  Vector f(n);
  std::int64_t parity = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = round_checked(x(i));
    if (r.tie) return std::nullopt;
    f(i) = r.value;
    parity += static_cast<std::int64_t>(r.value);
  }
  if (parity % 2 == 0) return f;
  Eigen::Index worst = 0;
  double worst_err = -1.0;
  double second_err = -1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double err = std::abs(x(i) - f(i));
    if (err > worst_err) {
      second_err = worst_err;
      worst_err = err;
      worst = i;
    } else if (err > second_err) {
      second_err = err;
    }
  }
  const double tol = kTieRel * std::max(1.0, x.cwiseAbs().maxCoeff()) * 1e3;
  if (worst_err <= tol || worst_err - second_err <= tol) return std::nullopt;
  f(worst) += x(worst) > f(worst) ? 1.0 : -1.0;
  return f;
}

// Closest point of E8 = D8 u (D8 + 1/2); nullopt on a tie.
std::optional<Vector> decode_e8(const Vector& x) {
  const Vector half = Vector::Constant(8, 0.5);
  auto a = decode_dn(x);
  auto b = decode_dn(x - half);
  if (!a || !b) return std::nullopt;
  Vector bb = *b + half;
  const double da = (x - *a).squaredNorm();
  const double db = (x - bb).squaredNorm();
  if (std::abs(da - db) <= kTieRel * std::max({1.0, da, db}) * 1e3) return std::nullopt;
  return da < db ? *a : bb;
}

LatticePoint generic_closest(const Lattice& lat, const Vector& y) {
  const Matrix& r = lat.r_factor();
  const Vector z = lat.q_factor().transpose() * y;
  const int n = lat.dim();

  // Babai point as the initial radius.
  Vector c(n);
  for (int k = n - 1; k >= 0; --k) {
    double s = z(k);
    for (int j = k + 1; j < n; ++j) s -= r(k, j) * c(j);
    c(k) = std::round(s / r(k, k));
  }
  const double babai = (r * c - z).squaredNorm();
  const double abs_eps = 1e-20 * r(0, 0) * r(0, 0);
  double radius2 = babai * (1.0 + 1e-9) + abs_eps;

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::vector<std::int64_t>, double>> candidates;
  search_tree(r, z, radius2, [&](const std::vector<std::int64_t>& coeffs, double dist) {
    const double limit = best * (1.0 + kTieRel) + abs_eps;
    if (dist < best) {
      best = dist;
      const double new_limit = best * (1.0 + kTieRel) + abs_eps;
      std::erase_if(candidates, [&](const auto& cand) { return cand.second > new_limit; });
      candidates.emplace_back(coeffs, dist);
      radius2 = new_limit;
    } else if (dist <= limit) {
      candidates.emplace_back(coeffs, dist);
    }
  });
  if (candidates.empty()) fail(ErrorCode::InternalMismatch, "closest point search found no candidate");

  const IntMatrix& u = lat.unimodular();
  std::optional<IntVector> chosen;
  for (const auto& cand : candidates) {
    IntVector reduced(n);
    for (int i = 0; i < n; ++i) reduced(i) = cand.first[i];
    IntVector coords = u * reduced;
    if (!chosen || std::lexicographical_compare(coords.data(), coords.data() + n, chosen->data(),
                                                chosen->data() + n)) {
      chosen = std::move(coords);
    }
  }
  LatticePoint p;
  p.coords = std::move(*chosen);
  p.embedding = lat.basis() * p.coords.cast<double>();
  return p;
}

}  // namespace

namespace detail {

double shortest_norm2(const Matrix& r) {
  const int n = static_cast<int>(r.cols());
  double radius2 = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) radius2 = std::min(radius2, r.col(j).squaredNorm());
  radius2 *= 1.0 + 1e-9;
  double best = std::numeric_limits<double>::infinity();
  const Vector z = Vector::Zero(n);
  search_tree(r, z, radius2, [&](const std::vector<std::int64_t>& coeffs, double dist) {
    if (std::all_of(coeffs.begin(), coeffs.end(), [](std::int64_t v) { return v == 0; })) return;
    if (dist < best) {
      best = dist;
      radius2 = dist;
    }
  });
  return best;
}

}  // namespace detail

LatticePoint closest_point(const Lattice& lat, const Vector& y) {
  if (y.size() != lat.dim()) fail(ErrorCode::DimensionMismatch, "target has wrong dimension");
  switch (lat.kind()) {
    case LatticeKind::Diagonal: {
      const Vector d = lat.diagonal();
      LatticePoint p;
      p.coords.resize(y.size());
      p.embedding.resize(y.size());
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double v = y(i) / d(i);
        const double fl = std::floor(v);
        // Exact halves go to the smaller coefficient.
        const double c = (v - fl > 0.5) ? fl + 1.0 : fl;
        p.coords(i) = static_cast<std::int64_t>(c);
        p.embedding(i) = c * d(i);
      }
      return p;
    }
    case LatticeKind::Dn:
    case LatticeKind::E8: {
      const double scale = lat.kind_scale();
      const Vector xs = y / scale;
      auto decoded = lat.kind() == LatticeKind::Dn ? decode_dn(xs) : decode_e8(xs);
      if (decoded) {
        LatticePoint p;
        p.embedding = scale * *decoded;
        p.coords = lat.coords_of(p.embedding);
        return p;
      }
      return generic_closest(lat, y);
    }
    case LatticeKind::Generic: break;
  }
  return generic_closest(lat, y);
}

Vector mod_lattice(const Lattice& lat, const Vector& x) { return x - closest_point(lat, x).embedding; }

std::size_t visit_coset(const Lattice& lat, const Vector& shift, double radius,
                        const std::function<void(const Vector&, double)>& visit, std::size_t cap) {
  if (shift.size() != lat.dim()) fail(ErrorCode::DimensionMismatch, "shift has wrong dimension");
  if (!(radius > 0.0) || !std::isfinite(radius)) fail(ErrorCode::InvalidParams, "radius must be positive");
  const double accept = radius * (1.0 + 1e-9);
  const double accept2 = accept * accept;
  const Vector z = -(lat.q_factor().transpose() * shift);
  const Matrix& reduced = lat.reduced_basis();
  const int n = lat.dim();
  Vector coeff(n);
  Vector point(n);
  std::size_t count = 0;
  enumerate_ball(lat.r_factor(), z, accept2 * (1.0 + 1e-9), [&](const std::vector<std::int64_t>& c, double) {
    for (int i = 0; i < n; ++i) coeff(i) = static_cast<double>(c[i]);
    point.noalias() = reduced * coeff;
    point += shift;
    const double norm2 = point.squaredNorm();
    if (norm2 > accept2) return;
    if (++count > cap) {
      fail(ErrorCode::BudgetExceeded, "coset enumeration exceeded " + std::to_string(cap) + " points");
    }
    visit(point, norm2);
  });
  return count;
}

std::vector<CosetPoint> enumerate_coset(const Lattice& lat, const Vector& shift, double radius,
                                        std::size_t cap) {
  std::vector<CosetPoint> out;
  visit_coset(
      lat, shift, radius,
      [&](const Vector& x, double norm2) {
        CosetPoint p;
        p.coords = lat.coords_of(x - shift);
        p.point = x;
        p.norm2 = norm2;
        out.push_back(std::move(p));
      },
      cap);
  return out;
}

}  // namespace dps
