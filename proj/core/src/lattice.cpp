#include "dps/lattice.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "detail.hpp"
#include "dps/error.hpp"
#include "dps/rng.hpp"

namespace dps {
namespace {

bool is_diagonal(const Matrix& b) {
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      if (i != j && b(i, j) != 0.0) return false;
    }
  }
  return true;
}

// Textbook LLL on the columns of b (delta = 0.99). Returns the reduced basis
// and the unimodular u with b * u = reduced.
void lll_reduce(const Matrix& b, Matrix& reduced, IntMatrix& u) {
  const Eigen::Index n = b.cols();
  reduced = b;
  u = IntMatrix::Identity(n, n);
  if (n < 2) return;

  constexpr double kDelta = 0.99;
  Matrix mu = Matrix::Zero(n, n);
  Vector bstar_norm2(n);
  Matrix bstar(b.rows(), n);

  auto gram_schmidt = [&]() {
    for (Eigen::Index i = 0; i < n; ++i) {
      bstar.col(i) = reduced.col(i);
      for (Eigen::Index j = 0; j < i; ++j) {
        mu(i, j) = reduced.col(i).dot(bstar.col(j)) / bstar_norm2(j);
        bstar.col(i) -= mu(i, j) * bstar.col(j);
      }
      bstar_norm2(i) = bstar.col(i).squaredNorm();
    }
  };

  gram_schmidt();
  Eigen::Index k = 1;
  std::size_t guard = 0;
  while (k < n) {
    if (++guard > 100000) break;  // floating-point safety net; basis stays valid
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      const double q = std::round(mu(k, j));
      if (q != 0.0) {
        const auto qi = static_cast<std::int64_t>(q);
        reduced.col(k) -= q * reduced.col(j);
        u.col(k) -= qi * u.col(j);
        for (Eigen::Index i = 0; i <= j; ++i) mu(k, i) -= q * (i == j ? 1.0 : mu(j, i));
      }
    }
    if (bstar_norm2(k) >= (kDelta - mu(k, k - 1) * mu(k, k - 1)) * bstar_norm2(k - 1)) {
      ++k;
    } else {
      reduced.col(k).swap(reduced.col(k - 1));
      u.col(k).swap(u.col(k - 1));
      gram_schmidt();
      k = std::max<Eigen::Index>(k - 1, 1);
    }
  }
}

std::int64_t mod_p(std::int64_t a, std::int64_t p) {
  const std::int64_t r = a % p;
  return r < 0 ? r + p : r;
}

std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t p) {
  __extension__ using Wide = __int128;
  return static_cast<std::int64_t>((static_cast<Wide>(a) * b) % p);
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t p) {
  std::int64_t result = 1;
  std::int64_t base = mod_p(a, p);
  std::int64_t e = p - 2;
  while (e > 0) {
    if (e & 1) result = mul_mod(result, base, p);
    base = mul_mod(base, base, p);
    e >>= 1;
  }
  return result;
}

// Reduced row echelon form over F_p in place; returns pivot columns.
std::vector<Eigen::Index> rref_mod_p(IntMatrix& g, std::int64_t p) {
  std::vector<Eigen::Index> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < g.cols() && row < g.rows(); ++col) {
    Eigen::Index sel = -1;
    for (Eigen::Index i = row; i < g.rows(); ++i) {
      if (g(i, col) != 0) {
        sel = i;
        break;
      }
    }
    if (sel < 0) continue;
    g.row(sel).swap(g.row(row));
    const std::int64_t inv = inverse_mod(g(row, col), p);
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(row, j) = mul_mod(g(row, j), inv, p);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      if (i == row || g(i, col) == 0) continue;
      const std::int64_t f = g(i, col);
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        g(i, j) = mod_p(g(i, j) - mul_mod(f, g(row, j), p), p);
      }
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

int parse_dimension(std::string_view digits) {
  int value = 0;
  const auto* first = digits.data();
  const auto* last = digits.data() + digits.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || digits.empty()) return -1;
  return value;
}

std::string format_scale(double c) {
  std::ostringstream os;
  os.precision(6);
  os << c;
  return os.str();
}

}  // namespace

std::string_view to_string(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::Generic: return "generic";
    case LatticeKind::Diagonal: return "diagonal";
    case LatticeKind::Dn: return "Dn";
    case LatticeKind::E8: return "E8";
  }
  return "generic";
}

Lattice::Lattice(Matrix basis, std::string name) : basis_(std::move(basis)), name_(std::move(name)) {
  if (basis_.rows() != basis_.cols() || basis_.rows() == 0) {
    fail(ErrorCode::NonSquare, "basis must be a non-empty square matrix, got " +
                                   std::to_string(basis_.rows()) + "x" +
                                   std::to_string(basis_.cols()));
  }
  const double det = basis_.determinant();
  const Vector singular = basis_.jacobiSvd().singularValues();
  if (!std::isfinite(det) || det == 0.0 || !(singular(singular.size() - 1) > 1e-12 * singular(0))) {
    fail(ErrorCode::SingularBasis, "basis determinant " + std::to_string(det) + " is below threshold");
  }
  kind_ = is_diagonal(basis_) ? LatticeKind::Diagonal : LatticeKind::Generic;
  build_caches(std::nullopt);
}

Lattice::Lattice(Tag, Matrix basis, std::string name, LatticeKind kind, double kind_scale,
                 std::optional<double> min_distance)
    : basis_(std::move(basis)), name_(std::move(name)), kind_(kind), kind_scale_(kind_scale) {
  if (kind_ != LatticeKind::Diagonal && is_diagonal(basis_)) kind_ = LatticeKind::Diagonal;
  build_caches(min_distance);
}

void Lattice::build_caches(std::optional<double> min_distance) {
  gram_ = basis_.transpose() * basis_;
  inverse_ = basis_.partialPivLu().inverse();
  volume_ = std::abs(basis_.determinant());
  lll_reduce(basis_, reduced_, unimodular_);
  Eigen::HouseholderQR<Matrix> qr(reduced_);
  q_ = qr.householderQ();
  r_ = qr.matrixQR().triangularView<Eigen::Upper>();
  if (min_distance) {
    min_distance_ = *min_distance;
  } else if (kind_ == LatticeKind::Diagonal) {
    min_distance_ = basis_.diagonal().cwiseAbs().minCoeff();
  } else {
    min_distance_ = std::sqrt(detail::shortest_norm2(r_));
  }
}

Lattice Lattice::standard(std::string_view name) {
  std::string s(name);
  std::erase_if(s, [](char ch) { return std::isspace(static_cast<unsigned char>(ch)) != 0; });
  if (s.empty()) fail(ErrorCode::UnknownName, "empty lattice name");
  const char head = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  std::string_view rest(s);
  rest.remove_prefix(1);
  // Accept Zn(4), Zn4, Z^4, Z4.
  if (!rest.empty() && (rest[0] == 'n' || rest[0] == '^')) rest.remove_prefix(1);
  if (rest.size() >= 2 && rest.front() == '(' && rest.back() == ')') {
    rest.remove_prefix(1);
    rest.remove_suffix(1);
  }
  const int n = parse_dimension(rest);
  switch (head) {
    case 'Z': return standard_lattice(StandardName::Zn, n);
    case 'D': return standard_lattice(StandardName::Dn, n);
    case 'E':
      if (n != 8) break;
      return standard_lattice(StandardName::E8, 8);
    case 'A':
      if (n != 2) break;
      return standard_lattice(StandardName::A2, 2);
    default: break;
  }
  fail(ErrorCode::UnknownName, "unknown lattice '" + std::string(name) + "'");
}

Lattice standard_lattice(StandardName name, int n) {
  switch (name) {
    case StandardName::Zn: {
      if (n < 1 || n > 64) fail(ErrorCode::UnknownName, "Zn needs 1 <= n <= 64");
      return Lattice(Matrix::Identity(n, n), "Z" + std::to_string(n));
    }
    case StandardName::Dn: {
      if (n < 1 || n > 64) fail(ErrorCode::UnknownName, "Dn needs 1 <= n <= 64");
      // Rows (-1,-1,0..), (1,-1,0..), (0,1,-1,..), ...; columns are generators.
      Matrix rows = Matrix::Zero(n, n);
      if (n == 1) {
        rows(0, 0) = 2.0;
      } else {
        rows(0, 0) = -1.0;
        rows(0, 1) = -1.0;
        for (int i = 1; i < n; ++i) {
          rows(i, i - 1) = 1.0;
          rows(i, i) = -1.0;
        }
      }
      Lattice lat(rows.transpose(), "D" + std::to_string(n));
      return Lattice(Lattice::Tag{}, lat.basis(), lat.name(), LatticeKind::Dn, 1.0,
                     n == 1 ? 2.0 : std::numbers::sqrt2);
    }
    case StandardName::E8: {
      if (n != 0 && n != 8) fail(ErrorCode::UnknownName, "E8 is 8-dimensional");
      Matrix rows = Matrix::Zero(8, 8);
      rows(0, 0) = 2.0;
      for (int i = 1; i < 7; ++i) {
        rows(i, i - 1) = -1.0;
        rows(i, i) = 1.0;
      }
      rows.row(7).setConstant(0.5);
      return Lattice(Lattice::Tag{}, rows.transpose(), "E8", LatticeKind::E8, 1.0, std::numbers::sqrt2);
    }
    case StandardName::A2: {
      if (n != 0 && n != 2) fail(ErrorCode::UnknownName, "A2 is 2-dimensional");
      Matrix b(2, 2);
      b << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
      return Lattice(b, "A2");
    }
  }
  fail(ErrorCode::UnknownName, "unknown standard lattice");
}

Lattice new_lattice(Matrix basis) { return Lattice(std::move(basis)); }

Lattice Lattice::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    fail(ErrorCode::InvalidParams, "scale factor must be positive");
  }
  std::string scaled_name = name_.empty() ? std::string{} : format_scale(factor) + "*" + name_;
  return Lattice(Tag{}, factor * basis_, std::move(scaled_name), kind_, kind_scale_ * factor,
                 min_distance_ * factor);
}

Lattice Lattice::dual() const {
  Matrix dual_basis = inverse_.transpose();
  std::string dual_name = name_.empty() ? std::string{} : name_ + "*";
  if (kind_ == LatticeKind::E8) {
    // E8 is unimodular: the dual of c*E8 is (1/c)*E8.
    return Lattice(Tag{}, std::move(dual_basis), std::move(dual_name), LatticeKind::E8,
                   1.0 / kind_scale_, std::numbers::sqrt2 / kind_scale_);
  }
  return Lattice(Tag{}, std::move(dual_basis), std::move(dual_name), LatticeKind::Generic, 1.0,
                 std::nullopt);
}

Lattice dual(const Lattice& lattice) { return lattice.dual(); }

Vector Lattice::embed(const IntVector& coords) const {
  if (coords.size() != dim()) fail(ErrorCode::DimensionMismatch, "coordinate vector has wrong size");
  return basis_ * coords.cast<double>();
}

IntVector Lattice::coords_of(const Vector& x) const {
  if (x.size() != dim()) fail(ErrorCode::DimensionMismatch, "vector has wrong size");
  const Vector c = inverse_ * x;
  IntVector out(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) out(i) = std::llround(c(i));
  return out;
}

bool Lattice::contains(const Vector& x, double tol) const {
  if (x.size() != dim()) fail(ErrorCode::DimensionMismatch, "vector has wrong size");
  const Vector c = inverse_ * x;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (std::abs(c(i) - std::round(c(i))) > tol) return false;
  }
  return true;
}

bool Lattice::contains_lattice(const Lattice& sub, double tol) const {
  if (sub.dim() != dim()) return false;
  for (Eigen::Index j = 0; j < sub.basis().cols(); ++j) {
    if (!contains(sub.basis().col(j), tol)) return false;
  }
  return true;
}

bool is_prime(std::int64_t p) {
  if (p < 2) return false;
  for (std::int64_t d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

Lattice construction_a(const IntMatrix& generator, std::int64_t p) {
  if (!is_prime(p)) fail(ErrorCode::InvalidParams, "p must be prime");
  const Eigen::Index k = generator.rows();
  const Eigen::Index n = generator.cols();
  if (k < 1 || k > n) fail(ErrorCode::InvalidParams, "need 0 < k <= n");
  IntMatrix g = generator.unaryExpr([p](std::int64_t v) { return mod_p(v, p); });
  const auto pivots = rref_mod_p(g, p);
  if (static_cast<Eigen::Index>(pivots.size()) != k) {
    fail(ErrorCode::InvalidParams, "generator does not have full rank over F_p");
  }
  Matrix basis = Matrix::Zero(n, n);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < k; ++i) basis.col(col++) = g.row(i).transpose().cast<double>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::find(pivots.begin(), pivots.end(), j) != pivots.end()) continue;
    basis(j, col++) = static_cast<double>(p);
  }
  std::ostringstream name;
  name << "ConstructionA(n=" << n << ",k=" << k << ",p=" << p << ")";
  return Lattice(std::move(basis), name.str());
}

Lattice random_mod_p_lattice(int n, int k, std::int64_t p, std::uint64_t seed) {
  if (n < 1 || k < 1 || k > n) fail(ErrorCode::InvalidParams, "need 0 < k <= n");
  if (!is_prime(p)) fail(ErrorCode::InvalidParams, "p must be prime");
  RngStream rng(seed, 0x6d6f6470);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    IntMatrix g(k, n);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < n; ++j) g(i, j) = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(p)));
    }
    IntMatrix echelon = g;
    if (static_cast<int>(rref_mod_p(echelon, p).size()) == k) return construction_a(g, p);
  }
  fail(ErrorCode::InvalidParams, "could not draw a full-rank generator");
}

NldReport nld(const Lattice& lattice, double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::NonPositive, "sigma must be positive");
  NldReport report;
  report.nld = -std::log(lattice.volume()) / lattice.dim();
  report.poltyrev_limit = -0.5 * std::log(detail::kTwoPiE * sigma * sigma);
  report.margin = report.poltyrev_limit - report.nld;
  return report;
}

}  // namespace dps
