#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace dps {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr std::size_t kDefaultEnumerationCap = 10'000'000;

enum class StandardName { Zn, Dn, E8, A2 };

// Structure recognised at construction; selects the closed-form decoders and
// the per-coordinate fast paths for theta sums and sampling.
enum class LatticeKind { Generic, Diagonal, Dn, E8 };

std::string_view to_string(LatticeKind kind);

// A lattice point: integer coefficients with respect to the basis plus the
// real embedding basis * coords. Equality is decided on coords.
struct LatticePoint {
  IntVector coords;
  Vector embedding;

  friend bool operator==(const LatticePoint& a, const LatticePoint& b) {
    return a.coords == b.coords;
  }
};

// A point of a coset Lambda + t: x = basis * coords + t.
struct CosetPoint {
  IntVector coords;
  Vector point;
  double norm2 = 0.0;
};

struct NldReport {
  double nld = 0.0;             // -(1/n) log V, nats per dimension
  double poltyrev_limit = 0.0;  // -(1/2) log(2 pi e sigma^2)
  double margin = 0.0;          // poltyrev_limit - nld
};

// Full-rank lattice in R^n. Columns of `basis` are the generators. Immutable:
// Gram matrix, inverse, volume, an LLL-reduced basis with its QR factors and
// the minimum distance are computed once in the constructor.
class Lattice {
 public:
  // Throws NonSquare or SingularBasis.
  explicit Lattice(Matrix basis, std::string name = {});

  // "Z<n>", "D<n>", "E8", "A2" (also "Zn(4)", "Dn(3)" spellings).
  static Lattice standard(std::string_view name);

  int dim() const { return static_cast<int>(basis_.cols()); }
  const Matrix& basis() const { return basis_; }
  const Matrix& gram() const { return gram_; }
  const Matrix& inverse_basis() const { return inverse_; }
  double volume() const { return volume_; }
  const std::string& name() const { return name_; }
  LatticeKind kind() const { return kind_; }
  // Point set equals kind_scale * (standard Z^n / D_n / E8) for those kinds.
  double kind_scale() const { return kind_scale_; }
  // Length of a shortest nonzero vector.
  double min_distance() const { return min_distance_; }

  // Diagonal basis entries; only meaningful when kind() == Diagonal.
  Vector diagonal() const { return basis_.diagonal(); }

  Lattice scaled(double factor) const;
  // Basis = inverse-transpose; V(dual) = 1 / V.
  Lattice dual() const;

  Vector embed(const IntVector& coords) const;
  // Nearest integer coefficient vector of x (exact for lattice points).
  IntVector coords_of(const Vector& x) const;
  // True when basis^{-1} x is integral within tol.
  bool contains(const Vector& x, double tol = 1e-9) const;
  // True when every generator of `sub` lies in this lattice (sub is a sublattice).
  bool contains_lattice(const Lattice& sub, double tol = 1e-9) const;

  // Enumeration data: reduced_basis() = basis() * unimodular(), and
  // reduced_basis() = q_factor() * r_factor() with r upper triangular.
  const Matrix& reduced_basis() const { return reduced_; }
  const IntMatrix& unimodular() const { return unimodular_; }
  const Matrix& q_factor() const { return q_; }
  const Matrix& r_factor() const { return r_; }

 private:
  struct Tag {};
  friend Lattice standard_lattice(StandardName name, int n);
  Lattice(Tag, Matrix basis, std::string name, LatticeKind kind, double kind_scale,
          std::optional<double> min_distance);
  void build_caches(std::optional<double> min_distance);

  Matrix basis_;
  Matrix gram_;
  Matrix inverse_;
  double volume_ = 0.0;
  std::string name_;
  LatticeKind kind_ = LatticeKind::Generic;
  double kind_scale_ = 1.0;
  Matrix reduced_;
  IntMatrix unimodular_;
  Matrix q_;
  Matrix r_;
  double min_distance_ = 0.0;
};

Lattice new_lattice(Matrix basis);

// Throws UnknownName for invalid dimension/name combinations.
Lattice standard_lattice(StandardName name, int n = 0);

Lattice dual(const Lattice& lattice);

// Exact closest lattice point. Ties are resolved to the lexicographically
// smallest coordinate vector. Throws DimensionMismatch.
LatticePoint closest_point(const Lattice& lattice, const Vector& y);

// x - closest_point(x): the representative of x in the Voronoi cell.
Vector mod_lattice(const Lattice& lattice, const Vector& x);

// All points of Lambda + t with norm <= radius. Throws BudgetExceeded when
// more than `cap` points qualify.
std::vector<CosetPoint> enumerate_coset(const Lattice& lattice, const Vector& shift, double radius,
                                        std::size_t cap = kDefaultEnumerationCap);

// Streaming variant: calls visit(point, norm2) for every point of the coset
// within radius, returns the number of points visited.
std::size_t visit_coset(const Lattice& lattice, const Vector& shift, double radius,
                        const std::function<void(const Vector&, double)>& visit,
                        std::size_t cap = kDefaultEnumerationCap);

// Construction A: {x in Z^n : x = G^T m (mod p)} for a k x n generator over F_p.
Lattice construction_a(const IntMatrix& generator, std::int64_t p);

// Construction A with a uniformly random rank-k generator (rejection sampled).
Lattice random_mod_p_lattice(int n, int k, std::int64_t p, std::uint64_t seed);

NldReport nld(const Lattice& lattice, double sigma);

bool is_prime(std::int64_t p);

}  // namespace dps
