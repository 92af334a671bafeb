#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pxg/point.hpp"

namespace pxg {

enum class RegionKind { Gabriel, RelativeNeighborhood, TemplateIsotropic };

std::string_view to_string(RegionKind kind);

/// Orthogonal map of R^d. Either the identity, a rotation acting in a
/// single plane span{a, b} (a, b orthonormal) and fixing its orthogonal
/// complement, or, in d = 1 only, the reflection v -> -v.
class Rotation {
 public:
  static Rotation identity(std::size_t dim);

  /// The rotation taking unit vector `from` to unit vector `to` that fixes
  /// the orthogonal complement of span{from, to}. For antiparallel inputs in
  /// d >= 2 the plane is span{from, e_k}, e_k the first standard basis vector
  /// not parallel to `from`.
  static Rotation between(const Point& from, const Point& to);

  Point apply(const Point& v) const { return rotate(v, sin_); }
  Point apply_inverse(const Point& v) const { return rotate(v, -sin_); }

  /// Row-major d x d matrix.
  std::vector<double> matrix() const;

  std::size_t dim() const { return dim_; }

 private:
  enum class Mode { Identity, Plane, Reflection };

  Point rotate(const Point& v, double sin_theta) const;

  Mode mode_ = Mode::Identity;
  std::size_t dim_ = 0;
  Point a_, b_;
  double cos_ = 1.0;
  double sin_ = 0.0;
};

/// Validating wrapper around Rotation::between; throws on non-unit inputs.
Rotation rotation_to(const Point& u0, const Point& u);

/// Base set S of an isotropic family, in template coordinates where the
/// generating pair sits at +-axis/2.
class TemplateShape {
 public:
  virtual ~TemplateShape() = default;
  virtual bool contains(const Point& w) const = 0;
  virtual std::string_view name() const = 0;
  virtual std::size_t dim() const = 0;
  /// Every point of the shape satisfies |w| <= bounding_radius().
  virtual double bounding_radius() const = 0;
};

std::shared_ptr<const TemplateShape> make_ball_template(std::size_t dim, double radius = 0.5);
/// B°(axis/2, 1) ∩ B°(-axis/2, 1).
std::shared_ptr<const TemplateShape> make_lens_template(const Point& axis);
/// {w : inner < |w| < 1/2, |<w, axis>| > cos(half_angle) |w|}.
std::shared_ptr<const TemplateShape> make_annulus_sector_template(const Point& axis, double inner_radius,
                                                                  double half_angle_rad);
/// Signed-distance sample grid; w is inside when the multilinear interpolant
/// is negative. File layout (little-endian): u32 d, u32 resolution,
/// f64[d] lower corner, f64[d] upper corner, f64[resolution^d] values with
/// the last axis varying fastest.
std::shared_ptr<const TemplateShape> load_sdf_template(const std::string& path);
std::shared_ptr<const TemplateShape> make_sdf_template(std::size_t dim, std::size_t resolution, Point lower,
                                                       Point upper, std::vector<double> values);
void write_sdf_template(const std::string& path, std::size_t dim, std::size_t resolution, const Point& lower,
                        const Point& upper, std::span<const double> values);

/// User-certified geometric constants of an isotropic family.
struct IsotropicConstants {
  double normalized_diameter = 1.0;
  double scaled_ball_delta = 0.0;
  Ball inscribed;  ///< open ball inside S, template coordinates
};

class ForbiddenRegionFamily;

/// The forbidden region S(x, y) of one generating pair.
class Region {
 public:
  /// z ∈ S(x, y); the generating points themselves are never members.
  bool contains(const Point& z) const;
  /// z in the closure of S(x, y). Exact for the canonical families; for
  /// template families, membership of z or one of 2d jittered copies at
  /// distance 1e-6 |x - y|.
  bool closure_contains(const Point& z) const;

  /// Certified closed ball containing S(x, y).
  Ball bounding_ball() const;
  /// Certified open ball inside S(x, y).
  Ball inscribed_ball() const;

  /// Template coordinates -> world coordinates.
  Point to_world(const Point& w) const;

  const Point& first() const { return x_; }
  const Point& second() const { return y_; }
  const Point& mid() const { return mid_; }
  double length() const { return len_; }
  const ForbiddenRegionFamily& family() const { return *family_; }

 private:
  friend class ForbiddenRegionFamily;
  Region() = default;

  Rotation frame() const;

  const ForbiddenRegionFamily* family_ = nullptr;
  Point x_, y_, mid_;
  double len_ = 0.0;
  double len2_ = 0.0;
  std::optional<Rotation> rot_;
};

/// A collection of forbidden regions S(x, y) with its certified constants.
/// Immutable after construction; safe to share across threads.
class ForbiddenRegionFamily {
 public:
  static ForbiddenRegionFamily gabriel(std::size_t dim);
  static ForbiddenRegionFamily relative_neighborhood(std::size_t dim);
  static ForbiddenRegionFamily isotropic(std::shared_ptr<const TemplateShape> shape, const Point& axis,
                                         IsotropicConstants constants);
  /// Annulus-sector family with default certified constants.
  static ForbiddenRegionFamily annulus_sector(std::size_t dim, double inner_radius = 0.1,
                                              double half_angle_rad = 0.7853981633974483);

  RegionKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  double normalized_diameter() const { return diameter_; }
  double scaled_ball_delta() const { return delta_; }
  const Ball& inscribed_template_ball() const { return inscribed_; }
  /// Radius of the certified bounding ball of S(x, y) in units of |x - y|.
  double bounding_factor() const { return bound_factor_; }
  const Point& axis() const { return axis_; }
  const TemplateShape& shape() const { return *shape_; }
  std::string name() const;

  /// Deterministic points of the closure of S in template coordinates:
  /// interior samples, inscribed-ball extremes and the endpoints +-axis/2.
  std::span<const Point> template_samples() const { return samples_; }

  /// Throws std::invalid_argument when x == y or dimensions disagree.
  Region region(const Point& x, const Point& y) const;

  bool contains(const Point& x, const Point& y, const Point& z) const;

 private:
  ForbiddenRegionFamily() = default;
  void build_samples();

  RegionKind kind_ = RegionKind::Gabriel;
  std::size_t dim_ = 0;
  Point axis_;
  std::shared_ptr<const TemplateShape> shape_;
  double diameter_ = 1.0;
  double delta_ = 0.5;
  Ball inscribed_;
  double bound_factor_ = 0.5;  ///< bounding ball radius / |x - y|
  std::vector<Point> samples_;
};

struct CertificateReport {
  std::size_t trials = 0;
  std::size_t symmetry_violations = 0;
  std::size_t endpoint_violations = 0;
  std::size_t translation_violations = 0;
  std::size_t scale_violations = 0;
  std::size_t diameter_violations = 0;
  std::size_t inscribed_violations = 0;
  /// Largest pairwise distance found inside S(u), |x - y| = 1.
  double sampled_diameter = 0.0;
  std::vector<std::string> messages;

  bool ok() const {
    return symmetry_violations + endpoint_violations + translation_violations + scale_violations +
               diameter_violations + inscribed_violations ==
           0;
  }
};

/// Randomized validation of the family's invariants and declared constants.
/// Violations are reported, never thrown.
CertificateReport certify_constants(const ForbiddenRegionFamily& family, std::size_t trials, std::uint64_t seed);

}  // namespace pxg
