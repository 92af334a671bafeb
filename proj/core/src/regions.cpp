#include "pxg/regions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pxg/random.hpp"

namespace pxg {

std::string_view to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::Gabriel:
      return "gabriel";
    case RegionKind::RelativeNeighborhood:
      return "rng";
    case RegionKind::TemplateIsotropic:
      return "template";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Rotation

Rotation Rotation::identity(std::size_t dim) {
  Rotation r;
  r.dim_ = dim;
  return r;
}

Rotation Rotation::between(const Point& from, const Point& to) {
  const std::size_t d = from.dim();
  Rotation r = identity(d);
  if (d == 1) {
    if (from[0] * to[0] < 0.0) r.mode_ = Mode::Reflection;
    return r;
  }
  const double c = dot(from, to);
  Point perp = to - c * from;
  double s = norm(perp);
  if (s == 0.0) {
    if (c > 0.0) return r;
    // Antiparallel: half-turn in span{from, e_k}.
    std::size_t k = 0;
    for (; k < d; ++k) {
      if (std::fabs(std::fabs(from[k]) - 1.0) > 1e-12) break;
    }
    Point e = Point::unit(d, k == d ? 0 : k);
    perp = e - dot(e, from) * from;
    r.mode_ = Mode::Plane;
    r.a_ = from;
    r.b_ = (1.0 / norm(perp)) * perp;
    r.cos_ = -1.0;
    r.sin_ = 0.0;
    return r;
  }
  perp *= 1.0 / s;
  // One re-orthogonalization pass against cancellation in `to - c from`.
  perp -= dot(perp, from) * from;
  perp *= 1.0 / norm(perp);
  r.mode_ = Mode::Plane;
  r.a_ = from;
  r.b_ = perp;
  r.cos_ = c;
  r.sin_ = s;
  return r;
}

Point Rotation::rotate(const Point& v, double sin_theta) const {
  switch (mode_) {
    case Mode::Identity:
      return v;
    case Mode::Reflection:
      return -v;
    case Mode::Plane:
      break;
  }
  const double va = dot(v, a_);
  const double vb = dot(v, b_);
  Point out = v;
  const double ca = (cos_ - 1.0) * va - sin_theta * vb;
  const double cb = (cos_ - 1.0) * vb + sin_theta * va;
  for (std::size_t k = 0; k < dim_; ++k) out[k] += ca * a_[k] + cb * b_[k];
  return out;
}

std::vector<double> Rotation::matrix() const {
  std::vector<double> m(dim_ * dim_, 0.0);
  for (std::size_t col = 0; col < dim_; ++col) {
    const Point image = apply(Point::unit(dim_, col));
    for (std::size_t row = 0; row < dim_; ++row) m[row * dim_ + col] = image[row];
  }
  return m;
}

Rotation rotation_to(const Point& u0, const Point& u) {
  if (u0.dim() != u.dim()) throw std::invalid_argument("rotation_to: dimension mismatch");
  if (std::fabs(norm(u0) - 1.0) > 1e-9 || std::fabs(norm(u) - 1.0) > 1e-9) {
    throw std::invalid_argument("rotation_to: inputs must be unit vectors");
  }
  return Rotation::between(u0, u);
}

// ---------------------------------------------------------------------------
// Template shapes

namespace {

class BallTemplate final : public TemplateShape {
 public:
  BallTemplate(std::size_t dim, double radius) : dim_(dim), r2_(radius * radius), r_(radius) {}
  bool contains(const Point& w) const override { return squared_norm(w) < r2_; }
  std::string_view name() const override { return "ball"; }
  std::size_t dim() const override { return dim_; }
  double bounding_radius() const override { return r_; }

 private:
  std::size_t dim_;
  double r2_, r_;
};

class LensTemplate final : public TemplateShape {
 public:
  explicit LensTemplate(const Point& axis) : half_(0.5 * axis) {}
  bool contains(const Point& w) const override {
    return squared_distance(w, half_) < 1.0 && squared_distance(w, -half_) < 1.0;
  }
  std::string_view name() const override { return "lens"; }
  std::size_t dim() const override { return half_.dim(); }
  double bounding_radius() const override { return std::sqrt(3.0) / 2.0; }

 private:
  Point half_;
};

class AnnulusSectorTemplate final : public TemplateShape {
 public:
  AnnulusSectorTemplate(const Point& axis, double inner, double half_angle)
      : axis_(axis), inner2_(inner * inner), cos2_(std::cos(half_angle) * std::cos(half_angle)) {}
  bool contains(const Point& w) const override {
    const double n2 = squared_norm(w);
    if (!(n2 > inner2_ && n2 < 0.25)) return false;
    const double p = dot(w, axis_);
    return p * p > cos2_ * n2;
  }
  std::string_view name() const override { return "annulus-sector"; }
  std::size_t dim() const override { return axis_.dim(); }
  double bounding_radius() const override { return 0.5; }

 private:
  Point axis_;
  double inner2_, cos2_;
};

class SdfGridTemplate final : public TemplateShape {
 public:
  SdfGridTemplate(std::size_t dim, std::size_t res, Point lower, Point upper, std::vector<double> values)
      : dim_(dim), res_(res), lower_(lower), upper_(upper), values_(std::move(values)) {
    if (res_ < 2) throw std::invalid_argument("sdf template: resolution must be >= 2");
    std::size_t expected = 1;
    for (std::size_t k = 0; k < dim_; ++k) {
      if (!(upper_[k] > lower_[k])) throw std::invalid_argument("sdf template: empty bounding box");
      expected *= res_;
    }
    if (values_.size() != expected) throw std::invalid_argument("sdf template: value count mismatch");
    radius_ = std::max(norm(lower_), norm(upper_));
    for (std::size_t corner = 0; corner < (std::size_t{1} << dim_); ++corner) {
      Point c(dim_);
      for (std::size_t k = 0; k < dim_; ++k) c[k] = (corner >> k & 1U) ? upper_[k] : lower_[k];
      radius_ = std::max(radius_, norm(c));
    }
  }

  bool contains(const Point& w) const override {
    std::array<std::size_t, kMaxDim> base{};
    std::array<double, kMaxDim> frac{};
    for (std::size_t k = 0; k < dim_; ++k) {
      if (!(w[k] >= lower_[k] && w[k] <= upper_[k])) return false;
      const double g = (w[k] - lower_[k]) / (upper_[k] - lower_[k]) * static_cast<double>(res_ - 1);
      std::size_t i = static_cast<std::size_t>(g);
      if (i >= res_ - 1) i = res_ - 2;
      base[k] = i;
      frac[k] = g - static_cast<double>(i);
    }
    double value = 0.0;
    for (std::size_t corner = 0; corner < (std::size_t{1} << dim_); ++corner) {
      double weight = 1.0;
      std::size_t flat = 0;
      for (std::size_t k = 0; k < dim_; ++k) {
        const bool hi = (corner >> k) & 1U;
        weight *= hi ? frac[k] : 1.0 - frac[k];
        flat = flat * res_ + base[k] + (hi ? 1 : 0);
      }
      if (weight != 0.0) value += weight * values_[flat];
    }
    return value < 0.0;
  }
  std::string_view name() const override { return "sdf-grid"; }
  std::size_t dim() const override { return dim_; }
  double bounding_radius() const override { return radius_; }

 private:
  std::size_t dim_, res_;
  Point lower_, upper_;
  std::vector<double> values_;
  double radius_ = 0.0;
};

void check_axis(const Point& axis) {
  if (axis.dim() == 0) throw std::invalid_argument("template axis must have a dimension");
  if (std::fabs(norm(axis) - 1.0) > 1e-9) throw std::invalid_argument("template axis must be a unit vector");
}

template <class T>
void put_le(std::ostream& out, T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    out.write(bytes.data(), bytes.size());
  } else {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }
}

template <class T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes{};
  if (!in.read(bytes.data(), bytes.size())) throw std::runtime_error("sdf template: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

}  // namespace

std::shared_ptr<const TemplateShape> make_ball_template(std::size_t dim, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball template radius must be positive");
  return std::make_shared<BallTemplate>(dim, radius);
}

std::shared_ptr<const TemplateShape> make_lens_template(const Point& axis) {
  check_axis(axis);
  return std::make_shared<LensTemplate>(axis);
}

std::shared_ptr<const TemplateShape> make_annulus_sector_template(const Point& axis, double inner_radius,
                                                                  double half_angle_rad) {
  check_axis(axis);
  if (!(inner_radius >= 0.0 && inner_radius < 0.5)) {
    throw std::invalid_argument("annulus-sector inner radius must lie in [0, 1/2)");
  }
  if (!(half_angle_rad > 0.0 && half_angle_rad <= 1.5707963267948966)) {
    throw std::invalid_argument("annulus-sector half angle must lie in (0, pi/2]");
  }
  return std::make_shared<AnnulusSectorTemplate>(axis, inner_radius, half_angle_rad);
}

std::shared_ptr<const TemplateShape> make_sdf_template(std::size_t dim, std::size_t resolution, Point lower,
                                                       Point upper, std::vector<double> values) {
  return std::make_shared<SdfGridTemplate>(dim, resolution, lower, upper, std::move(values));
}

std::shared_ptr<const TemplateShape> load_sdf_template(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open sdf template file: " + path);
  const auto dim = get_le<std::uint32_t>(in);
  const auto res = get_le<std::uint32_t>(in);
  if (dim == 0 || dim > kMaxDim) throw std::runtime_error("sdf template: bad dimension");
  Point lower(dim), upper(dim);
  for (std::size_t k = 0; k < dim; ++k) lower[k] = get_le<double>(in);
  for (std::size_t k = 0; k < dim; ++k) upper[k] = get_le<double>(in);
  std::size_t count = 1;
  for (std::size_t k = 0; k < dim; ++k) count *= res;
  std::vector<double> values(count);
  for (auto& v : values) v = get_le<double>(in);
  return make_sdf_template(dim, res, lower, upper, std::move(values));
}

void write_sdf_template(const std::string& path, std::size_t dim, std::size_t resolution, const Point& lower,
                        const Point& upper, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write sdf template file: " + path);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dim));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(resolution));
  for (std::size_t k = 0; k < dim; ++k) put_le<double>(out, lower[k]);
  for (std::size_t k = 0; k < dim; ++k) put_le<double>(out, upper[k]);
  for (double v : values) put_le<double>(out, v);
}

// ---------------------------------------------------------------------------
// Region

Rotation Region::frame() const {
  if (rot_) return *rot_;
  const Point u = (1.0 / len_) * (x_ - y_);
  return Rotation::between(family_->axis(), u);
}

bool Region::contains(const Point& z) const {
  if (z == x_ || z == y_) return false;
  switch (family_->kind()) {
    case RegionKind::Gabriel: {
      double s = 0.0;
      for (std::size_t k = 0; k < z.dim(); ++k) s += (z[k] - x_[k]) * (z[k] - y_[k]);
      return s < 0.0;
    }
    case RegionKind::RelativeNeighborhood:
      return squared_distance(z, x_) < len2_ && squared_distance(z, y_) < len2_;
    case RegionKind::TemplateIsotropic: {
      const Point w = rot_->apply_inverse((1.0 / len_) * (z - mid_));
      return family_->shape().contains(w);
    }
  }
  return false;
}

bool Region::closure_contains(const Point& z) const {
  switch (family_->kind()) {
    case RegionKind::Gabriel: {
      double s = 0.0;
      for (std::size_t k = 0; k < z.dim(); ++k) s += (z[k] - x_[k]) * (z[k] - y_[k]);
      return s <= 0.0;
    }
    case RegionKind::RelativeNeighborhood:
      return squared_distance(z, x_) <= len2_ && squared_distance(z, y_) <= len2_;
    case RegionKind::TemplateIsotropic:
      break;
  }
  if (z == x_ || z == y_ || contains(z)) return true;
  const double jitter = 1e-6 * len_;
  for (std::size_t k = 0; k < z.dim(); ++k) {
    Point p = z;
    p[k] += jitter;
    if (contains(p)) return true;
    p[k] = z[k] - jitter;
    if (contains(p)) return true;
  }
  return false;
}

Ball Region::bounding_ball() const {
  return {mid_, family_->bounding_factor() * len_ * (1.0 + 1e-12)};
}

Ball Region::inscribed_ball() const {
  const Ball& t = family_->inscribed_template_ball();
  if (t.center == Point(t.center.dim())) return {mid_, t.radius * len_};
  return {to_world(t.center), t.radius * len_};
}

Point Region::to_world(const Point& w) const {
  return mid_ + len_ * frame().apply(w);
}

// ---------------------------------------------------------------------------
// ForbiddenRegionFamily

ForbiddenRegionFamily ForbiddenRegionFamily::gabriel(std::size_t dim) {
  ForbiddenRegionFamily f;
  f.kind_ = RegionKind::Gabriel;
  f.dim_ = dim;
  f.axis_ = Point::unit(dim, 0);
  f.shape_ = make_ball_template(dim, 0.5);
  f.diameter_ = 1.0;
  f.delta_ = 0.5;
  f.inscribed_ = {Point(dim), 0.5};
  f.bound_factor_ = 0.5;
  f.build_samples();
  return f;
}

ForbiddenRegionFamily ForbiddenRegionFamily::relative_neighborhood(std::size_t dim) {
  ForbiddenRegionFamily f;
  f.kind_ = RegionKind::RelativeNeighborhood;
  f.dim_ = dim;
  f.axis_ = Point::unit(dim, 0);
  f.shape_ = make_lens_template(f.axis_);
  f.diameter_ = std::sqrt(3.0);
  f.delta_ = 0.5;
  f.inscribed_ = {Point(dim), 0.5};
  f.bound_factor_ = std::sqrt(3.0) / 2.0;
  f.build_samples();
  return f;
}

ForbiddenRegionFamily ForbiddenRegionFamily::isotropic(std::shared_ptr<const TemplateShape> shape,
                                                       const Point& axis, IsotropicConstants constants) {
  if (!shape) throw std::invalid_argument("isotropic family needs a template shape");
  check_axis(axis);
  if (shape->dim() != axis.dim()) throw std::invalid_argument("template and axis dimensions differ");
  if (!(constants.normalized_diameter >= 1.0) || !std::isfinite(constants.normalized_diameter)) {
    throw std::invalid_argument("normalized diameter must be finite and >= 1");
  }
  if (!(constants.scaled_ball_delta > 0.0)) throw std::invalid_argument("scaled-ball delta must be positive");
  if (constants.inscribed.center.dim() != axis.dim() || !(constants.inscribed.radius > 0.0)) {
    throw std::invalid_argument("inscribed ball must have the family's dimension and a positive radius");
  }
  ForbiddenRegionFamily f;
  f.kind_ = RegionKind::TemplateIsotropic;
  f.dim_ = axis.dim();
  f.axis_ = axis;
  f.shape_ = std::move(shape);
  f.diameter_ = constants.normalized_diameter;
  f.delta_ = constants.scaled_ball_delta;
  f.inscribed_ = constants.inscribed;
  const double d = f.diameter_;
  f.bound_factor_ = std::min(std::sqrt(d * d - 0.25), f.shape_->bounding_radius());
  f.build_samples();
  return f;
}

ForbiddenRegionFamily ForbiddenRegionFamily::annulus_sector(std::size_t dim, double inner_radius,
                                                            double half_angle_rad) {
  const Point axis = Point::unit(dim, 0);
  auto shape = make_annulus_sector_template(axis, inner_radius, half_angle_rad);
  const double s = 0.5 * (inner_radius + 0.5);
  double r = std::min(s - inner_radius, 0.5 - s);
  if (dim > 1) r = std::min(r, s * std::sin(half_angle_rad));
  r *= 0.999;
  return isotropic(std::move(shape), axis, {1.0, r, {s * axis, r}});
}

std::string ForbiddenRegionFamily::name() const {
  if (kind_ == RegionKind::TemplateIsotropic) return "template:" + std::string(shape_->name());
  return std::string(to_string(kind_));
}

void ForbiddenRegionFamily::build_samples() {
  samples_.clear();
  Rng rng(derive_seed({0x7E3D1A5ULL, static_cast<std::uint64_t>(kind_), dim_}));
  const double box = shape_->bounding_radius();
  constexpr std::size_t kInterior = 64;
  std::size_t attempts = 0;
  while (samples_.size() < kInterior && attempts < kInterior * 20000) {
    ++attempts;
    Point w(dim_);
    for (std::size_t k = 0; k < dim_; ++k) w[k] = rng.uniform(-box, box);
    if (shape_->contains(w)) samples_.push_back(w);
  }
  const double r = 0.999 * inscribed_.radius;
  samples_.push_back(inscribed_.center);
  for (std::size_t k = 0; k < dim_; ++k) {
    Point e = Point::unit(dim_, k);
    samples_.push_back(inscribed_.center + r * e);
    samples_.push_back(inscribed_.center - r * e);
  }
  samples_.push_back(0.5 * axis_);
  samples_.push_back(-0.5 * axis_);
}

Region ForbiddenRegionFamily::region(const Point& x, const Point& y) const {
  if (x.dim() != dim_ || y.dim() != dim_) throw std::invalid_argument("region: dimension mismatch");
  if (x == y) throw std::invalid_argument("region: generating points must differ");
  Region r;
  r.family_ = this;
  // Canonical order makes membership exactly symmetric in (x, y).
  if (y < x) {
    r.x_ = y;
    r.y_ = x;
  } else {
    r.x_ = x;
    r.y_ = y;
  }
  r.mid_ = midpoint(r.x_, r.y_);
  r.len2_ = squared_distance(r.x_, r.y_);
  r.len_ = std::sqrt(r.len2_);
  if (kind_ == RegionKind::TemplateIsotropic) {
    r.rot_ = Rotation::between(axis_, (1.0 / r.len_) * (r.x_ - r.y_));
  }
  return r;
}

bool ForbiddenRegionFamily::contains(const Point& x, const Point& y, const Point& z) const {
  if (z.dim() != dim_) throw std::invalid_argument("contains: dimension mismatch");
  return region(x, y).contains(z);
}

// ---------------------------------------------------------------------------
// certify_constants

namespace {

Point random_in_box(Rng& rng, std::size_t d, double half) {
  Point p(d);
  for (std::size_t k = 0; k < d; ++k) p[k] = rng.uniform(-half, half);
  return p;
}

Point random_in_ball(Rng& rng, const Point& center, double radius) {
  const std::size_t d = center.dim();
  for (;;) {
    Point v = random_in_box(rng, d, 1.0);
    if (squared_norm(v) < 1.0) return center + radius * v;
  }
}

/// Largest pairwise distance among points in S, refined by a shrinking-step
/// random ascent on the best pair.
double estimate_shape_diameter(const TemplateShape& shape, std::size_t samples, Rng& rng) {
  const std::size_t d = shape.dim();
  const double box = shape.bounding_radius();
  std::vector<Point> pts;
  pts.reserve(samples);
  for (std::size_t attempts = 0; pts.size() < samples && attempts < samples * 1000; ++attempts) {
    Point w = random_in_box(rng, d, box);
    if (shape.contains(w)) pts.push_back(w);
  }
  if (pts.size() < 2) return 0.0;

  Point centroid(d);
  for (const auto& p : pts) centroid += p;
  centroid *= 1.0 / static_cast<double>(pts.size());
  std::vector<double> radius(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) radius[i] = distance(pts[i], centroid);
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return radius[a] > radius[b]; });

  double best = 0.0;
  std::size_t bi = 0, bj = 1;
  for (std::size_t a = 0; a < order.size(); ++a) {
    const std::size_t i = order[a];
    if (2.0 * radius[i] <= best) break;
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const std::size_t j = order[b];
      if (radius[i] + radius[j] <= best) break;
      const double dij = distance(pts[i], pts[j]);
      if (dij > best) {
        best = dij;
        bi = i;
        bj = j;
      }
    }
  }

  Point p = pts[bi], q = pts[bj];
  double step = box / 8.0;
  std::size_t failures = 0;
  for (std::size_t iter = 0; iter < 20000 && step > 1e-10; ++iter) {
    Point dir = random_in_box(rng, d, 1.0);
    const double n = norm(dir);
    if (n == 0.0) continue;
    dir *= step / n;
    Point& moved = (iter % 2 == 0) ? p : q;
    const Point trial = moved + dir;
    const Point& other = (iter % 2 == 0) ? q : p;
    const double dist = distance(trial, other);
    if (dist > best && shape.contains(trial)) {
      moved = trial;
      best = dist;
      failures = 0;
    } else if (++failures >= 60) {
      step *= 0.5;
      failures = 0;
    }
  }
  return best;
}

}  // namespace

CertificateReport certify_constants(const ForbiddenRegionFamily& family, std::size_t trials, std::uint64_t seed) {
  CertificateReport report;
  report.trials = trials;
  const std::size_t d = family.dim();
  Rng rng(seed);
  const double spread = family.shape().bounding_radius() * 1.25;
  const double diam = family.normalized_diameter();
  auto note = [&](const std::string& msg) {
    if (report.messages.size() < 20) report.messages.push_back(msg);
  };

  for (std::size_t t = 0; t < trials; ++t) {
    const Point x = random_in_box(rng, d, 1.0);
    const Point y = random_in_box(rng, d, 1.0);
    if (x == y) continue;
    const Region region = family.region(x, y);
    const double len = region.length();
    const Point z = region.mid() + len * random_in_box(rng, d, spread);
    const bool inside = region.contains(z);

    if (family.contains(y, x, z) != inside) {
      ++report.symmetry_violations;
      note("symmetry violated at trial " + std::to_string(t));
    }
    if (family.contains(x, y, x) || family.contains(x, y, y)) {
      ++report.endpoint_violations;
      note("endpoint contained at trial " + std::to_string(t));
    }
    const Point shift = random_in_box(rng, d, 5.0);
    if (family.contains(x + shift, y + shift, z + shift) != inside) {
      ++report.translation_violations;
      note("translation invariance violated at trial " + std::to_string(t));
    }
    const double a = std::exp(rng.uniform(-2.0, 2.0));
    if (family.contains(a * x, a * y, a * z) != inside) {
      ++report.scale_violations;
      note("scale invariance violated at trial " + std::to_string(t));
    }
    if (inside && (distance(z, x) > diam * len + 1e-9 || distance(z, y) > diam * len + 1e-9)) {
      ++report.diameter_violations;
      note("diameter certificate exceeded at trial " + std::to_string(t));
    }
    const Ball& ib = family.inscribed_template_ball();
    const Point w = random_in_ball(rng, ib.center, 0.999 * ib.radius);
    if (!region.contains(region.to_world(w))) {
      ++report.inscribed_violations;
      note("inscribed-ball point outside region at trial " + std::to_string(t));
    }
  }

  report.sampled_diameter = estimate_shape_diameter(family.shape(), std::clamp<std::size_t>(trials, 512, 8192), rng);
  if (report.sampled_diameter > diam + 1e-9) {
    ++report.diameter_violations;
    std::ostringstream msg;
    msg << "sampled normalized diameter " << report.sampled_diameter << " exceeds declared " << diam;
    note(msg.str());
  }
  if (family.kind() == RegionKind::Gabriel && diam != 1.0) {
    ++report.diameter_violations;
    note("gabriel family must declare normalized diameter 1");
  }
  return report;
}

}  // namespace pxg
