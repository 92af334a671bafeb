#include "pxg/pointproc.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pxg/format.hpp"
#include "pxg/random.hpp"

namespace pxg {

Window Window::ball(const Point& center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("window radius must be positive");
  if (!center.is_finite()) throw std::invalid_argument("window center must be finite");
  return Window(Shape::Ball, center, radius);
}

Window Window::cube(const Point& corner, double side) {
  if (!(side > 0.0) || !std::isfinite(side)) throw std::invalid_argument("window side must be positive");
  if (!corner.is_finite()) throw std::invalid_argument("window corner must be finite");
  return Window(Shape::Cube, corner, side);
}

bool Window::contains(const Point& p) const {
  if (p.dim() != dim()) return false;
  if (shape_ == Shape::Ball) return squared_distance(p, anchor_) <= size_ * size_;
  for (std::size_t k = 0; k < dim(); ++k) {
    if (!(p[k] >= anchor_[k] && p[k] <= anchor_[k] + size_)) return false;
  }
  return true;
}

double Window::volume() const {
  const double d = static_cast<double>(dim());
  if (shape_ == Shape::Cube) return std::pow(size_, d);
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(size_, d);
}

double Window::diameter() const {
  return shape_ == Shape::Ball ? 2.0 * size_ : size_ * std::sqrt(static_cast<double>(dim()));
}

Point Window::lower() const {
  if (shape_ == Shape::Cube) return anchor_;
  Point p = anchor_;
  for (std::size_t k = 0; k < dim(); ++k) p[k] -= size_;
  return p;
}

Point Window::upper() const {
  Point p = anchor_;
  for (std::size_t k = 0; k < dim(); ++k) p[k] += size_;
  return p;
}

Point Window::center() const {
  if (shape_ == Shape::Ball) return anchor_;
  Point p = anchor_;
  for (std::size_t k = 0; k < dim(); ++k) p[k] += 0.5 * size_;
  return p;
}

Window Window::scaled(double a) const {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("scale factor must be positive");
  return Window(shape_, a * anchor_, a * size_);
}

Point Window::sample_uniform(Rng& rng) const {
  const std::size_t d = dim();
  for (;;) {
    Point p(d);
    if (shape_ == Shape::Cube) {
      for (std::size_t k = 0; k < d; ++k) p[k] = anchor_[k] + size_ * rng.uniform();
    } else {
      Point v(d);
      for (std::size_t k = 0; k < d; ++k) v[k] = rng.uniform(-1.0, 1.0);
      if (squared_norm(v) > 1.0) continue;
      p = anchor_ + size_ * v;
    }
    if (contains(p)) return p;
  }
}

std::string_view to_string(ProcessKind kind) {
  return kind == ProcessKind::Poisson ? "poisson" : "binomial";
}

PointCloud sample_poisson(const Window& window, double t, std::uint64_t seed) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("poisson mean t must be finite and >= 0");
  Rng rng(seed);
  const std::uint64_t n = rng.poisson(t);
  PointCloud cloud{{}, window, ProcessKind::Poisson, t, seed};
  cloud.points.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) cloud.points.push_back(window.sample_uniform(rng));
  return cloud;
}

PointCloud sample_binomial(const Window& window, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  PointCloud cloud{{}, window, ProcessKind::Binomial, static_cast<double>(n), seed};
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) cloud.points.push_back(window.sample_uniform(rng));
  return cloud;
}

namespace {

double growth_factor(const Window& base, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("growing-window t must be positive");
  return std::pow(t, 1.0 / static_cast<double>(base.dim()));
}

}  // namespace

PointCloud sample_poisson_growing(const Window& base, double t, std::uint64_t seed) {
  if (!base.star_shaped_about_origin()) throw std::invalid_argument("growing window must contain the origin");
  const Window window = base.scaled(growth_factor(base, t));
  const std::size_t d = window.dim();
  const Point lo = window.lower();
  const Point hi = window.upper();
  std::array<long long, kMaxDim> first{}, last{}, cell{};
  for (std::size_t k = 0; k < d; ++k) {
    first[k] = static_cast<long long>(std::floor(lo[k]));
    last[k] = static_cast<long long>(std::floor(hi[k]));
    cell[k] = first[k];
  }
  PointCloud cloud{{}, window, ProcessKind::Poisson, t, seed};
  const std::uint64_t root = derive_seed({seed, 0xC0C0ULL, d});
  for (;;) {
    std::uint64_t cell_seed = root;
    for (std::size_t k = 0; k < d; ++k) cell_seed = derive_seed({cell_seed, static_cast<std::uint64_t>(cell[k])});
    Rng rng(cell_seed);
    const std::uint64_t n = rng.poisson(1.0);
    for (std::uint64_t i = 0; i < n; ++i) {
      Point p(d);
      for (std::size_t k = 0; k < d; ++k) p[k] = static_cast<double>(cell[k]) + rng.uniform();
      if (window.contains(p)) cloud.points.push_back(p);
    }
    // Odometer over the lattice cells, last axis fastest.
    std::size_t k = d;
    while (k > 0) {
      --k;
      if (cell[k] < last[k]) {
        ++cell[k];
        break;
      }
      cell[k] = first[k];
      if (k == 0) return cloud;
    }
  }
}

PointCloud sample_binomial_growing(const Window& base, double t, std::uint64_t seed) {
  if (!base.star_shaped_about_origin()) throw std::invalid_argument("growing window must contain the origin");
  const auto n = static_cast<std::size_t>(std::ceil(t));
  PointCloud cloud = sample_binomial(base.scaled(growth_factor(base, t)), n, seed);
  cloud.t = t;
  return cloud;
}

PointCloud scale_cloud(const PointCloud& cloud, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("scale factor must be positive");
  PointCloud out{{}, cloud.window.scaled(a), cloud.kind, cloud.t, cloud.seed};
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(a * p);
  return out;
}

void require_distinct(std::span<const Point> points) {
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return points[a] < points[b]; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (points[order[k]] == points[order[k - 1]]) {
      throw std::invalid_argument("duplicate points at indices " + std::to_string(std::min(order[k], order[k - 1])) +
                                  " and " + std::to_string(std::max(order[k], order[k - 1])));
    }
  }
}

// ---------------------------------------------------------------------------
// I/O

namespace {

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '"' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("malformed number in points file: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

constexpr std::array<char, 4> kMagic{'P', 'X', 'G', '1'};

template <class T>
void put_le(std::ostream& out, T value) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes{};
  if (!in.read(bytes.data(), bytes.size())) throw std::runtime_error("truncated binary points file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

}  // namespace

void write_points_csv(std::ostream& out, std::span<const Point> points, std::size_t dim) {
  std::string buf = "index";
  for (std::size_t k = 1; k <= dim; ++k) buf += ",x" + std::to_string(k);
  buf += '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    buf += std::to_string(i);
    for (std::size_t k = 0; k < dim; ++k) {
      buf += ',';
      buf += format_double(points[i][k]);
    }
    buf += '\n';
  }
  out << buf;
}

std::vector<Point> read_points_csv(std::istream& in) {
  std::string line;
  std::vector<Point> points;
  std::size_t dim = 0;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (header) {
      header = false;
      if (fields.size() < 2 || fields[0] != "index") {
        throw std::runtime_error("points CSV must start with header 'index,x1,...'");
      }
      dim = fields.size() - 1;
      if (dim > kMaxDim) throw std::runtime_error("points CSV dimension exceeds 6");
      continue;
    }
    if (fields.size() != dim + 1) throw std::runtime_error("points CSV row has wrong field count: " + line);
    Point p(dim);
    for (std::size_t k = 0; k < dim; ++k) p[k] = parse_double(fields[k + 1]);
    points.push_back(p);
  }
  if (header) throw std::runtime_error("points CSV is missing its header");
  return points;
}

void write_points_binary(std::ostream& out, std::span<const Point> points, std::size_t dim) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dim));
  put_le<std::uint64_t>(out, points.size());
  for (const auto& p : points) {
    for (std::size_t k = 0; k < dim; ++k) put_le<double>(out, p[k]);
  }
}

std::vector<Point> read_points_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw std::runtime_error("binary points file lacks PXG1 magic");
  }
  const auto dim = get_le<std::uint32_t>(in);
  if (dim == 0 || dim > kMaxDim) throw std::runtime_error("binary points file has bad dimension");
  const auto n = get_le<std::uint64_t>(in);
  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 24)));
  for (std::uint64_t i = 0; i < n; ++i) {
    Point p(dim);
    for (std::size_t k = 0; k < dim; ++k) p[k] = get_le<double>(in);
    points.push_back(p);
  }
  return points;
}

}  // namespace pxg
