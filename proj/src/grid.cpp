#include "acsplit/grid.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>

namespace acsplit {

GridSpec::GridSpec(int n, double length) : n_(n), length_(length) {
  if (n < 8 || n % 2 != 0) {
    throw DomainError("GridSpec: n must be even and >= 8, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw DomainError("GridSpec: length must be positive and finite");
  }
}

ScalarField::ScalarField(const GridSpec& grid)
    : grid_(grid), values_(FieldArray::Zero(grid.n(), grid.n())) {}

ScalarField::ScalarField(const GridSpec& grid, FieldArray values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.rows() != grid_.n() || values_.cols() != grid_.n()) {
    throw DomainError("ScalarField: array dimensions do not match grid");
  }
}

ScalarField ScalarField::constant(const GridSpec& grid, double value) {
  return ScalarField(grid, FieldArray::Constant(grid.n(), grid.n(), value));
}

ScalarField circle_indicator(const GridSpec& grid, double radius, double cx, double cy) {
  const double r2 = radius * radius;
  return make_field(grid, [&](double x, double y) {
    const double dx = x - cx;
    const double dy = y - cy;
    return dx * dx + dy * dy < r2 ? 1.0 : -1.0;
  });
}

ScalarField sign_field(const ScalarField& u) {
  return ScalarField(u.grid(), u.values().unaryExpr([](double v) { return sign_pos(v); }));
}

void check_same_grid(const ScalarField& a, const ScalarField& b, const char* where) {
  if (!(a.grid() == b.grid())) {
    throw DomainError(std::string(where) + ": fields live on different grids");
  }
}

namespace {

constexpr std::array<char, 4> kMagic = {'A', 'C', 'S', 'F'};

template <class T>
void put_le(std::ostream& os, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t k = 0; k < sizeof(U); ++k) {
    bytes[k] = static_cast<char>((bits >> (8 * k)) & 0xFFu);
  }
  os.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& is) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  std::array<unsigned char, sizeof(U)> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!is) throw std::runtime_error("read_binary: truncated file");
  U bits = 0;
  for (std::size_t k = 0; k < sizeof(U); ++k) bits |= static_cast<U>(bytes[k]) << (8 * k);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_binary(const ScalarField& u, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_binary: cannot open " + path.string());
  os.write(kMagic.data(), kMagic.size());
  put_le(os, static_cast<std::uint32_t>(u.grid().n()));
  put_le(os, std::uint64_t{0});
  const auto& v = u.values();
  for (Eigen::Index k = 0; k < v.size(); ++k) put_le(os, v.data()[k]);
}

ScalarField read_binary(const std::filesystem::path& path, double length) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_binary: cannot open " + path.string());
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw std::runtime_error("read_binary: bad magic in " + path.string());
  const auto n = get_le<std::uint32_t>(is);
  (void)get_le<std::uint64_t>(is);
  if (!is) throw std::runtime_error("read_binary: truncated header in " + path.string());
  ScalarField u(GridSpec(static_cast<int>(n), length));
  auto& v = u.values();
  for (Eigen::Index k = 0; k < v.size(); ++k) v.data()[k] = get_le<double>(is);
  if (!u.all_finite()) throw DomainError("read_binary: non-finite values");
  return u;
}

void write_csv(const ScalarField& u, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_csv: cannot open " + path.string());
  os << std::setprecision(17);
  const auto& v = u.values();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (j) os << ',';
      os << v(i, j);
    }
    os << '\n';
  }
}

}  // namespace acsplit
