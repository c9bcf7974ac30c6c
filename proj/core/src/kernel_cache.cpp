#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "chs/singular_quadrature.hpp"

namespace chs {
namespace {

constexpr char kMagic[8] = {'C', 'H', 'S', 'K', 'E', 'R', 'N', '1'};

template <class T>
void put(std::ostream& os, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  os.write(reinterpret_cast<const char*>(&bits), 8);
}

template <class T>
bool get(std::istream& is, T& value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  if (!is.read(reinterpret_cast<char*>(&bits), 8)) return false;
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  std::memcpy(&value, &bits, 8);
  return true;
}

}  // namespace

std::filesystem::path kernel_cache_path(const std::filesystem::path& dir, const RadialGrid& grid,
                                        double alpha) {
  char name[96];
  std::snprintf(name, sizeof name, "riesz_N%d_a%a_%016llx.bin", grid.dimension(), alpha,
                static_cast<unsigned long long>(grid.hash()));
  return dir / name;
}

void save_kernel(const KernelMatrix& kernel, const std::filesystem::path& file) {
  const std::filesystem::path tmp = file.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("kernel cache: cannot write " + tmp.string());
    os.write(kMagic, sizeof kMagic);
    put<std::int64_t>(os, kernel.dimension());
    put<double>(os, kernel.alpha());
    put<std::int64_t>(os, static_cast<std::int64_t>(kernel.size()));
    put<double>(os, kernel.grid().radius());
    put<double>(os, kernel.grid().grading());
    for (double v : kernel.entries()) put<double>(os, v);
    if (!os) throw std::runtime_error("kernel cache: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

std::optional<std::shared_ptr<const KernelMatrix>> load_kernel(const std::filesystem::path& file,
                                                                std::shared_ptr<const RadialGrid> grid,
                                                                double alpha) {
  std::ifstream is(file, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[sizeof kMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) return std::nullopt;
  std::int64_t n = 0;
  std::int64_t m = 0;
  double a = 0.0;
  double radius = 0.0;
  double grading = 0.0;
  if (!get(is, n) || !get(is, a) || !get(is, m) || !get(is, radius) || !get(is, grading)) return std::nullopt;
  if (n != grid->dimension() || a != alpha || m != static_cast<std::int64_t>(grid->size()) ||
      radius != grid->radius() || grading != grid->grading()) {
    return std::nullopt;
  }
  std::vector<double> entries(static_cast<std::size_t>(m * m));
  for (double& v : entries) {
    if (!get(is, v)) return std::nullopt;
  }
  return std::make_shared<const KernelMatrix>(std::move(grid), alpha, std::move(entries));
}

std::shared_ptr<const KernelMatrix> cached_riesz_matrix(const std::filesystem::path& dir,
                                                        std::shared_ptr<const RadialGrid> grid,
                                                        double alpha) {
  const std::filesystem::path file = kernel_cache_path(dir, *grid, alpha);
  if (auto hit = load_kernel(file, grid, alpha)) return *hit;
  auto kernel = assemble_riesz_matrix(grid, alpha);
  std::filesystem::create_directories(dir);
  save_kernel(*kernel, file);
  return kernel;
}

}  // namespace chs
