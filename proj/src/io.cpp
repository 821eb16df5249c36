#include "dipgp/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dipgp/error.hpp"

namespace dipgp::io {
namespace {

void put_le(std::ofstream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

double get_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

void write_pgm(const std::filesystem::path& path, int width, int height,
               const std::vector<double>& values) {
  const double mx = *std::max_element(values.begin(), values.end());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << "P5\n" << width << " " << height << "\n255\n";
  for (double v : values) {
    const double s = mx > 0.0 ? v / mx : 0.0;
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * s))));
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

nlohmann::json to_json(const EnergyBreakdown& e) {
  return {{"kinetic", e.kinetic}, {"potential", e.potential}, {"contact", e.contact},
          {"dipolar", e.dipolar}, {"total", e.total}};
}

nlohmann::json to_json(const EnergyBreakdown& e, double mu, double residual) {
  nlohmann::json j = to_json(e);
  j["mu"] = mu;
  j["residual"] = residual;
  return j;
}

HistoryWriter::HistoryWriter(const std::filesystem::path& path) : out_(path) {
  if (!out_) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out_ << "iter,total,kinetic,potential,contact,dipolar,step,residual\n";
  out_.flush();
}

void HistoryWriter::write(const HistoryRow& row) {
  const EnergyBreakdown& e = row.energy;
  out_ << row.iter << ',' << format_double(e.total) << ',' << format_double(e.kinetic) << ','
       << format_double(e.potential) << ',' << format_double(e.contact) << ','
       << format_double(e.dipolar) << ',' << format_double(row.step) << ','
       << format_double(row.residual) << '\n';
  out_.flush();
}

void write_field(const std::filesystem::path& dir, const Field& u, const std::string& stem) {
  std::ofstream raw(dir / (stem + ".raw"), std::ios::binary);
  if (!raw) throw Error(ErrorCode::InvalidArgument, "cannot write field dump");
  for (const cplx& v : u.values) {
    put_le(raw, v.real());
    put_le(raw, v.imag());
  }
  write_json(dir / (stem + ".json"),
             {{"M", u.grid.points_per_axis()},
              {"L_box", u.grid.side_length()},
              {"axis_order", "xyz"},
              {"index", "(ix*M + iy)*M + iz, z fastest; x_j = -L_box/2 + j*L_box/M"},
              {"dtype", "complex128-le-interleaved"}});
}

Field read_field(const std::filesystem::path& dir, const std::string& stem) {
  std::ifstream meta_in(dir / (stem + ".json"));
  if (!meta_in) throw Error(ErrorCode::InvalidArgument, "missing field header");
  const nlohmann::json meta = nlohmann::json::parse(meta_in);
  const BoxGrid grid(meta.at("L_box").get<double>(), meta.at("M").get<int>());
  std::ifstream raw(dir / (stem + ".raw"), std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(raw)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() != grid.size() * 16) throw Error(ErrorCode::GridMismatch, "field dump size");
  Field u(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    u.values[i] = {get_le(&bytes[16 * i]), get_le(&bytes[16 * i + 8])};
  }
  return u;
}

void write_density_slices(const std::filesystem::path& dir, const Field& u,
                          const std::string& stem) {
  const BoxGrid& g = u.grid;
  const int M = g.points_per_axis(), c = M / 2;
  std::vector<double> xz, xy;
  xz.reserve(static_cast<std::size_t>(M) * M);
  xy.reserve(static_cast<std::size_t>(M) * M);
  // Rows run from high to low along the vertical axis so images appear upright.
  for (int row = M - 1; row >= 0; --row)
    for (int ix = 0; ix < M; ++ix) {
      xz.push_back(std::norm(u.values[g.index(ix, c, row)]));
      xy.push_back(std::norm(u.values[g.index(ix, row, c)]));
    }
  write_pgm(dir / (stem + "_xz.pgm"), M, M, xz);
  write_pgm(dir / (stem + "_xy.pgm"), M, M, xy);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace dipgp::io
