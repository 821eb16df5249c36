#pragma once

// Output files: energy history CSV, raw field dumps, density slices.

#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "dipgp/gp.hpp"
#include "dipgp/minimize.hpp"

namespace dipgp::io {

nlohmann::json to_json(const EnergyBreakdown& e);
// {kinetic, potential, contact, dipolar, total, mu, residual}
nlohmann::json to_json(const EnergyBreakdown& e, double mu, double residual);

// Streams iter,total,kinetic,potential,contact,dipolar,step,residual rows,
// flushing each one so partial runs leave a usable file.
class HistoryWriter {
 public:
  explicit HistoryWriter(const std::filesystem::path& path);
  void write(const HistoryRow& row);

 private:
  std::ofstream out_;
};

// field.raw (little-endian float64, interleaved re/im, z fastest) + field.json.
void write_field(const std::filesystem::path& dir, const Field& u, const std::string& stem = "field");
Field read_field(const std::filesystem::path& dir, const std::string& stem = "field");

// Binary PGM slices of |u|^2 through the box center: <stem>_xz.pgm and <stem>_xy.pgm.
void write_density_slices(const std::filesystem::path& dir, const Field& u,
                          const std::string& stem = "density");

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace dipgp::io
