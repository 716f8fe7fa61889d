#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "magweyl/flux.hpp"
#include "magweyl/symbols.hpp"

namespace magweyl {

using json = nlohmann::json;

// Schema violation; the message starts with the JSON pointer of the offending value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json to_json(const HullModel& model);
json to_json(const HullFunction& f);
json to_json(const MagneticField& B);
json to_json(const AtomSum& a);
json to_json(const GridSpec& g);

HullModel model_from_json(const json& j, const std::string& where = "/model");
HullFunction hull_from_json(const json& j, int d, const std::string& where);
MagneticField field_from_json(const json& j, const HullModel& model, const std::string& where = "/field");
AtomSum atoms_from_json(const json& j, int n, int d, const std::string& where);
GridSpec grid_from_json(const json& j, int n, const std::string& where = "/grid");

struct SymbolEntry {
  Symbol symbol;
  std::string sampled_path;  // set when the symbol was loaded from a binary tensor
};

struct RunConfig {
  HullModel model;
  MagneticField field;
  std::map<std::string, SymbolEntry> symbols;
  std::optional<GridSpec> grid;
  std::vector<int> omega_grid;
  std::vector<double> hbar_list{1.0, 0.5, 0.25, 0.125, 0.0625};
  std::vector<std::string> pair;  // the two symbols used by compose, expand and audit
  std::uint64_t seed = 1;
  std::string output = "magweyl";

  const Symbol& first() const { return symbols.at(pair.at(0)).symbol; }
  const Symbol& second() const { return symbols.at(pair.at(1)).symbol; }
  GridSpec space_grid() const;
  OmegaGrid omega() const { return OmegaGrid(omega_grid); }
};

RunConfig config_from_json(const json& j);
json to_json(const RunConfig& c);

std::uint64_t fnv1a(const std::string& bytes);
std::uint64_t config_hash(const RunConfig& c);
std::string hash_hex(std::uint64_t h);

// One JSON header line followed by row-major little-endian (re, im) doubles.
void write_sampled(const std::string& path, const Sampled& s);
Sampled read_sampled(const std::string& path);
void write_matrix(const std::string& path, const Eigen::MatrixXcd& M, const json& header);

// Full-precision scientific notation for CSV fields.
std::string format_real(double v);

}  // namespace magweyl
