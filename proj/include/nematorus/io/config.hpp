#ifndef NEMATORUS_IO_CONFIG_HPP
#define NEMATORUS_IO_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "../energy.hpp"
#include "../field.hpp"
#include "../geometry.hpp"
#include "../relaxation.hpp"

namespace nematorus::io {

enum class Command { constant_analysis, flow, sweep_mu, winding_table, geometry_dump };

std::string_view to_string(Command c);
Command parse_command(std::string_view name);

/// Resolved description of one run. Serialized as flat `key = value` lines
/// with dotted section names; unset optionals are omitted.
struct RunConfig {
  Command command = Command::flow;

  // geometry: either the ratio mu (r = 1) or both radii
  std::optional<double> mu;
  std::optional<double> R;
  std::optional<double> r;

  // constants: one modulus k, or k1, k2, k3 for the general model
  std::optional<double> k;
  std::optional<double> k1;
  std::optional<double> k2;
  std::optional<double> k3;

  int n_theta = 64;
  int n_phi = 64;

  std::optional<double> dt;  // empty means auto
  double tol = 1e-8;
  long max_steps = 1'000'000;
  long snapshot_every = 0;
  long history_every = 100;
  bool flat_energy_stop = false;

  WindingNumber winding;
  double alpha0 = std::numbers::pi / 4;
  std::optional<double> noise;  // empty: 0 for flow, 0.05 for winding-table
  std::uint64_t rng_seed = 0;

  double mu_lo = 1.2;
  double mu_hi = 1.9;
  double mu_tol = 0.01;

  std::vector<WindingNumber> windings = {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0, 3}, {1, 4}, {4, 1}};

  std::string output_dir;  // empty: $NEMATORUS_OUT, else "."
  unsigned jobs = 1;

  bool operator==(const RunConfig&) const = default;

  double ratio() const;
  TorusGeometry<double> geometry() const;
  bool general_constants() const;
  ElasticConstants<double> constants() const;
  Grid grid() const;
  double seed_noise() const;
  FlowParams<double> flow_params() const;
  std::filesystem::path resolved_output_dir() const;

  /// Throws ConfigError on inconsistent or out-of-range settings.
  void validate() const;
};

/// Assign one dotted key from its text value; throws ConfigError.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

/// Parse config text. Errors carry the 1-based line number.
RunConfig parse_config(std::string_view text, const RunConfig& base = {});
RunConfig load_config(const std::filesystem::path& path, const RunConfig& base = {});

/// Every key with its value, one `key = value` line each.
std::string serialize(const RunConfig& cfg);

/// Single-line reproducibility stamp: tool version, resolved config, seed.
std::string stamp(const RunConfig& cfg);

std::string format_winding(WindingNumber h);
WindingNumber parse_winding(std::string_view text);
std::string format_windings(const std::vector<WindingNumber>& list);
std::vector<WindingNumber> parse_windings(std::string_view text);

}  // namespace nematorus::io

#endif
