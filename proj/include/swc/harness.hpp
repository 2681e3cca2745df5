#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "swc/smallworld.hpp"

namespace swc {

/// Bad sweep configuration; `field()` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Mode { kSimpleRouting, kComplexRouting, kComplexDiffusion };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

/// One experiment grid. Every combination of side x alpha x m x scheme is a
/// cell; each cell runs `trials` independent simulations.
struct SweepConfig {
  Mode mode = Mode::kComplexRouting;
  std::vector<int> sides;
  std::vector<double> alphas;
  int k = 2;
  int p = 2;
  int q = 2;
  std::vector<std::size_t> ms{1};  // kUnbounded encodes "inf"
  std::vector<std::string> schemes{"greedy"};
  Directedness directedness = Directedness::kDirected;
  int trials = 1;
  std::uint64_t seed = 1;
  std::uint64_t budget = 0;  // 0: 4n per cell
  std::string output;

  /// Throws ConfigError.
  void validate() const;
};

/// Flat "key = value" text, '#' comments, comma-separated lists. Keys: mode,
/// L (or n, which must be a perfect square), alpha, k, p, q, m, scheme,
/// directedness, trials, seed, budget, out. p and q default to k; m defaults
/// to 1 for routing and is rejected for diffusion; directedness defaults to
/// directed for routing and undirected for diffusion.
SweepConfig parse_sweep_config(std::istream& in);
SweepConfig load_sweep_config(const std::string& path);

struct CellResult {
  Mode mode = Mode::kComplexRouting;
  double alpha = 0.0;
  int side = 0;
  std::size_t n = 0;
  int k = 0;
  std::size_t m = 1;
  std::string scheme;
  int trials = 0;
  std::vector<double> samples;  // empty when read back from CSV
  double mean = 0.0;
  double median = 0.0;
  double standard_error = 0.0;
  int truncated = 0;
};

/// Mean, median and standard error (sample sd / sqrt(count)) of `samples`.
void summarize(CellResult& cell);

/// Runs every cell. Trial t of a cell uses seed
/// derive_seed(derive_seed(master, network key), t), where the network key
/// hashes (L, alpha, p, q, directedness): cells that differ only in m or
/// scheme see the same networks. Worker count comes from SWC_WORKERS
/// (default: hardware concurrency) unless `workers` is positive.
/// Rows come back sorted by (mode, alpha, L, m, scheme).
std::vector<CellResult> run_sweep(const SweepConfig& config, int workers = 0);

/// Per-trial seed used by run_sweep.
std::uint64_t trial_seed(std::uint64_t master, int side, double alpha, int p,
                         int q, Directedness directedness, int trial);

inline constexpr std::string_view kCsvHeader =
    "mode,alpha,L,n,k,m,scheme,trials,mean,median,stderr,truncated";

void write_csv(std::ostream& out, std::span<const CellResult> cells);
/// Throws std::runtime_error on malformed rows.
std::vector<CellResult> read_csv(std::istream& in);

struct ExponentFit {
  double slope = 0.0;      // beta
  double intercept = 0.0;  // log of the prefactor
  double residual_norm = 0.0;
  double n_min = 0.0;
  double n_max = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares of log(time) on log(n). Needs at least three
/// distinct positive n and positive times; throws std::domain_error otherwise.
ExponentFit fit_exponent(std::span<const std::pair<double, double>> points);

struct GroupFit {
  Mode mode;
  double alpha;
  int k;
  std::size_t m;
  std::string scheme;
  ExponentFit fit;
};

/// Fits one exponent per (mode, alpha, k, m, scheme) group of cells that has
/// at least three distinct n; other groups are skipped.
std::vector<GroupFit> fit_groups(std::span<const CellResult> cells);

inline constexpr std::string_view kFitHeader =
    "mode,alpha,k,m,scheme,beta,intercept,residual,n_min,n_max,points";
void write_fits(std::ostream& out, std::span<const GroupFit> fits);

/// Command-line entry point: generate, route, diffuse, sweep, fit.
int run_cli(std::span<const std::string> args, std::ostream& out,
            std::ostream& err);

std::string format_m(std::size_t m);
std::size_t parse_m(std::string_view text);

}  // namespace swc
