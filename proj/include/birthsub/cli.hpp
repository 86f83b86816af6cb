#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "birthsub/analytic.hpp"
#include "birthsub/rates.hpp"
#include "birthsub/verify.hpp"

namespace birthsub {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNonConvergence = 3;

/// Environment variable consulted for the default simulation seed.
inline constexpr const char* kSeedEnv = "BIRTHSUB_SEED";

/// A cell is a number (integers included) or text. Numbers are written in
/// shortest round-trip form, so parsing the output reproduces the table.
using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::string to_csv() const;
  /// Array of row objects keyed by column name; NaN becomes null.
  std::string to_json() const;
  static Table from_csv(std::string_view text);
  static Table from_json(std::string_view text);

  /// Cell-wise equality with NaN equal to NaN.
  bool operator==(const Table& other) const;
};

enum class Command { Pmf, Mean, Simulate, Verify, Identities };
enum class Format { Csv, Json };

struct RunConfig {
  Command command = Command::Pmf;
  /// Schedule JSON as accepted by parse_schedule.
  std::string schedule_json = R"({"kind":"linear","lambda":1.0,"kmax":500})";
  Composition composition = Composition::Classical;
  CompositionParams params;
  std::vector<double> t_grid{1.0};
  /// Inclusive state range; unset means n0 .. min(kmax, n0 + 9).
  std::optional<int> k_first;
  std::optional<int> k_last;
  std::uint64_t n_paths = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  /// Unset: CSV, except verify which prints its JSON summary.
  std::optional<Format> format;
  /// Empty writes to standard output.
  std::string output;
  // mean
  bool strict = false;
  int max_k = 0;
  double tolerance = 1e-10;
  // simulate
  bool gof = true;
  /// Exit 1 when the simulation's goodness-of-fit check fails.
  bool check = false;
  // verify / identities
  std::string fixture;
  std::vector<std::string> only;
  std::string gof_csv;

  /// Throws Validation when fields are out of their domains (t grid not
  /// strictly increasing, bad k range, composition parameters, ...).
  void validate() const;
  RateSchedule schedule() const;
};

/// JSON run file mirroring RunConfig: {"command": "pmf", "schedule": {...},
/// "composition": "frac", "nu": 0.5, "t": [0.5, 1], "k": [1, 5], ...}.
RunConfig run_config_from_json(std::string_view text);

/// Rate specifications accepted on the command line: "linear:LAMBDA[:KMAX]",
/// a comma-separated rate list, inline JSON, or "@FILE" holding JSON.
std::string schedule_json_from_spec(std::string_view spec, int n0 = 1);
/// "A..B", "A" or "A,B,C" (contiguous only).
std::pair<int, int> parse_k_range(std::string_view text);
/// Comma-separated list of times.
std::vector<double> parse_t_grid(std::string_view text);

/// Columns t,k,p,err,method,provenance.
Table pmf_table(const RunConfig& config);
/// Columns t,mean,truncation_k,last_increment,converged.
Table mean_table(const RunConfig& config);

struct SimulationOutput {
  EmpiricalPmf empirical;
  std::optional<GofReport> gof;
};
SimulationOutput run_simulation(const RunConfig& config);
/// Columns id,params,lhs,rhs,diff,tol,pass.
Table identity_table(const SuiteResult& result);

/// Executes a parsed configuration; returns the exit code.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line front end. Exit codes: 0 success, 1 verification failure,
/// 2 input validation, 3 numerical non-convergence.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace birthsub
