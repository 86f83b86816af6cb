#include "birthsub/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "birthsub/error.hpp"

#ifndef BIRTHSUB_DEFAULT_FIXTURE
#define BIRTHSUB_DEFAULT_FIXTURE "fixtures/suite_default.json"
#endif

namespace birthsub {

namespace {

using ojson = nlohmann::ordered_json;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::Validation, what); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) invalid("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Whole-field parse; nullopt when anything is left over.
std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

double number(std::string_view s, std::string_view what) {
  const auto v = to_double(trim(s));
  if (!v) invalid(std::string(what) + ": '" + std::string(s) + "' is not a number");
  return *v;
}

int integer(std::string_view s, std::string_view what) {
  const std::string t = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    invalid(std::string(what) + ": '" + std::string(s) + "' is not an integer");
  return v;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool needs_quotes(const std::string& s) {
  // Text that would read back as a number is quoted too, so types survive.
  return s.empty() || s.find_first_of(",\"\r\n") != std::string::npos || to_double(s).has_value();
}

std::string csv_field(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_number(*d);
  const auto& s = std::get<std::string>(c);
  if (!needs_quotes(s)) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

// RFC 4180 reader: returns records of (text, was_quoted) fields.
std::vector<std::vector<std::pair<std::string, bool>>> read_csv(std::string_view text) {
  std::vector<std::vector<std::pair<std::string, bool>>> records;
  std::vector<std::pair<std::string, bool>> record;
  std::string field;
  bool quoted = false, in_quotes = false, any = false;
  auto end_field = [&] {
    record.emplace_back(std::move(field), quoted);
    field.clear();
    quoted = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    any = true;
    if (ch == '"') {
      in_quotes = quoted = true;
    } else if (ch == ',') {
      end_field();
    } else if (ch == '\n') {
      end_field();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else if (ch != '\r') {
      field += ch;
    }
  }
  if (in_quotes) invalid("CSV: unterminated quoted field");
  if (any) {
    end_field();
    records.push_back(std::move(record));
  }
  return records;
}

Cell json_cell(const ojson& v) {
  if (v.is_null()) return std::nan("");
  if (v.is_number()) return v.get<double>();
  if (v.is_boolean()) return v.get<bool>() ? 1.0 : 0.0;
  if (v.is_string()) return v.get<std::string>();
  invalid("table JSON: unsupported cell " + v.dump());
}

std::string params_text(const ParamList& params) {
  std::string s;
  for (const auto& [k, v] : params) {
    if (!s.empty()) s += ';';
    s += k + '=' + format_number(v);
  }
  return s;
}

void emit(const RunConfig& config, const std::string& text, std::ostream& out) {
  if (config.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(config.output, std::ios::binary);
  if (!f) invalid("cannot write '" + config.output + "'");
  f << text;
}

std::string render(const RunConfig& config, const Table& table) {
  return config.format.value_or(Format::Csv) == Format::Json ? table.to_json() + "\n" : table.to_csv();
}

Format parse_format(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  invalid("unknown format '" + std::string(s) + "' (csv or json)");
}

Command parse_command(std::string_view s) {
  if (s == "pmf") return Command::Pmf;
  if (s == "mean") return Command::Mean;
  if (s == "simulate") return Command::Simulate;
  if (s == "verify") return Command::Verify;
  if (s == "identities") return Command::Identities;
  invalid("unknown command '" + std::string(s) + "'");
}

std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return 1;
  std::uint64_t v = 0;
  const std::string_view s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) invalid(std::string(kSeedEnv) + " is not an unsigned integer");
  return v;
}

std::pair<int, int> k_range(const RunConfig& config, const RateSchedule& s) {
  const int first = config.k_first.value_or(s.n0());
  const int last = config.k_last.value_or(std::min(s.kmax(), first + 9));
  return {first, last};
}

SuiteConfig load_fixture(const RunConfig& config) {
  const std::string path = config.fixture.empty() ? std::string(BIRTHSUB_DEFAULT_FIXTURE) : config.fixture;
  std::ifstream probe(path);
  if (!probe) invalid("suite fixture '" + path + "' not found");
  return SuiteConfig::parse(read_file(path));
}

int run_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const SuiteConfig suite = load_fixture(config);
  SuiteOptions opt{config.only, config.threads};
  if (config.command == Command::Identities && opt.only.empty()) {
    const auto doc = nlohmann::json::parse(suite.json_text);
    for (const auto& name : suite_families())
      if (name != "monte-carlo" && doc.at("families").contains(name)) opt.only.push_back(name);
  }
  const SuiteResult result = run_suite(suite, opt);

  const Format fmt = config.format.value_or(config.command == Command::Verify ? Format::Json : Format::Csv);
  if (fmt == Format::Json) {
    ojson summary;
    summary["pass"] = result.all_pass();
    summary["failing"] = result.failing_ids();
    summary["results"] = ojson::parse(result.to_json());
    emit(config, summary.dump(2) + "\n", out);
  } else {
    emit(config, identity_table(result).to_csv(), out);
  }
  if (!config.gof_csv.empty()) {
    std::ofstream f(config.gof_csv, std::ios::binary);
    if (!f) invalid("cannot write '" + config.gof_csv + "'");
    f << result.gof_csv();
  }
  if (result.all_pass()) return kExitOk;
  for (const auto& id : result.failing_ids()) err << "FAILED " << id << '\n';
  return kExitVerifyFailed;
}

}  // namespace

// ---------------------------------------------------------------------------
// Table

std::string Table::to_csv() const {
  std::string s;
  for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + csv_field(columns[i]);
  s += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + csv_field(row[i]);
    s += '\n';
  }
  return s;
}

std::string Table::to_json() const {
  ojson j;
  j["columns"] = columns;
  j["rows"] = ojson::array();
  for (const auto& row : rows) {
    ojson r = ojson::object();
    for (std::size_t i = 0; i < row.size() && i < columns.size(); ++i) {
      if (const double* d = std::get_if<double>(&row[i]))
        r[columns[i]] = std::isfinite(*d) ? ojson(*d) : ojson(nullptr);
      else
        r[columns[i]] = std::get<std::string>(row[i]);
    }
    j["rows"].push_back(std::move(r));
  }
  return j.dump();
}

Table Table::from_csv(std::string_view text) {
  const auto records = read_csv(text);
  if (records.empty()) invalid("CSV: missing header");
  Table t;
  for (const auto& [name, q] : records.front()) t.columns.push_back(name);
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.columns.size())
      invalid("CSV: row " + std::to_string(r) + " has " + std::to_string(records[r].size()) + " fields");
    std::vector<Cell> row;
    for (const auto& [text_field, quoted] : records[r]) {
      const auto v = quoted ? std::nullopt : to_double(text_field);
      row.push_back(v ? Cell(*v) : Cell(text_field));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table Table::from_json(std::string_view text) {
  Table t;
  try {
    const ojson j = ojson::parse(text);
    t.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& r : j.at("rows")) {
      std::vector<Cell> row;
      for (const auto& c : t.columns) row.push_back(json_cell(r.at(c)));
      t.rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("table JSON: ") + e.what());
  }
  return t;
}

bool Table::operator==(const Table& other) const {
  if (columns != other.columns || rows.size() != other.rows.size()) return false;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != other.rows[r].size()) return false;
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      const Cell& a = rows[r][i];
      const Cell& b = other.rows[r][i];
      if (a.index() != b.index()) return false;
      if (const double* x = std::get_if<double>(&a)) {
        const double y = std::get<double>(b);
        if (!(*x == y || (std::isnan(*x) && std::isnan(y)))) return false;
      } else if (std::get<std::string>(a) != std::get<std::string>(b)) {
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Configuration

RateSchedule RunConfig::schedule() const { return parse_schedule(schedule_json); }

void RunConfig::validate() const {
  if (command == Command::Verify || command == Command::Identities) return;
  const RateSchedule s = schedule();
  if (t_grid.empty()) invalid("empty t grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!std::isfinite(t_grid[i]) || t_grid[i] < 0.0) invalid("t must be finite and >= 0");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) invalid("t grid must be strictly increasing");
  }
  const auto [first, last] = k_range(*this, s);
  if (first < s.n0() || last < first || last > s.kmax())
    invalid("k range " + std::to_string(first) + ".." + std::to_string(last) + " outside " + std::to_string(s.n0()) +
            ".." + std::to_string(s.kmax()));
  if (n_paths == 0) invalid("n_paths must be positive");
  if (max_k < 0) invalid("max_k must be >= 0");
  if (!(tolerance > 0.0)) invalid("tolerance must be positive");
  if (command == Command::Simulate && t_grid.size() != 1) invalid("simulate takes a single time");
  birthsub::validate(composition, params, s);
}

std::string schedule_json_from_spec(std::string_view spec_in, int n0) {
  const std::string spec = trim(spec_in);
  if (spec.empty()) invalid("empty rate specification");
  if (spec.front() == '{') return spec;
  if (spec.front() == '@') return read_file(spec.substr(1));
  nlohmann::json j;
  if (spec.rfind("linear:", 0) == 0) {
    const auto parts = split(std::string_view(spec).substr(7), ':');
    if (parts.size() > 2) invalid("linear rates: expected linear:LAMBDA[:KMAX]");
    j = {{"kind", "linear"},
         {"lambda", number(parts[0], "linear rate")},
         {"kmax", parts.size() == 2 ? integer(parts[1], "kmax") : kLinearMaxK}};
  } else {
    const std::string list = spec.rfind("general:", 0) == 0 ? spec.substr(8) : spec;
    std::vector<double> rates;
    for (const auto& r : split(list, ',')) rates.push_back(number(r, "rate"));
    j = {{"kind", "general"}, {"rates", rates}};
  }
  if (n0 != 1) j["n0"] = n0;
  return j.dump();
}

std::pair<int, int> parse_k_range(std::string_view text) {
  const std::string s = trim(text);
  if (const auto pos = s.find(".."); pos != std::string::npos)
    return {integer(s.substr(0, pos), "k"), integer(s.substr(pos + 2), "k")};
  const auto parts = split(s, ',');
  std::vector<int> ks;
  for (const auto& p : parts) ks.push_back(integer(p, "k"));
  for (std::size_t i = 1; i < ks.size(); ++i)
    if (ks[i] != ks[i - 1] + 1) invalid("k list must be contiguous; use A..B");
  return {ks.front(), ks.back()};
}

std::vector<double> parse_t_grid(std::string_view text) {
  std::vector<double> t;
  for (const auto& p : split(text, ',')) t.push_back(number(p, "t"));
  return t;
}

RunConfig run_config_from_json(std::string_view text) {
  RunConfig c;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("run config: ") + e.what());
  }
  if (!j.is_object()) invalid("run config must be a JSON object");
  try {
    int n0 = j.value("n0", 1);
    for (const auto& [key, v] : j.items()) {
      if (key == "command") c.command = parse_command(v.get<std::string>());
      else if (key == "schedule") c.schedule_json = v.is_string() ? schedule_json_from_spec(v.get<std::string>(), n0) : v.dump();
      else if (key == "n0") continue;
      else if (key == "composition") c.composition = parse_composition(v.get<std::string>());
      else if (key == "nu") c.params.nu = v.get<double>();
      else if (key == "alpha") c.params.alpha = v.get<double>();
      else if (key == "n") c.params.n = v.get<int>();
      else if (key == "scale") c.params.cauchy_scale = v.get<double>();
      else if (key == "t") c.t_grid = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
      else if (key == "k") {
        std::pair<int, int> r;
        if (v.is_array() && v.size() == 2) r = {v[0].get<int>(), v[1].get<int>()};
        else if (v.is_number_integer()) r = {v.get<int>(), v.get<int>()};
        else r = parse_k_range(v.get<std::string>());
        c.k_first = r.first;
        c.k_last = r.second;
      }
      else if (key == "n_paths") c.n_paths = v.get<std::uint64_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else if (key == "format") c.format = parse_format(v.get<std::string>());
      else if (key == "output") c.output = v.get<std::string>();
      else if (key == "strict") c.strict = v.get<bool>();
      else if (key == "max_k") c.max_k = v.get<int>();
      else if (key == "tolerance") c.tolerance = v.get<double>();
      else if (key == "gof") c.gof = v.get<bool>();
      else if (key == "check") c.check = v.get<bool>();
      else if (key == "fixture") c.fixture = v.get<std::string>();
      else if (key == "only") c.only = v.is_array() ? v.get<std::vector<std::string>>() : std::vector<std::string>{v.get<std::string>()};
      else if (key == "gof_csv") c.gof_csv = v.get<std::string>();
      else invalid("run config: unknown key '" + key + "'");
    }
    if (!j.contains("seed")) c.seed = default_seed();
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("run config: ") + e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Commands

Table pmf_table(const RunConfig& config) {
  config.validate();
  const RateSchedule s = config.schedule();
  const auto [first, last] = k_range(config, s);
  Table t{{"t", "k", "p", "err", "method", "provenance"}, {}};
  for (double time : config.t_grid) {
    const Pmf pmf = compute_pmf(s, config.composition, config.params, time, first, last);
    for (int k = first; k <= last; ++k) {
      const auto i = static_cast<std::size_t>(k - first);
      t.rows.push_back({time, static_cast<double>(k), pmf.p[i], pmf.err[i], pmf.method[i], pmf.provenance});
    }
  }
  return t;
}

Table mean_table(const RunConfig& config) {
  config.validate();
  const RateSchedule s = config.schedule();
  const MeanOptions opt{config.max_k, config.tolerance, config.strict};
  Table t{{"t", "mean", "truncation_k", "last_increment", "converged"}, {}};
  for (double time : config.t_grid) {
    MeanValue m;
    switch (config.composition) {
      case Composition::Classical: m = classical_mean(s, time, opt); break;
      case Composition::Frac: m = fractional_mean(s, config.params.nu, time, opt); break;
      case Composition::Fp: m = fp_stopped_mean(s, time, opt); break;
      default:
        invalid("mean is available for classical, frac and fp, not '" +
                std::string(composition_name(config.composition)) + "'");
    }
    t.rows.push_back({time, m.value, static_cast<double>(m.truncation_k), m.last_increment, m.converged ? 1.0 : 0.0});
  }
  return t;
}

SimulationOutput run_simulation(const RunConfig& config) {
  config.validate();
  const RateSchedule s = config.schedule();
  const double t = config.t_grid.front();
  SimulationOutput out;
  out.empirical = simulate_composition(s, config.composition, config.params, t,
                                       SimulationOptions{config.n_paths, config.seed, config.threads});
  if (config.gof) {
    const Pmf pmf = compute_pmf(s, config.composition, config.params, t, s.n0(), s.kmax());
    try {
      out.gof = gof_compare(out.empirical, pmf);
      out.gof->id = "simulate-" + std::string(composition_name(config.composition));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateSupport) throw;
    }
  }
  return out;
}

Table identity_table(const SuiteResult& result) {
  Table t{{"id", "params", "lhs", "rhs", "diff", "tol", "pass"}, {}};
  for (const auto& r : result.identities)
    t.rows.push_back({r.id, params_text(r.params), r.lhs, r.rhs, r.abs_diff, r.tolerance, r.pass ? 1.0 : 0.0});
  for (const auto& g : result.gof)
    t.rows.push_back({g.id, params_text(g.params), g.tv, std::nan(""), g.tv, g.tv_tolerance, g.pass ? 1.0 : 0.0});
  return t;
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    switch (config.command) {
      case Command::Pmf: emit(config, render(config, pmf_table(config)), out); return kExitOk;
      case Command::Mean: emit(config, render(config, mean_table(config)), out); return kExitOk;
      case Command::Simulate: {
        const SimulationOutput sim = run_simulation(config);
        const EmpiricalPmf& e = sim.empirical;
        Table t{{"k", "count", "freq", "overflow_fraction"}, {}};
        const double overflow = e.n_paths ? static_cast<double>(e.overflow) / static_cast<double>(e.n_paths) : 0.0;
        for (std::size_t i = 0; i < e.counts.size(); ++i) {
          const int k = e.k_first + static_cast<int>(i);
          t.rows.push_back({static_cast<double>(k), static_cast<double>(e.counts[i]), e.freq(k), overflow});
        }
        emit(config, render(config, t), out);
        if (!sim.gof) {
          err << "gof: skipped\n";
          return kExitOk;
        }
        const GofReport& g = *sim.gof;
        err << "gof: tv=" << format_number(g.tv) << " chi_square=" << format_number(g.chi_square)
            << " dof=" << g.dof << " p_value=" << format_number(g.p_value)
            << " overflow_fraction=" << format_number(g.overflow_fraction) << " pass=" << (g.pass ? "true" : "false")
            << '\n';
        if (!config.gof_csv.empty()) {
          SuiteResult r;
          r.gof.push_back(g);
          std::ofstream f(config.gof_csv, std::ios::binary);
          if (!f) invalid("cannot write '" + config.gof_csv + "'");
          f << r.gof_csv();
        }
        return config.check && !g.pass ? kExitVerifyFailed : kExitOk;
      }
      case Command::Verify:
      case Command::Identities: return run_verify(config, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_validation() ? kExitValidation : kExitNonConvergence;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Command line

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pure birth processes read at random times: pmfs, means, simulation and identity checks", "birthsub"};
  app.require_subcommand(0, 1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON run file mirroring the command-line options");

  std::string rates = "linear:1", k_text, t_text = "1", composition = "classical", format, only_text;
  int n0 = 1;
  CompositionParams params;
  std::optional<std::uint64_t> seed;
  RunConfig rc;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--rates", rates,
                    "linear:LAMBDA[:KMAX], comma-separated rates, inline JSON or @FILE (default linear:1)");
    sub->add_option("--n0", n0, "initial population");
    sub->add_option("--composition,-c", composition, "random clock: classical, fp, fp-iterated, sojourn, bridge, "
                                                     "stable, frac, frac-fp, frac-stable, nu-of-t2alpha, "
                                                     "stable-of-t2nu, cauchy-abs");
    sub->add_option("--nu", params.nu, "fractional order");
    sub->add_option("--alpha", params.alpha, "stable index");
    sub->add_option("--n", params.n, "iteration depth of first-passage clocks");
    sub->add_option("--scale", params.cauchy_scale, "folded-Cauchy scale (default t)");
    sub->add_option("--t", t_text, "time or comma-separated increasing grid");
    sub->add_option("--format", format, "csv or json");
    sub->add_option("--output,-o", rc.output, "output file (default stdout)");
  };

  CLI::App* pmf = app.add_subcommand("pmf", "state probabilities");
  common(pmf);
  pmf->add_option("--k", k_text, "state range A..B");
  CLI::App* mean = app.add_subcommand("mean", "truncated means with tail diagnostics");
  common(mean);
  mean->add_option("--max-k", rc.max_k, "highest state summed (default the schedule's kmax)");
  mean->add_option("--tol", rc.tolerance, "convergence tolerance on the last increment");
  mean->add_flag("--strict", rc.strict, "fail when the truncated sum has not converged");
  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo pmf with a goodness-of-fit check");
  common(sim);
  sim->add_option("--paths,--n-paths", rc.n_paths, "number of paths");
  sim->add_option("--seed", seed, std::string("seed (default $") + kSeedEnv + " or 1)");
  sim->add_option("--threads", rc.threads, "worker threads (0 = hardware)");
  sim->add_flag("!--no-gof", rc.gof, "skip the comparison with the analytic pmf");
  sim->add_flag("--check", rc.check, "exit 1 when the goodness-of-fit check fails");
  sim->add_option("--gof-csv", rc.gof_csv, "write the goodness-of-fit row here");
  CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
  CLI::App* idents = app.add_subcommand("identities", "run the deterministic identity families only");
  for (CLI::App* sub : {verify, idents}) {
    sub->add_option("--fixture", rc.fixture, std::string("suite fixture (default ") + BIRTHSUB_DEFAULT_FIXTURE + ")");
    sub->add_option("--only", only_text, "comma-separated families or Monte Carlo entry ids");
    sub->add_option("--threads", rc.threads, "worker threads for Monte Carlo families");
    sub->add_option("--format", format, "csv or json");
    sub->add_option("--output,-o", rc.output, "output file (default stdout)");
    sub->add_option("--gof-csv", rc.gof_csv, "write the Monte Carlo rows here");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (!config_path.empty()) {
      if (!app.get_subcommands().empty()) invalid("--config cannot be combined with a subcommand");
      return execute(run_config_from_json(read_file(config_path)), out, err);
    }
    if (app.get_subcommands().empty()) {
      err << app.help();
      return kExitValidation;
    }
    const CLI::App* sub = app.get_subcommands().front();
    rc.command = parse_command(sub->get_name());
    if (!format.empty()) rc.format = parse_format(format);
    if (!only_text.empty()) rc.only = split(only_text, ',');
    if (rc.command != Command::Verify && rc.command != Command::Identities) {
      rc.schedule_json = schedule_json_from_spec(rates, n0);
      rc.composition = parse_composition(composition);
      rc.params = params;
      rc.t_grid = parse_t_grid(t_text);
      if (!k_text.empty()) {
        const auto [a, b] = parse_k_range(k_text);
        rc.k_first = a;
        rc.k_last = b;
      }
      rc.seed = seed ? *seed : default_seed();
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return execute(rc, out, err);
}

}  // namespace birthsub
