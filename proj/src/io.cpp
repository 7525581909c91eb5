#include "spinbath/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "spinbath/oracle.hpp"

namespace spinbath {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::Case1: return "case1";
    case Command::Case2: return "case2";
    case Command::R3: return "r3";
    case Command::General: return "general";
    case Command::OracleCheck: return "oracle-check";
    case Command::Sweep: return "sweep";
    case Command::Recurrence: return "recurrence";
  }
  return "?";
}

void write_series_csv(std::ostream& out, const DecoherenceSeries& series) {
  out << "t,re,im,abs\n";
  for (std::size_t j = 0; j < series.times.size(); ++j) {
    const Complex& v = series.values[j];
    out << format_double(series.times[j]) << ',' << format_double(v.real()) << ','
        << format_double(v.imag()) << ',' << format_double(std::hypot(v.real(), v.imag()))
        << '\n';
  }
}

void write_series_json(std::ostream& out, const DecoherenceSeries& series) {
  out << "[\n";
  for (std::size_t j = 0; j < series.times.size(); ++j) {
    const Complex& v = series.values[j];
    out << "{\"t\":" << format_double(series.times[j]) << ",\"re\":"
        << format_double(v.real()) << ",\"im\":" << format_double(v.imag())
        << ",\"abs\":" << format_double(std::hypot(v.real(), v.imag())) << '}';
    if (j + 1 < series.times.size()) out << ',';
    out << '\n';
  }
  out << "]\n";
}

namespace {

// Removes the partially written file unless commit() was reached.
class OutputFile {
 public:
  explicit OutputFile(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
  }
  ~OutputFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(path_, ec);
    }
  }
  std::ostream& stream() { return out_; }
  void commit() {
    out_.flush();
    if (!out_) throw std::runtime_error("failed writing output file: " + path_);
    committed_ = true;
  }

 private:
  std::string path_;
  std::ofstream out_;
  bool committed_ = false;
};

}  // namespace

void write_series_file(const std::string& path, const DecoherenceSeries& series,
                       OutputFormat format) {
  OutputFile file(path);
  if (format == OutputFormat::Csv)
    write_series_csv(file.stream(), series);
  else
    write_series_json(file.stream(), series);
  file.commit();
}

DecoherenceSeries read_series_csv(std::istream& in) {
  DecoherenceSeries series;
  std::string line;
  if (!std::getline(in, line) || line != "t,re,im,abs")
    throw std::runtime_error("series CSV: missing t,re,im,abs header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    double cols[4];
    for (double& c : cols) {
      if (!std::getline(row, cell, ',')) throw std::runtime_error("series CSV: short row");
      c = std::stod(cell);
    }
    series.times.push_back(cols[0]);
    series.values.push_back({cols[1], cols[2]});
  }
  return series;
}

// ---------------------------------------------------------------------------
// Argument and config-file parsing
// ---------------------------------------------------------------------------

namespace {

const std::set<std::string> kAllKeys = {
    "seed", "n", "p", "t-min", "t-max", "steps", "g-min", "g-max", "threshold",
    "dwell", "after", "t-probe", "seeds", "n-list", "n-max", "points", "output",
    "format", "phases", "s-uu", "s-dd", "s-od-re", "s-od-im", "eps-uu", "eps-dd",
    "eps-od-re", "eps-od-im"};

struct KeySets {
  std::set<std::string> allowed;
  std::set<std::string> required;
};

KeySets keys_for(Command c) {
  const std::set<std::string> common = {"seed", "output", "format"};
  const std::set<std::string> grid = {"t-min", "t-max", "steps"};
  const std::set<std::string> sampler = {"n", "g-min", "g-max", "phases"};
  KeySets ks;
  auto add = [&ks](const std::set<std::string>& s) {
    ks.allowed.insert(s.begin(), s.end());
  };
  add(common);
  switch (c) {
    case Command::Case1:
      add(grid); add(sampler);
      ks.allowed.insert({"threshold", "dwell"});
      ks.required = {"n"};
      break;
    case Command::Case2:
    case Command::R3:
      add(grid); add(sampler);
      ks.allowed.insert({"p", "threshold", "dwell"});
      ks.required = {"n", "p"};
      break;
    case Command::General:
      add(grid); add(sampler);
      ks.allowed.insert({"threshold", "dwell", "s-uu", "s-dd", "s-od-re", "s-od-im",
                         "eps-uu", "eps-dd", "eps-od-re", "eps-od-im"});
      ks.required = {"n"};
      break;
    case Command::OracleCheck:
      ks.allowed.insert({"seeds", "n-max", "points", "t-min", "t-max"});
      break;
    case Command::Sweep:
      ks.allowed.insert({"seeds", "n-list", "t-probe", "g-min", "g-max", "phases"});
      break;
    case Command::Recurrence:
      add(grid); add(sampler);
      ks.allowed.insert({"threshold", "after"});
      ks.required = {"n"};
      break;
  }
  return ks;
}

Command parse_command(const std::string& word) {
  if (word == "case1") return Command::Case1;
  if (word == "case2") return Command::Case2;
  if (word == "r3") return Command::R3;
  if (word == "general") return Command::General;
  if (word == "oracle-check") return Command::OracleCheck;
  if (word == "sweep") return Command::Sweep;
  if (word == "recurrence") return Command::Recurrence;
  throw UsageError("unknown command '" + word +
                   "' (expected case1|case2|r3|general|oracle-check|sweep|recurrence)");
}

std::string trim(const std::string& s) {
  const auto from = s.find_first_not_of(" \t\r");
  if (from == std::string::npos) return "";
  const auto to = s.find_last_not_of(" \t\r");
  return s.substr(from, to - from + 1);
}

// Flat key=value file mirroring the CLI flags; '#' starts a comment line.
void parse_config_file(const std::string& path, std::string& command,
                       std::map<std::string, std::string>& kv) {
  std::ifstream in(path);
  if (!in) throw UsageError("config file '" + path + "': cannot open");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    auto fail = [&](const std::string& why) {
      std::ostringstream msg;
      msg << "config file '" << path << "' line " << lineno << ": " << why;
      throw UsageError(msg.str());
    };
    if (eq == std::string::npos) fail("expected key=value, got '" + text + "'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (key == "command") {
      command = value;
      continue;
    }
    if (key == "config") fail("'config' is not allowed inside a config file");
    if (!kAllKeys.count(key)) fail("unknown key '" + key + "'");
    kv[key] = value;  // later lines win, CLI flags override all of them
  }
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw UsageError("--" + key + ": expected a number, got '" + value + "'");
  }
  if (used != value.size())
    throw UsageError("--" + key + ": expected a number, got '" + value + "'");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw UsageError("--" + key + ": expected a non-negative integer, got '" + value + "'");
  }
  if (used != value.size() || value.find('-') != std::string::npos)
    throw UsageError("--" + key + ": expected a non-negative integer, got '" + value + "'");
  return v;
}

std::vector<std::size_t> to_size_list(const std::string& key, const std::string& value) {
  std::vector<std::size_t> out;
  std::istringstream in(value);
  std::string item;
  while (std::getline(in, item, ','))
    out.push_back(static_cast<std::size_t>(to_u64(key, trim(item))));
  if (out.empty()) throw UsageError("--" + key + ": expected a comma-separated list");
  return out;
}

}  // namespace

RunConfig parse_run_config(const std::vector<std::string>& args) {
  std::string command_word;
  std::string config_path;
  std::map<std::string, std::string> cli;

  std::size_t i = 0;
  if (i < args.size() && !args[i].starts_with("--")) command_word = args[i++];
  for (; i < args.size(); ++i) {
    const std::string& arg = args[i];
    if (!arg.starts_with("--"))
      throw UsageError("unexpected argument '" + arg + "' (flags start with --)");
    const std::string key = arg.substr(2);
    if (key != "config" && !kAllKeys.count(key))
      throw UsageError("unknown option --" + key);
    if (i + 1 >= args.size()) throw UsageError("--" + key + " needs a value");
    const std::string& value = args[++i];
    if (key == "config")
      config_path = value;
    else
      cli[key] = value;
  }

  std::map<std::string, std::string> kv;
  if (!config_path.empty()) {
    std::string file_command;
    parse_config_file(config_path, file_command, kv);
    if (command_word.empty()) command_word = file_command;
  }
  for (const auto& [k, v] : cli) kv[k] = v;  // flags override file values

  if (command_word.empty())
    throw UsageError("no command given (on the command line or as command= in a config file)");

  RunConfig rc;
  rc.command = parse_command(command_word);

  const KeySets ks = keys_for(rc.command);
  for (const auto& [k, v] : kv)
    if (!ks.allowed.count(k))
      throw UsageError("--" + k + " does not apply to command '" + command_word + "'");
  for (const std::string& k : ks.required)
    if (!kv.count(k)) throw UsageError("command '" + command_word + "' requires --" + k);

  auto take = [&kv](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  if (const auto* v = take("seed")) rc.sampler.seed = to_u64("seed", *v);
  if (const auto* v = take("n")) rc.sampler.n = static_cast<std::size_t>(to_u64("n", *v));
  if (const auto* v = take("g-min")) rc.sampler.g_min = to_double("g-min", *v);
  if (const auto* v = take("g-max")) rc.sampler.g_max = to_double("g-max", *v);
  if (const auto* v = take("phases")) {
    if (*v == "real")
      rc.sampler.phases = PhaseMode::RealCoefficients;
    else if (*v == "random")
      rc.sampler.phases = PhaseMode::RandomPhases;
    else
      throw UsageError("--phases: expected real|random, got '" + *v + "'");
  }
  if (const auto* v = take("t-min")) rc.grid.t_start = to_double("t-min", *v);
  if (const auto* v = take("t-max")) rc.grid.t_end = to_double("t-max", *v);
  if (const auto* v = take("steps"))
    rc.grid.steps = static_cast<std::size_t>(to_u64("steps", *v));
  if (const auto* v = take("p")) rc.p = static_cast<std::size_t>(to_u64("p", *v));
  if (const auto* v = take("threshold")) rc.threshold = to_double("threshold", *v);
  if (const auto* v = take("dwell")) rc.dwell = to_double("dwell", *v);
  if (const auto* v = take("after")) rc.after = to_double("after", *v);
  if (const auto* v = take("t-probe")) rc.t_probe = to_double("t-probe", *v);
  if (const auto* v = take("seeds"))
    rc.seeds = static_cast<std::size_t>(to_u64("seeds", *v));
  if (const auto* v = take("n-list")) rc.n_list = to_size_list("n-list", *v);
  if (const auto* v = take("n-max"))
    rc.n_max = static_cast<std::size_t>(to_u64("n-max", *v));
  if (const auto* v = take("points"))
    rc.points = static_cast<std::size_t>(to_u64("points", *v));
  if (const auto* v = take("output")) rc.output_path = *v;
  if (const auto* v = take("format")) {
    if (*v == "csv")
      rc.format = OutputFormat::Csv;
    else if (*v == "json")
      rc.format = OutputFormat::Json;
    else
      throw UsageError("--format: expected csv|json, got '" + *v + "'");
  }
  if (const auto* v = take("s-uu")) rc.system_block.uu = to_double("s-uu", *v);
  if (const auto* v = take("s-dd")) rc.system_block.dd = to_double("s-dd", *v);
  if (const auto* v = take("s-od-re"))
    rc.system_block.od = {to_double("s-od-re", *v), rc.system_block.od.imag()};
  if (const auto* v = take("s-od-im"))
    rc.system_block.od = {rc.system_block.od.real(), to_double("s-od-im", *v)};
  if (const auto* v = take("eps-uu")) rc.particle_block.uu = to_double("eps-uu", *v);
  if (const auto* v = take("eps-dd")) rc.particle_block.dd = to_double("eps-dd", *v);
  if (const auto* v = take("eps-od-re"))
    rc.particle_block.od = {to_double("eps-od-re", *v), rc.particle_block.od.imag()};
  if (const auto* v = take("eps-od-im"))
    rc.particle_block.od = {rc.particle_block.od.real(), to_double("eps-od-im", *v)};

  if (rc.command == Command::Recurrence && !kv.count("threshold")) rc.threshold = 0.5;

  if ((rc.command == Command::Case2 || rc.command == Command::R3) &&
      (rc.p == 0 || rc.p > rc.sampler.n))
    throw UsageError("--p must satisfy 1 <= p <= n");
  return rc;
}

// ---------------------------------------------------------------------------
// Command execution
// ---------------------------------------------------------------------------

namespace {

std::string default_output(const RunConfig& rc) {
  if (!rc.output_path.empty()) return rc.output_path;
  return std::string(command_name(rc.command)) +
         (rc.format == OutputFormat::Csv ? ".csv" : ".json");
}

std::string describe_decay(const std::optional<double>& dt) {
  return dt ? "decay_time=" + format_double(*dt) : "decay_time=none";
}

int run_series_command(const RunConfig& rc, std::ostream& out) {
  const SpinBathConfig config = sample_config(rc.sampler);
  DecoherenceSeries series;
  switch (rc.command) {
    case Command::Case1:
      series = series_r1(config, rc.grid);
      break;
    case Command::Case2: {
      std::vector<HermitianBlock2> blocks;
      blocks.reserve(rc.p);
      for (std::size_t j = 1; j <= rc.p; ++j)
        blocks.push_back(sample_block(rc.sampler.seed, j));
      series = series_case2(config, blocks, rc.grid);
      break;
    }
    case Command::R3:
      series = series_r3(config, rc.p, rc.grid);
      break;
    case Command::General: {
      const ObservableSpec obs{rc.system_block,
                               std::vector<HermitianBlock2>(rc.sampler.n, rc.particle_block)};
      series = series_expectation(config, obs, rc.grid);
      break;
    }
    default:
      throw std::logic_error("not a series command");
  }

  const std::string path = default_output(rc);
  write_series_file(path, series, rc.format);
  const auto dt = decay_time(abs_series(series), rc.threshold, rc.dwell);
  out << command_name(rc.command) << " seed=" << rc.sampler.seed << " n=" << rc.sampler.n
      << (rc.p ? " p=" + std::to_string(rc.p) : "") << ": wrote " << series.times.size()
      << " rows to " << path << "; " << describe_decay(dt) << '\n';
  return 0;
}

int run_oracle_check(const RunConfig& rc, std::ostream& out) {
  if (rc.n_max == 0 || rc.n_max > oracle::kMaxBathParticles) {
    std::ostringstream msg;
    msg << "oracle-check: n-max " << rc.n_max << " exceeds the oracle cap of "
        << oracle::kMaxBathParticles << " particles";
    throw ResourceLimitError(msg.str());
  }
  if (rc.seeds == 0 || rc.points == 0)
    throw UsageError("oracle-check: --seeds and --points must be >= 1");

  const TimeGrid grid{rc.grid.t_start, rc.grid.t_end, rc.points};
  const std::vector<double> times = grid_times(grid);

  struct Row {
    std::size_t config_index, n;
    double t, engine, oracle;
  };
  std::vector<Row> rows;
  double worst = 0.0;
  for (std::size_t k = 0; k < rc.seeds; ++k) {
    SamplerSpec spec;
    spec.seed = rc.sampler.seed + k;
    spec.n = (k % rc.n_max) + 1;
    spec.phases = (k < rc.seeds / 2) ? PhaseMode::RealCoefficients : PhaseMode::RandomPhases;
    const SpinBathConfig config = sample_config(spec);
    const ObservableSpec obs = sample_observable(spec.seed, spec.n);
    const oracle::DenseObservable op = oracle::build_observable(obs);
    const oracle::DenseState psi0 = oracle::build_initial_state(config);
    for (double t : times) {
      const double engine_value = expectation(t, config, obs);
      const double oracle_value =
          oracle::expectation_value(op, oracle::evolve(psi0, config, t));
      worst = std::max(worst, std::abs(engine_value - oracle_value));
      if (!rc.output_path.empty())
        rows.push_back({k, spec.n, t, engine_value, oracle_value});
    }
  }

  if (!rc.output_path.empty()) {
    OutputFile file(rc.output_path);
    file.stream() << "config,n,t,engine,oracle,abs_dev\n";
    for (const Row& r : rows)
      file.stream() << r.config_index << ',' << r.n << ',' << format_double(r.t) << ','
                    << format_double(r.engine) << ',' << format_double(r.oracle) << ','
                    << format_double(std::abs(r.engine - r.oracle)) << '\n';
    file.commit();
  }

  constexpr double kTolerance = 1e-10;
  const bool ok = worst < kTolerance;
  out << "oracle-check: max |engine - oracle| = " << format_double(worst) << " over "
      << rc.seeds << " configs x " << rc.points << " points (n <= " << rc.n_max
      << "): " << (ok ? "OK" : "FAIL") << '\n';
  return ok ? 0 : 1;
}

int run_sweep(const RunConfig& rc, std::ostream& out) {
  const auto trend = n_trend(rc.seeds, rc.n_list, rc.t_probe, rc.sampler);
  const std::string path = default_output(rc);
  OutputFile file(path);
  if (rc.format == OutputFormat::Csv) {
    file.stream() << "n,median_abs_r1\n";
    for (const auto& [n, med] : trend)
      file.stream() << n << ',' << format_double(med) << '\n';
  } else {
    file.stream() << "[\n";
    for (std::size_t j = 0; j < trend.size(); ++j) {
      file.stream() << "{\"n\":" << trend[j].first
                    << ",\"median_abs_r1\":" << format_double(trend[j].second) << '}';
      if (j + 1 < trend.size()) file.stream() << ',';
      file.stream() << '\n';
    }
    file.stream() << "]\n";
  }
  file.commit();
  out << "sweep seeds=" << rc.seeds << " t_probe=" << format_double(rc.t_probe)
      << ": wrote " << trend.size() << " rows to " << path << '\n';
  return 0;
}

int run_recurrence(const RunConfig& rc, std::ostream& out) {
  const SpinBathConfig config = sample_config(rc.sampler);
  const DecoherenceSeries series = series_r1(config, rc.grid);
  const std::vector<double> revivals = recurrence_scan(series, rc.threshold, rc.after);

  DecoherenceSeries picked;
  picked.label = "r1_revivals";
  for (std::size_t j = 0; j < series.times.size(); ++j)
    if (series.times[j] > rc.after && std::abs(series.values[j]) > rc.threshold) {
      picked.times.push_back(series.times[j]);
      picked.values.push_back(series.values[j]);
    }
  const std::string path = default_output(rc);
  write_series_file(path, picked, rc.format);
  out << "recurrence seed=" << rc.sampler.seed << " n=" << rc.sampler.n << ": "
      << revivals.size() << " revivals with |r1| > " << format_double(rc.threshold)
      << " after t=" << format_double(rc.after);
  if (!revivals.empty()) out << "; first at t=" << format_double(revivals.front());
  out << "; wrote " << path << '\n';
  return 0;
}

}  // namespace

int run(const RunConfig& rc, std::ostream& out) {
  switch (rc.command) {
    case Command::Case1:
    case Command::Case2:
    case Command::R3:
    case Command::General:
      return run_series_command(rc, out);
    case Command::OracleCheck:
      return run_oracle_check(rc, out);
    case Command::Sweep:
      return run_sweep(rc, out);
    case Command::Recurrence:
      return run_recurrence(rc, out);
  }
  return 2;
}

}  // namespace spinbath
