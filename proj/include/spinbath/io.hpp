#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spinbath/engine.hpp"
#include "spinbath/ensembles.hpp"
#include "spinbath/model.hpp"

namespace spinbath {

// Command-line or config-file errors; the CLI maps these to exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Command { Case1, Case2, R3, General, OracleCheck, Sweep, Recurrence };
enum class OutputFormat { Csv, Json };

struct RunConfig {
  Command command = Command::Case1;
  SamplerSpec sampler{42, 0, 0.0, 1.0, PhaseMode::RealCoefficients};
  TimeGrid grid{0.0, 50.0, 2000};
  std::size_t p = 0;
  HermitianBlock2 system_block = identity_block();    // general
  HermitianBlock2 particle_block = identity_block();  // general
  double threshold = 0.05;
  double dwell = 5.0;
  double after = 5.0;          // recurrence
  double t_probe = 1.0;        // sweep
  std::size_t seeds = 20;      // sweep / oracle-check
  std::vector<std::size_t> n_list{10, 50, 100, 200};  // sweep
  std::size_t n_max = 10;      // oracle-check
  std::size_t points = 100;    // oracle-check
  std::string output_path;     // defaults to "<command>.<format>"
  OutputFormat format = OutputFormat::Csv;
};

// Parses "<command> [--flag value]...". A --config file supplies flat
// key=value defaults that explicit flags override; unknown keys and
// malformed values raise UsageError with the file line number.
RunConfig parse_run_config(const std::vector<std::string>& args);

// Executes a parsed run: writes the output file (removed again on failure)
// and prints a one-line summary. Returns the process exit status.
int run(const RunConfig& config, std::ostream& out);

// Shortest text for a double that parses back to the identical value
// (17 significant digits).
std::string format_double(double v);

void write_series_csv(std::ostream& out, const DecoherenceSeries& series);
void write_series_json(std::ostream& out, const DecoherenceSeries& series);

// Writes via a temporary-free guard: on any failure the partial file is
// removed.
void write_series_file(const std::string& path, const DecoherenceSeries& series,
                       OutputFormat format);

// Reads back a t,re,im,abs CSV (used by round-trip tests).
DecoherenceSeries read_series_csv(std::istream& in);

const char* command_name(Command c);

}  // namespace spinbath
