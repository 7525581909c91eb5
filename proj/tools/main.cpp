#include <iostream>
#include <string>
#include <vector>

#include "spinbath/io.hpp"

namespace {

void print_usage(std::ostream& out) {
  out << "usage: spinbath <command> [--flag value]...\n"
         "\n"
         "commands:\n"
         "  case1        r1(t) for a sampled bath (observe the central particle)\n"
         "  case2        expectation of generic blocks on the first p particles\n"
         "  r3           product of p spin-x expectations\n"
         "  general      expectation of a uniform product observable\n"
         "  oracle-check closed form vs. full state-vector contraction\n"
         "  sweep        median |r1(t_probe)| across bath sizes and seeds\n"
         "  recurrence   revival scan of |r1|\n"
         "\n"
         "common flags: --seed <u64> --n <count> --p <count> --t-min <t> --t-max <t>\n"
         "  --steps <count> --g-min <g> --g-max <g> --threshold <x> --dwell <t>\n"
         "  --after <t> --t-probe <t> --seeds <count> --n-list <a,b,...> --n-max <count>\n"
         "  --points <count> --output <path> --format csv|json --config <path>\n"
         "  --phases real|random\n"
         "\n"
         "general-command observable flags: --s-uu --s-dd --s-od-re --s-od-im\n"
         "  --eps-uu --eps-dd --eps-od-re --eps-od-im\n"
         "\n"
         "A --config file holds flat key=value lines mirroring the flags (plus\n"
         "command=<name>); explicit flags override file values.\n";
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args[0] == "--help" || args[0] == "-h") {
    print_usage(args.empty() ? std::cerr : std::cout);
    return args.empty() ? 2 : 0;
  }
  try {
    const spinbath::RunConfig rc = spinbath::parse_run_config(args);
    return spinbath::run(rc, std::cout);
  } catch (const spinbath::ResourceLimitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    print_usage(std::cerr);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
