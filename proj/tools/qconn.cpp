// qconn: invariant suites, convergence tables, spectrum dumps and kernel
// file I/O for lattice q-connections.
//
// Exit codes: 0 success, 1 failed check or runtime error, 2 configuration
// error, 3 kernel file format error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qconn/cli.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
};

qconn::RunConfig make_config(const CommonArgs& args) {
  qconn::RunConfig cfg =
      args.config_path.empty() ? qconn::RunConfig{} : qconn::load_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  cfg.validate();
  return cfg;
}

int with_output(const CommonArgs& args, const std::function<int(std::ostream&)>& fn) {
  if (args.out_path.empty()) return fn(std::cout);
  std::ofstream out(args.out_path);
  if (!out) throw std::invalid_argument("cannot open output file: " + args.out_path);
  return fn(out);
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON run configuration");
  cmd->add_option("--out", args.out_path, "output file (default stdout)");
  cmd->add_option("--seed", args.seed, "override the configured seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice q-connection toolkit"};
  app.require_subcommand(1);

  CommonArgs check_args, converge_args, spectrum_args, kio_args;
  std::string kio_action, kio_in;

  CLI::App* check = app.add_subcommand("check", "run the invariant suites");
  add_common(check, check_args);

  CLI::App* converge = app.add_subcommand("converge", "emit the convergence table (CSV)");
  add_common(converge, converge_args);

  CLI::App* spectrum = app.add_subcommand("spectrum", "dump the Dirac spectrum");
  add_common(spectrum, spectrum_args);

  CLI::App* kio = app.add_subcommand("kernel-io", "save or load a kernel file");
  kio->add_option("action", kio_action, "save or load")->required();
  kio->add_option("--in", kio_in, "kernel file to load");
  add_common(kio, kio_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (check->parsed()) {
      return with_output(check_args,
                         [&](std::ostream& out) { return qconn::cmd_check(make_config(check_args), out); });
    }
    if (converge->parsed()) {
      return with_output(converge_args, [&](std::ostream& out) {
        return qconn::cmd_converge(make_config(converge_args), out);
      });
    }
    if (spectrum->parsed()) {
      return with_output(spectrum_args, [&](std::ostream& out) {
        return qconn::cmd_spectrum(make_config(spectrum_args), out);
      });
    }
    if (kio->parsed()) {
      qconn::RunConfig cfg = make_config(kio_args);
      if (kio_action == "save") {
        if (kio_args.out_path.empty())
          throw std::invalid_argument("kernel-io save: --out <path> is required");
        return qconn::cmd_kernel_save(cfg, kio_args.out_path, std::cout);
      }
      if (kio_action == "load") {
        if (kio_in.empty())
          throw std::invalid_argument("kernel-io load: --in <path> is required");
        return qconn::cmd_kernel_load(cfg, kio_in, kio_args.out_path, std::cout);
      }
      throw std::invalid_argument("kernel-io: action must be save or load");
    }
  } catch (const qconn::format_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
