#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qconn/cli.hpp"

using namespace qconn;
namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name) : path(fs::temp_directory_path() / name) {}
  ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

int run_cli(const std::string& args) {
  std::string cmd = std::string(QCONN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

RunConfig converge_config() {
  RunConfig cfg;
  cfg.manifold = {1, {128, 1, 1}, {1.0, 1.0, 1.0}};
  cfg.hbars = {0.25, 0.125, 0.0625};
  cfg.validate();
  return cfg;
}

struct CsvRow {
  std::string quantity;
  double hbar;
  double residual;
  std::string order;
};

std::vector<CsvRow> parse_csv(const std::string& text) {
  std::vector<CsvRow> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    CsvRow row;
    std::string field;
    std::getline(ls, row.quantity, ',');
    std::getline(ls, field, ',');
    row.hbar = std::stod(field);
    std::getline(ls, field, ',');
    row.residual = std::stod(field);
    std::getline(ls, row.order, ',');
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("cmd_check on the default config passes with at least 12 named checks") {
  RunConfig cfg;
  std::ostringstream out;
  REQUIRE(cmd_check(cfg, out) == 0);
  auto report = nlohmann::json::parse(out.str());
  REQUIRE(report.at("pass").get<bool>());
  const auto& checks = report.at("checks");
  REQUIRE(checks.size() >= 12);
  std::set<std::string> names;
  for (const auto& c : checks) {
    REQUIRE(c.at("pass").get<bool>());
    names.insert(c.at("name").get<std::string>());
  }
  for (const char* required :
       {"trace_gauge_invariance", "gluing_order", "gauge_compatibility_order",
        "star_algebra_associativity", "star_algebra_involution", "star_algebra_trace_cyclicity",
        "commutator_kernel_identity", "tetrad_reconstruction", "tetrad_rotation_invariance",
        "symbol_lattice_identity", "symbol_homogeneity", "dirac_pairing_symmetry",
        "commutator_norm_trend", "kernel_unitarity", "kernel_inverse_property",
        "kernel_io_roundtrip"})
    REQUIRE(names.count(required) == 1);
  REQUIRE(report.contains("classical_limit"));
  REQUIRE(report.at("classical_limit").contains("connections"));
  REQUIRE(report.at("classical_limit").contains("metrics"));
}

TEST_CASE("cmd_check is deterministic") {
  RunConfig cfg;
  std::ostringstream a, b;
  cmd_check(cfg, a);
  cmd_check(cfg, b);
  REQUIRE(a.str() == b.str());
  REQUIRE_FALSE(a.str().empty());
}

TEST_CASE("a corrupted kernel entry fails the named check with exit 1") {
  RunConfig cfg;
  cfg.corrupt_kernel = true;
  std::ostringstream out;
  REQUIRE(cmd_check(cfg, out) == 1);
  auto report = nlohmann::json::parse(out.str());
  REQUIRE_FALSE(report.at("pass").get<bool>());
  bool unitarity_failed = false;
  for (const auto& c : report.at("checks"))
    if (c.at("name") == "kernel_unitarity") unitarity_failed = !c.at("pass").get<bool>();
  REQUIRE(unitarity_failed);
}

TEST_CASE("oversized bandlimits are rejected at config validation") {
  nlohmann::json j = {{"manifold", {{"d", 1}, {"n", {8}}, {"L", {1.0}}}}, {"bandlimit", 4}};
  REQUIRE_THROWS_AS(parse_config(j), std::invalid_argument);
}

TEST_CASE("cmd_converge reports first-order gluing on the circle") {
  std::ostringstream out;
  REQUIRE(cmd_converge(converge_config(), out) == 0);
  auto rows = parse_csv(out.str());
  int gluing_rows = 0;
  for (const auto& row : rows) {
    if (row.quantity != "gluing") continue;
    ++gluing_rows;
    double order = std::stod(row.order);
    REQUIRE(order >= 0.8);
    REQUIRE(order <= 1.2);
  }
  REQUIRE(gluing_rows == 3);
}

TEST_CASE("cmd_converge reports second-order symbol convergence") {
  std::ostringstream out;
  cmd_converge(converge_config(), out);
  auto rows = parse_csv(out.str());
  int symbol_rows = 0;
  for (const auto& row : rows) {
    if (row.quantity != "symbol_continuum") continue;
    ++symbol_rows;
    double order = std::stod(row.order);
    REQUIRE(order >= 1.7);
    REQUIRE(order <= 2.3);
  }
  REQUIRE(symbol_rows == 3);
}

TEST_CASE("cmd_converge needs three hbar values") {
  RunConfig cfg = converge_config();
  cfg.hbars = {0.25, 0.125};
  std::ostringstream out;
  REQUIRE_THROWS_AS(cmd_converge(cfg, out), std::invalid_argument);
}

TEST_CASE("the zero connection converges exactly") {
  RunConfig cfg = converge_config();
  cfg.connection_amplitude = 0.0;
  cfg.gauge_amplitude = 0.0;
  std::ostringstream out;
  cmd_converge(cfg, out);
  for (const auto& row : parse_csv(out.str())) {
    if (row.quantity == "symbol_continuum") continue;
    REQUIRE(row.residual <= 1e-11);
    REQUIRE(row.order == "exact");
  }
}

TEST_CASE("cmd_spectrum emits a real spectrum for the flat metric") {
  RunConfig cfg;
  std::ostringstream out;
  REQUIRE(cmd_spectrum(cfg, out) == 0);
  auto report = nlohmann::json::parse(out.str());
  const auto& eigs = report.at("eigenvalues");
  REQUIRE(static_cast<int>(eigs.size()) == 2 * 64);
  double scale = 0.0, max_imag = 0.0;
  for (const auto& e : eigs) {
    scale = std::max(scale, std::abs(e[0].get<double>()));
    max_imag = std::max(max_imag, std::abs(e[1].get<double>()));
  }
  REQUIRE(max_imag <= 1e-9 * scale);
  const auto& sv = report.at("singular_values");
  REQUIRE(sv.size() == eigs.size());
  for (std::size_t i = 1; i < sv.size(); ++i)
    REQUIRE(sv[i].get<double>() <= sv[i - 1].get<double>() + 1e-12);
}

TEST_CASE("the qconn binary honors the exit-code contract") {
  TempFile cfg_file("qconn_cli_cfg.json");
  {
    std::ofstream out(cfg_file.path);
    out << R"({"manifold": {"d": 3, "n": [4,4,4], "L": [1,1,1]}, "bandlimit": 1})";
  }
  TempFile report("qconn_cli_report.json");
  REQUIRE(run_cli("check --config " + cfg_file.path.string() + " --out " +
                  report.path.string()) == 0);
  std::ifstream in(report.path);
  auto parsed = nlohmann::json::parse(in);
  REQUIRE(parsed.at("pass").get<bool>());

  // Config errors exit 2.
  TempFile bad_cfg("qconn_cli_bad.json");
  {
    std::ofstream out(bad_cfg.path);
    out << R"({"manifold": {"d": 1, "n": [8], "L": [1.0]}, "bandlimit": 7})";
  }
  REQUIRE(run_cli("check --config " + bad_cfg.path.string()) == 2);
  REQUIRE(run_cli("bogus-subcommand") == 2);
}

TEST_CASE("kernel files round-trip through the binary with exit 3 on truncation") {
  TempFile cfg_file("qconn_kio_cfg.json");
  {
    std::ofstream out(cfg_file.path);
    out << R"({"manifold": {"d": 1, "n": [10], "L": [1.0]}, "bandlimit": 2})";
  }
  TempFile kernel("qconn_kio.qcon");
  TempFile resaved("qconn_kio_resaved.qcon");
  std::string base = " --config " + cfg_file.path.string();
  REQUIRE(run_cli("kernel-io save" + base + " --out " + kernel.path.string()) == 0);
  REQUIRE(run_cli("kernel-io load" + base + " --in " + kernel.path.string() + " --out " +
                  resaved.path.string()) == 0);

  std::ifstream f1(kernel.path, std::ios::binary), f2(resaved.path, std::ios::binary);
  std::stringstream b1, b2;
  b1 << f1.rdbuf();
  b2 << f2.rdbuf();
  REQUIRE_FALSE(b1.str().empty());
  REQUIRE(b1.str() == b2.str());

  // Truncate by one byte: format error, exit 3.
  fs::resize_file(kernel.path, fs::file_size(kernel.path) - 1);
  REQUIRE(run_cli("kernel-io load" + base + " --in " + kernel.path.string()) == 3);
}
