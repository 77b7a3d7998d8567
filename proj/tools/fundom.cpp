// fundom: build, verify, export and inspect circle-diffeomorphism constructions.

#include "fundom/error.hpp"
#include "fundom/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace fundom;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUndecided = 3;

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::RationalInput:
    case ErrorCode::ParseError:
      return kExitUsage;
    case ErrorCode::DisjointnessUndecided:
    case ErrorCode::PrecisionExhausted:
      return kExitUndecided;
    default:
      return kExitFail;
  }
}

int report_error(ErrorCode code, const std::string& message) {
  nlohmann::json j{{"error", std::string(to_string(code))}, {"message", message}};
  std::cerr << j.dump() << "\n";
  return exit_for(code);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << data;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal C1 circle diffeomorphisms with a measurable fundamental domain"};
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build", "Assemble a construction and write its JSON descriptor");
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::string> alpha, output;
  std::optional<std::size_t> n_max, depth, d_max, grid;
  std::optional<long> I_max;
  bool print_config = false;
  build->add_option("-c,--config", config_path, "key = value config file");
  build->add_option("--set", sets, "override a config key (key=value), repeatable");
  build->add_option("--alpha", alpha, "golden | cf:a,b,... | cf:pre;period | decimal+-err");
  build->add_option("--n-max", n_max, "cocycle levels");
  build->add_option("-d,--depth", depth, "cylinder depth d");
  build->add_option("--I-max", I_max, "measure radius");
  build->add_option("--d-max", d_max, "disjointness search depth");
  build->add_option("--grid", grid, "verification grid size");
  build->add_option("-o,--output", output, "descriptor path");
  build->add_flag("--print-config", print_config, "print the effective config and exit");

  // verify
  auto* verify = app.add_subcommand("verify", "Run verification suites on a descriptor");
  std::string verify_in, report_path;
  std::vector<std::string> suites;
  verify->add_option("descriptor", verify_in, "descriptor JSON")->required();
  verify->add_option("-s,--suite", suites,
                     "suite: disjointness, lemma, summability, conjugacy, derivative, fundamental-domain, "
                     "rotation-number (repeatable; default all)");
  verify->add_option("-r,--report", report_path, "write the report JSON here instead of stdout");

  // export
  auto* exp = app.add_subcommand("export", "Write evaluation grids as CSV (x,value,width)");
  std::string export_in, what, csv_out;
  std::size_t samples = 1000;
  exp->add_option("descriptor", export_in, "descriptor JSON")->required();
  exp->add_option("-w,--what", what, "phi | F | derivative | cdf")->required();
  exp->add_option("-n,--samples", samples, "grid intervals; writes samples + 1 rows");
  exp->add_option("-o,--output", csv_out, "CSV path (default stdout)");

  // inspect
  auto* inspect = app.add_subcommand("inspect", "Summarize a descriptor");
  std::string inspect_in;
  inspect->add_option("descriptor", inspect_in, "descriptor JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*build) {
      BuildConfig cfg = config_path.empty() ? BuildConfig{} : BuildConfig::parse(read_file(config_path));
      for (const auto& kv : sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (alpha) cfg.alpha = *alpha;
      if (n_max) cfg.n_max = *n_max;
      if (depth) cfg.d = *depth;
      if (I_max) cfg.I_max = *I_max;
      if (d_max) cfg.d_max = *d_max;
      if (grid) cfg.grid = *grid;
      if (output) cfg.output = *output;
      cfg.validate();
      if (print_config) {
        std::cout << cfg.to_text();
        return kExitPass;
      }
      auto c = build_construction(cfg);
      write_file(cfg.output, save_descriptor(*c));
      std::cout << cfg.output << "\n";
      return kExitPass;
    }
    if (*verify) {
      auto c = load_descriptor(read_file(verify_in));
      VerificationReport r = run_verification(*c, suites);
      if (report_path.empty()) std::cout << r.to_json();
      else write_file(report_path, r.to_json());
      for (const auto& chk : r.checks) std::cerr << to_string(chk.status) << "  " << chk.name << "\n";
      return r.exit_code();
    }
    if (*exp) {
      if (!is_export_kind(what)) return report_error(ErrorCode::InvalidArgument, "unknown export kind '" + what + "'");
      auto c = load_descriptor(read_file(export_in));
      if (csv_out.empty()) {
        export_csv(*c, what, samples, std::cout);
      } else {
        std::ostringstream ss;
        export_csv(*c, what, samples, ss);
        write_file(csv_out, ss.str());
      }
      return kExitPass;
    }
    if (*inspect) {
      auto c = load_descriptor(read_file(inspect_in));
      std::cout << inspect_json(*c);
      return kExitPass;
    }
  } catch (const Error& e) {
    return report_error(e.code(), e.what());
  } catch (const std::exception& e) {
    nlohmann::json j{{"error", "Internal"}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
