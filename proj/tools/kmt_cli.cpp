// kmt: command-line front end for the tail-asymptotics library.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "kmt/errors.hpp"
#include "kmt/model.hpp"
#include "kmt/report.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 2, kAnalysis = 3, kDisagree = 4 };

struct Flags {
  std::string model;
  std::string report;
  std::string format = "json";
  std::string plot_data;
  bool verify = false;
  bool assume_stable = false;
  bool resultant_check = false;
  int truncation = 400;
  double eps_eq = kmt::kDefaultEpsEq;
};

void print_error(const std::string& code, const std::string& message) {
  nlohmann::json j{{"error", code}, {"message", message}};
  std::cerr << j.dump() << '\n';
}

kmt::ModelSpec load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw kmt::Error(kmt::ErrorCode::kBadParameter, "cannot read model file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return kmt::parse_model_text(ss.str());
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
  } else {
    kmt::write_atomic(path, content);
  }
}

int run_analyze(const Flags& fl, bool verify) {
  const kmt::ModelSpec model = load_model(fl.model);
  kmt::RunOptions o;
  o.eps_eq = fl.eps_eq;
  o.truncation = fl.truncation;
  o.verify = verify;
  o.assume_stable = fl.assume_stable;
  o.resultant_check = fl.resultant_check;
  o.keep_sequence = !fl.plot_data.empty();
  if (o.keep_sequence && !std::holds_alternative<kmt::WalkSpec>(model)) {
    throw kmt::Error(kmt::ErrorCode::kNoOracle,
                     "plot data needs the truncated oracle, which exists for walks only");
  }
  const kmt::RunResult res = kmt::run_analysis(model, o);
  emit(fl.report, fl.format == "text" ? kmt::render_text(res.report)
                                      : kmt::render_json(res.report));
  if (o.keep_sequence) {
    if (!res.tail) throw kmt::Error(kmt::ErrorCode::kNoOracle, "no tail form to compare against");
    kmt::write_atomic(fl.plot_data, kmt::plot_csv(res.sequence, *res.tail));
  }
  return res.oracle_disagrees ? kDisagree : kOk;
}

int run_dump(const Flags& fl) {
  const kmt::ModelSpec model = load_model(fl.model);
  emit(fl.report, kmt::render_json(kmt::kernel_dump(model)));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact tail asymptotics by the kernel method"};
  app.require_subcommand(1);
  Flags fl;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--model", fl.model, "model JSON file")->required();
    sub->add_option("--report", fl.report, "write the report here instead of stdout");
  };
  auto add_analysis = [&](CLI::App* sub) {
    add_common(sub);
    sub->add_option("--format", fl.format, "json or text")
        ->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--truncation", fl.truncation, "oracle truncation level N")
        ->check(CLI::Range(8, 1000000));
    sub->add_option("--eps-eq", fl.eps_eq, "tolerance for equal singularity candidates")
        ->check(CLI::PositiveNumber);
    sub->add_option("--plot-data", fl.plot_data, "CSV of oracle vs predicted tail");
    sub->add_flag("--assume-stable", fl.assume_stable,
                  "continue when the advisory walk stability check fails");
    sub->add_flag("--resultant-check", fl.resultant_check,
                  "cross-check x* with the resultant polynomial");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "classify and report the tail");
  add_analysis(analyze);
  analyze->add_flag("--verify", fl.verify, "compare with the truncated oracle");
  CLI::App* verify = app.add_subcommand("verify", "analyze and compare with the oracle");
  add_analysis(verify);
  CLI::App* dump = app.add_subcommand("dump-kernel", "kernel polynomials and branch points");
  add_common(dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("BadFlags", e.what());
    return kValidation;
  }

  try {
    if (*dump) return run_dump(fl);
    return run_analyze(fl, *verify || fl.verify);
  } catch (const kmt::Error& e) {
    print_error(std::string(kmt::to_string(e.code())), e.what());
    return kmt::is_validation_error(e.code()) ? kValidation : kAnalysis;
  } catch (const nlohmann::json::exception& e) {
    print_error("WrongShape", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    print_error("Internal", e.what());
    return kAnalysis;
  }
}
