#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "switchcell/switchcell.hpp"

namespace sc = switchcell;

namespace {

enum Exit { kOk = 0, kInternal = 1, kValidation = 2, kContradiction = 3, kNotConverged = 4 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sc::Error(sc::ErrorKind::Io, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Inputs {
  sc::RegulatoryNetwork net;
  sc::SwitchingParameter z;
  std::string param_text;
};

Inputs load(const std::string& net_path, const std::string& param_path) {
  Inputs in;
  try {
    in.net = sc::parse_network(read_file(net_path));
  } catch (const sc::Error& e) {
    throw sc::Error(e.kind(), net_path + ": " + e.what());
  }
  in.param_text = read_file(param_path);
  try {
    in.z = sc::parse_parameter(in.net, in.param_text);
  } catch (const sc::Error& e) {
    throw sc::Error(e.kind(), param_path + ": " + e.what());
  }
  return in;
}

std::vector<double> parse_schedule(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw sc::Error(sc::ErrorKind::MalformedParameter, "bad epsilon '" + item + "' in schedule");
    }
  }
  if (out.empty()) throw sc::Error(sc::ErrorKind::MalformedParameter, "empty epsilon schedule");
  return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

void emit(const sc::ordered_json& report, const std::string& text, const std::string& format,
          const std::string& report_path) {
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw sc::Error(sc::ErrorKind::Io, "cannot write " + report_path);
    out << report.dump(2) << "\n";
  }
  if (format == "json") std::cout << report.dump(2) << "\n";
  else std::cout << text;
}

int cmd_validate(const Inputs& in, const std::string& format, const std::string& report_path) {
  auto start = std::chrono::steady_clock::now();
  auto regularity = sc::check_regular(in.net, in.z);
  auto j = sc::header_json("validate", in.net, in.param_text);
  j["regularity"] = sc::to_json(regularity);
  std::string text;
  if (regularity.regular()) {
    text = "regular\n";
    try {
      sc::CellComplex cx(in.net, in.z);
      j["cells"] = cx.cell_count();
      text += std::to_string(cx.cell_count()) + " cells\n";
    } catch (const sc::Error& e) {
      text += std::string(e.what()) + "\n";
    }
  } else {
    text = "not regular\n";
    for (const auto& v : regularity.violations) text += "  " + v.condition + ": " + v.message + "\n";
  }
  j["timing_ms"] = elapsed_ms(start);
  emit(j, text, format, report_path);
  return regularity.regular() ? kOk : kValidation;
}

int cmd_equilibria(const Inputs& in, bool stability, bool verify, const std::string& format,
                   const std::string& report_path) {
  auto start = std::chrono::steady_clock::now();
  sc::SwitchingSystem sys(in.net, in.z);
  auto records = sc::equilibrium_cells(sys, verify);
  auto j = sc::header_json("equilibria", in.net, in.param_text);
  j["regularity"] = sc::to_json(sc::check_regular(in.net, in.z));
  j["cells"] = sys.complex().cell_count();
  j["verified_bruteforce"] = verify;
  sc::ordered_json list = sc::ordered_json::array();
  std::ostringstream text;
  text << sys.complex().cell_count() << " cells, " << records.size() << " equilibrium cells\n";
  for (const auto& rec : records) {
    std::optional<sc::CellStability> st;
    if (stability) {
      st = sc::cell_stability(sys, rec);
      for (const auto& root : rec.roots) {
        auto other = sc::cell_stability(sys, rec, root.root);
        if (other.overall.value != st->overall.value)
          throw sc::Error(sc::ErrorKind::Contradiction, "verdict of " + sys.complex().notation(rec.cell) +
                                                            " depends on the root");
      }
    }
    list.push_back(sc::to_json(sys, rec, st));
    text << "  " << sys.complex().notation(rec.cell) << "  " << sc::to_string(rec.kind);
    if (st) text << "  " << sc::to_string(st->overall.value) << " (" << st->overall.rule << ")";
    text << "\n";
  }
  j["equilibria"] = list;
  j["timing_ms"] = elapsed_ms(start);
  emit(j, text.str(), format, report_path);
  return kOk;
}

int cmd_oracle(const Inputs& in, const sc::OracleOptions& opt, bool hopf, double asymptotic_eps,
               const std::string& format, const std::string& report_path) {
  auto start = std::chrono::steady_clock::now();
  sc::SwitchingSystem sys(in.net, in.z);
  auto records = sc::equilibrium_cells(sys);
  auto sweep = sc::epsilon_sweep(sys, records, opt);
  auto j = sc::header_json("oracle", in.net, in.param_text);
  j["equilibrium_cells"] = records.size();
  j["sweep"] = sc::to_json(sys, sweep, records);
  std::ostringstream text;
  text << records.size() << " equilibrium cells, hill order " << sc::to_string(opt.law) << "\n";
  for (const auto& step : sweep.steps)
    text << "  eps=" << step.eps << ": " << step.roots.size() << " roots" << (step.bijective ? "" : " (count mismatch)")
         << "\n";
  for (const auto& t : sweep.tracks) {
    text << "  " << sys.complex().notation(t.cell) << "  " << sc::to_string(t.stability.overall.value)
         << "  final distance " << t.distance.back() << (t.converged ? "" : "  NOT CONVERGED") << "\n";
  }
  if (hopf) {
    auto scan = sc::hopf_scan(sys, opt.law);
    j["hopf_scan"] = sc::to_json(scan);
    text << "  hopf scan: bound " << scan.bound;
    if (scan.found) text << ", crossing at eps=" << scan.eps << " with gain " << scan.gain;
    text << "\n";
  }
  for (const auto& f : sweep.failures) text << "  " << f << "\n";
  int code = kOk;
  if (!sweep.passed()) code = opt.schedule.back() > asymptotic_eps ? kNotConverged : kContradiction;
  text << (code == kOk ? "PASS" : code == kNotConverged ? "NOT YET CONVERGED" : "CONTRADICTION") << "\n";
  j["exit_status"] = code;
  j["timing_ms"] = elapsed_ms(start);
  emit(j, text.str(), format, report_path);
  return code;
}

int cmd_dot(const Inputs& in) {
  if (in.net.size() != 2) throw sc::Error(sc::ErrorKind::UnsupportedDimension, "dot output needs exactly two nodes");
  sc::SwitchingSystem sys(in.net, in.z);
  std::cout << sc::dot_graph(sys);
  return kOk;
}

int exit_code(sc::ErrorKind kind) {
  switch (kind) {
    case sc::ErrorKind::Contradiction:
      return kContradiction;
    case sc::ErrorKind::NewtonDiverged:
    case sc::ErrorKind::ConvergenceFailure:
    case sc::ErrorKind::Io:
      return kInternal;
    default:
      return kValidation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibria and stability of switching network models"};
  app.require_subcommand(1);
  std::string net_path, param_path, format = "text", report_path;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("net", net_path, "network file")->required();
    cmd->add_option("params", param_path, "parameter file")->required();
    cmd->add_option("--format", format, "output format")->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--report", report_path, "also write the JSON report to this file");
  };

  auto* validate = app.add_subcommand("validate", "check regularity of the parameter");
  add_common(validate);

  bool stability = false, verify = false;
  auto* equilibria = app.add_subcommand("equilibria", "list equilibrium cells");
  add_common(equilibria);
  equilibria->add_flag("--stability", stability, "add stability verdicts");
  equilibria->add_flag("--verify-bruteforce", verify, "cross-check candidate cells by scanning each cycle subsystem");

  std::string schedule = "0.2,0.1,0.05,0.02,0.01,0.005";
  std::string law = "inverse-square";
  int seeds_per_cell = 1;
  bool hopf = false, no_grid = false;
  double asymptotic_eps = 0.01;
  auto* oracle = app.add_subcommand("oracle", "check predictions against Hill-function systems");
  add_common(oracle);
  oracle->add_option("--eps-schedule", schedule, "comma-separated decreasing epsilons");
  oracle->add_option("--seeds-per-cell", seeds_per_cell, "Newton seeds per equilibrium cell")->check(CLI::PositiveNumber);
  oracle->add_option("--hill-order", law, "inverse (n=1/eps) or inverse-square (n=1/eps^2)")
      ->check(CLI::IsMember({"inverse", "inverse-square"}));
  oracle->add_option("--asymptotic-eps", asymptotic_eps,
                     "failures with a final epsilon above this are reported as not yet converged");
  oracle->add_flag("--hopf-scan", hopf, "scan epsilon for the Hopf crossing of a negative cycle");
  oracle->add_flag("--no-grid", no_grid, "seed only from the predicted cells");

  auto* dot = app.add_subcommand("dot", "draw the planar complex with flow arrows");
  add_common(dot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    Inputs in;
    try {
      in = load(net_path, param_path);
    } catch (const sc::Error& e) {
      // An unreadable input file is the caller's problem, like any other bad input.
      if (e.kind() != sc::ErrorKind::Io) throw;
      std::cerr << "error: " << e.what() << "\n";
      return kValidation;
    }
    if (*validate) return cmd_validate(in, format, report_path);
    if (*equilibria) return cmd_equilibria(in, stability, verify, format, report_path);
    if (*oracle) {
      sc::OracleOptions opt;
      opt.schedule = parse_schedule(schedule);
      opt.seeds_per_cell = seeds_per_cell;
      opt.law = law == "inverse" ? sc::HillOrder::InverseEpsilon : sc::HillOrder::InverseEpsilonSquared;
      opt.grid_seeds = !no_grid;
      return cmd_oracle(in, opt, hopf, asymptotic_eps, format, report_path);
    }
    if (*dot) return cmd_dot(in);
  } catch (const sc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
