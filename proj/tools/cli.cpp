#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "swstab/bellman.hpp"
#include "swstab/certify.hpp"
#include "swstab/controllers.hpp"
#include "swstab/errors.hpp"
#include "swstab/simulate.hpp"
#include "swstab/system.hpp"
#include "swstab/trajectory.hpp"

namespace swstab::cli {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes through a sibling temporary and renames it over the target, so a
// reader never sees a half-written file.
void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) throw Error("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot rename into '" + path + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ParseError(what + ": '" + text + "' is not a finite number");
  }
  return v;
}

std::size_t parse_index(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError(what + ": '" + text + "' is not a mode index");
  }
  return v;
}

Eigen::VectorXd parse_x0(const std::string& text, Eigen::Index n) {
  const auto parts = split(text, ',');
  if (static_cast<Eigen::Index>(parts.size()) != n) {
    throw ValidationError("--x0: expected " + std::to_string(n) + " components, got " +
                          std::to_string(parts.size()));
  }
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = parse_real(parts[static_cast<std::size_t>(i)], "--x0");
  return x;
}

std::vector<std::size_t> parse_indices(const std::string& text, std::size_t num_modes, const std::string& what) {
  std::vector<std::size_t> out;
  for (const auto& p : split(text, ',')) {
    const std::size_t i = parse_index(p, what);
    if (i >= num_modes) throw ValidationError(what + ": mode " + std::to_string(i) + " out of range");
    out.push_back(i);
  }
  return out;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? format_double(*v) : "none"; }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int status_exit_code(SynthesisStatus s) {
  switch (s) {
    case SynthesisStatus::Converged: return kExitOk;
    case SynthesisStatus::Diverged: return kExitDiverged;
    case SynthesisStatus::MaxItersReached: return kExitMaxIters;
  }
  return kExitError;
}

struct SynthesisFlags {
  std::string system;
  std::string out;
  bool mode_independent = false;
  bool mode_dependent = false;
  SynthesisConfig config;
};

void add_synthesis_flags(CLI::App* cmd, SynthesisFlags& f) {
  cmd->add_option("--directions", f.config.directions, "Grid directions (even, >= 2n)");
  cmd->add_option("--tol", f.config.tol, "Relative convergence tolerance");
  cmd->add_option("--max-iters", f.config.max_iters, "Iteration cap");
  cmd->add_option("--vmax", f.config.v_max, "Divergence threshold");
}

int cmd_synthesize(const SynthesisFlags& f, std::ostream& out) {
  const SwitchedSystem sys = load_system_file(f.system);
  SynthesisConfig cfg = f.config;
  cfg.mode_dependent = f.mode_dependent;
  const Certificate cert = value_iteration(sys, cfg);
  if (!f.out.empty()) write_file_atomic(f.out, certificate_to_json(cert));
  out << "status=" << to_string(cert.status) << " iters=" << cert.iterations << " rho=" << fmt_opt(cert.rho)
      << " c2=" << fmt_opt(cert.c2) << "\n";
  return status_exit_code(cert.status);
}

int cmd_compare(const SynthesisFlags& f, std::ostream& out) {
  const SwitchedSystem sys = load_system_file(f.system);
  json report;
  bool any = false;
  for (const bool dependent : {false, true}) {
    SynthesisConfig cfg = f.config;
    cfg.mode_dependent = dependent;
    const Certificate cert = value_iteration(sys, cfg);
    any = any || cert.converged();
    report[dependent ? "dfs" : "ifs"] = {{"status", to_string(cert.status)},
                                         {"iterations", cert.iterations},
                                         {"rho", opt_json(cert.rho)},
                                         {"c2", opt_json(cert.c2)}};
  }
  report["system_hash"] = system_hash(sys);
  const std::string text = report.dump(2) + "\n";
  if (f.out.empty()) {
    out << text;
  } else {
    write_file_atomic(f.out, text);
    for (const char* key : {"ifs", "dfs"}) {
      const auto& r = report[key];
      out << key << ": status=" << r["status"].get<std::string>() << " iters=" << r["iterations"].get<int>()
          << " rho=" << (r["rho"].is_null() ? std::string("none") : format_double(r["rho"].get<double>())) << "\n";
    }
  }
  return any ? kExitOk : kExitDiverged;
}

struct CertifyFlags {
  std::string system;
  std::string cert;
  std::string out;
  int grid = 0;
  std::uint64_t seed = 0;
};

int cmd_certify(const CertifyFlags& f, std::ostream& out) {
  const SwitchedSystem sys = load_system_file(f.system);
  const std::string cert_text = read_file(f.cert);
  const Certificate cert = certificate_from_json(cert_text);
  CertifyOptions opts;
  opts.test_directions = f.grid;
  opts.seed = f.seed;
  const CertReport rep = certify(cert, sys, opts);
  const std::string text = cert_report_to_json(rep, system_hash(sys), content_hash(cert_text));
  if (!f.out.empty()) write_file_atomic(f.out, text);
  out << "pass=" << (rep.pass() ? "true" : "false") << " residual=" << format_double(rep.bellman_residual_max)
      << " rho=" << format_double(rep.rho_recomputed);
  if (rep.sector_certificate) out << " sector=" << format_double(rep.sector_certificate->worst_sector_ratio);
  if (rep.sampled) out << " sampled=true";
  out << "\n";
  return rep.pass() ? kExitOk : kExitDiverged;
}

struct SimulateFlags {
  std::string system;
  std::string cert;
  std::string x0;
  std::size_t steps = 50;
  std::string signal = "random";
  std::uint64_t seed = 0;
  double disturbance = 0.0;
  std::string csv;
};

SwitchingSignal make_signal(const std::string& spec, std::uint64_t seed, const std::shared_ptr<const Certificate>& cert,
                            const std::shared_ptr<const SwitchedSystem>& sys, ControllerKind kind) {
  if (spec == "random") return SwitchingSignal::random(seed);
  if (spec == "adversarial") return adversarial_signal(cert, sys, kind);
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string head = spec.substr(0, colon);
    const std::string body = spec.substr(colon + 1);
    if (head == "periodic") return SwitchingSignal::periodic(parse_indices(body, sys->num_modes(), "--signal"));
    if (head == "explicit") return SwitchingSignal::explicit_modes(parse_indices(body, sys->num_modes(), "--signal"));
  }
  throw ParseError("--signal: expected random, adversarial, periodic:<i,...> or explicit:<i,...>, got '" + spec + "'");
}

int cmd_simulate(const SimulateFlags& f, std::ostream& out, std::ostream& err) {
  auto sys = std::make_shared<const SwitchedSystem>(load_system_file(f.system));
  auto cert = std::make_shared<const Certificate>(load_certificate_file(f.cert));
  if (cert->system_hash != system_hash(*sys)) {
    throw ValidationError("certificate was issued for a different system (hash mismatch)");
  }
  if (!cert->converged()) throw ValidationError("certificate is not converged");

  SimulationSpec spec;
  spec.x0 = parse_x0(f.x0, sys->n());
  spec.horizon = f.steps;
  spec.disturbance_bound = f.disturbance;
  spec.disturbance_seed = f.seed;
  const ControllerKind kind =
      cert->mode_dependent ? ControllerKind::CurrentModeDependent : ControllerKind::CurrentModeIndependent;
  spec.signal = make_signal(f.signal, f.seed, cert, sys, kind);

  MemoryControllerPtr ctrl = cert->mode_dependent ? lift_memoryless(ModeDependentController(cert, sys))
                                                  : lift_memoryless(MemorylessController(cert, sys));
  const Trajectory traj = simulate(*sys, *ctrl, spec, &cert->norm);
  const UesEstimate est = estimate_ues(std::span<const Trajectory>(&traj, 1), *cert);

  const std::string summary =
      "gamma_hat=" + format_double(est.gamma_hat) + " violations=" + std::to_string(est.bound_violations) + "\n";
  if (f.csv.empty()) {
    out << trajectory_csv(traj);
    err << summary;
  } else {
    write_file_atomic(f.csv, trajectory_csv(traj));
    out << summary;
  }
  return kExitOk;
}

struct BallFlags {
  std::string cert;
  std::string out;
};

int cmd_ball(const BallFlags& f, std::ostream& out) {
  const Certificate cert = load_certificate_file(f.cert);
  if (cert.norm.dim() != 2) throw ValidationError("ball: certificate dimension is not 2");
  const auto poly = polygon_2d(cert.norm);
  std::string text = "x,y\n";
  for (std::size_t j = 0; j <= poly.size(); ++j) {
    const auto& q = poly[j % poly.size()];
    text += format_double(q.x()) + "," + format_double(q.y()) + "\n";
  }
  if (f.out.empty()) {
    out << text;
  } else {
    write_file_atomic(f.out, text);
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Polyhedral Lyapunov synthesis and certification for switched linear systems", "swstab"};
  app.require_subcommand(1);

  SynthesisFlags syn;
  auto* synthesize = app.add_subcommand("synthesize", "Run value iteration and write a certificate");
  synthesize->add_option("--system", syn.system, "System JSON file")->required();
  synthesize->add_option("--out", syn.out, "Certificate output file");
  auto* indep = synthesize->add_flag("--mode-independent", syn.mode_independent, "Feedback without the current mode");
  auto* dep = synthesize->add_flag("--mode-dependent", syn.mode_dependent, "Feedback with the current mode");
  indep->excludes(dep);
  add_synthesis_flags(synthesize, syn);

  SynthesisFlags cmp;
  auto* compare = app.add_subcommand("compare", "Run both syntheses and report the gap");
  compare->add_option("--system", cmp.system, "System JSON file")->required();
  compare->add_option("--out", cmp.out, "Comparison report file");
  add_synthesis_flags(compare, cmp);

  CertifyFlags cf;
  auto* certify_cmd = app.add_subcommand("certify", "Re-validate a certificate against its system");
  certify_cmd->add_option("--system", cf.system, "System JSON file")->required();
  certify_cmd->add_option("--cert", cf.cert, "Certificate JSON file")->required();
  certify_cmd->add_option("--out", cf.out, "Report output file");
  certify_cmd->add_option("--grid", cf.grid, "Residual test directions (default: twice the synthesis grid)");
  certify_cmd->add_option("--seed", cf.seed, "Seed for the sampled norm checks");

  SimulateFlags sf;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate the closed loop and write a trajectory CSV");
  simulate_cmd->add_option("--system", sf.system, "System JSON file")->required();
  simulate_cmd->add_option("--cert", sf.cert, "Certificate JSON file")->required();
  simulate_cmd->add_option("--x0", sf.x0, "Initial state, comma separated")->required();
  simulate_cmd->add_option("--steps", sf.steps, "Horizon K");
  simulate_cmd->add_option("--signal", sf.signal, "random | adversarial | periodic:<i,...> | explicit:<i,...>");
  simulate_cmd->add_option("--seed", sf.seed, "Seed for random switching and disturbances");
  simulate_cmd->add_option("--disturbance", sf.disturbance, "Radius of the disturbance ball");
  simulate_cmd->add_option("--csv", sf.csv, "Trajectory CSV output file (default: standard output)");

  BallFlags bf;
  auto* ball = app.add_subcommand("ball", "Write the planar unit ball of a certificate as CSV");
  ball->add_option("--cert", bf.cert, "Certificate JSON file")->required();
  ball->add_option("--out", bf.out, "CSV output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (synthesize->parsed()) return cmd_synthesize(syn, out);
    if (compare->parsed()) return cmd_compare(cmp, out);
    if (certify_cmd->parsed()) return cmd_certify(cf, out);
    if (simulate_cmd->parsed()) return cmd_simulate(sf, out, err);
    if (ball->parsed()) return cmd_ball(bf, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace swstab::cli
