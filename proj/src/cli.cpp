#include "qwalk/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "qwalk/evolve.hpp"
#include "qwalk/localization.hpp"
#include "qwalk/momentum.hpp"
#include "qwalk/serialize.hpp"

namespace qwalk::cli {

namespace {

std::string format_complex(Complex z) {
  char buf[96];
  if (std::abs(z.imag()) < 1e-12) {
    std::snprintf(buf, sizeof buf, "%.6g", z.real() == 0.0 ? 0.0 : z.real());
  } else if (std::abs(z.real()) < 1e-12) {
    std::snprintf(buf, sizeof buf, "%.6gi", z.imag());
  } else {
    std::snprintf(buf, sizeof buf, "%.6g%+.6gi", z.real(), z.imag());
  }
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  return parts;
}

int parse_int(const std::string& text, const std::string& field) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument(field + ": expected an integer, got \"" + text + "\"");
  }
}

Json parameters_json(const RunConfig& c) {
  return Json{{"steps", c.steps}, {"grid", c.grid},     {"tol", c.tol},
              {"rank_tol", c.rank_tol}, {"radius", c.radius}, {"seed", c.seed}};
}

Position tracked_site(const RunConfig& config, Dimension d) {
  if (!config.site) return Position::origin(d);
  if (static_cast<int>(config.site->size()) != d.value()) {
    throw InvalidArgument("site: expected " + std::to_string(d.value()) + " coordinates");
  }
  return Position(*config.site);
}

LatticeState random_state(Dimension d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coord(-3, 3);
  std::uniform_int_distribution<int> count(1, 20);
  std::normal_distribution<double> gauss(0.0, 1.0);
  LatticeState psi(d);
  const int sites = count(rng);
  for (int s = 0; s < sites; ++s) {
    std::vector<int> x(static_cast<std::size_t>(d.value()));
    for (auto& c : x) c = coord(rng);
    Spinor v(d.internal_size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(gauss(rng), gauss(rng));
    psi.set(Position(std::move(x)), std::move(v));
  }
  psi *= Complex(1.0 / state_norm(psi), 0.0);
  return psi;
}

LatticeState initial_state(const RunConfig& config, Dimension d, std::string& label) {
  if (config.init == "delta") {
    label = "delta at origin, uniform spin (default initial state)";
    return delta_state(d, Position::origin(d), Spinor::Ones(d.internal_size()));
  }
  if (config.init == "random") {
    label = "random (seed " + std::to_string(config.seed) + ")";
    return random_state(d, config.seed);
  }
  if (config.init == "grover-stationary") {
    if (d.value() != 2) throw InvalidArgument("init: grover-stationary requires d=2");
    label = "grover-stationary";
    return grover_stationary_state();
  }
  label = config.init;
  LatticeState psi = load_state(read_text_file(config.init));
  if (!(psi.dimension() == d)) throw InvalidArgument("init: state dimension does not match the coin");
  return psi;
}

struct Outcome {
  std::string artifact;
  std::string summary;
  std::vector<std::pair<std::filesystem::path, std::string>> extra_files;
};

Outcome run_simulate(const RunConfig& config, const CoinMatrix& coin) {
  if (config.steps < 1) throw InvalidArgument("steps: must be >= 1");
  const Dimension d = coin.dimension();
  std::string label;
  const LatticeState psi0 = initial_state(config, d, label);
  const Position x0 = tracked_site(config, d);
  const auto records = return_probability_series(psi0, coin, x0, config.steps);
  const auto& last = records.back();
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "simulated %d steps, init=%s, site=%s: final norm %.12g, time-averaged return "
                "probability %.6g",
                config.steps, label.c_str(), x0.to_string().c_str(), last.norm,
                last.avg_return_probability);
  return {series_to_csv(records), buf, {}};
}

Outcome run_scan(const RunConfig& config, const CoinMatrix& coin) {
  const ConstancyReport report = constant_eigenvalue_scan(coin, config.grid, config.tol);
  Json doc = scan_report_to_json(report, config.coin);
  doc["parameters"] = parameters_json(config);
  std::string summary;
  if (report.constant_eigenvalues.empty()) {
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& c : report.candidates) smallest = std::min(smallest, c.max_deviation);
    char buf[160];
    std::snprintf(buf, sizeof buf, "no constant eigenvalue on %d^%d grid (min max_deviation %.6g)",
                  report.grid, report.d, smallest);
    summary = buf;
  } else {
    summary = "constant eigenvalue(s):";
    for (const auto& c : report.constant_eigenvalues) summary += " " + format_complex(c.lambda);
  }
  return {doc.dump(2) + "\n", summary, {}};
}

Outcome run_rank_test(const RunConfig& config, const CoinMatrix& coin) {
  const NecessaryConditionReport report = necessary_condition_test(coin, config.rank_tol);
  const bool ruled_out = report.rules_out_localization();
  Json doc{{"coin", config.coin},
           {"d", report.d},
           {"conclusion", ruled_out ? "no_localization" : "inconclusive"},
           {"witness", ruled_out ? Json{{"ell", report.full_rank_witness->bits()}} : Json(nullptr)},
           {"rank_table", rank_table_to_json(report)},
           {"parameters", parameters_json(config)}};
  std::string summary = ruled_out ? "no_localization (witness ell=" +
                                        report.full_rank_witness->to_string() + ")"
                                  : "inconclusive (every submatrix rank < d)";
  return {doc.dump(2) + "\n", summary, {}};
}

Outcome run_certificate(const RunConfig& config, const CoinMatrix& coin) {
  if (!is_fourier_coin(coin)) {
    throw InvalidArgument("coin: certificate requires a Fourier coin (fourier:<d>)");
  }
  const FourierCertificate cert = fourier_certificate(coin.dimension());
  Json doc = certificate_to_json(cert);
  doc["coin"] = config.coin;
  char buf[200];
  std::snprintf(buf, sizeof buf, "certificate d=%d ell=%s rank=%d |det|=%.12g (closed form %.12g)",
                cert.d, cert.selector.to_string().c_str(), cert.rank, cert.det_magnitude,
                cert.expected_det_magnitude);
  return {doc.dump(2) + "\n", buf, {}};
}

Outcome run_search(const RunConfig& config, const CoinMatrix& coin) {
  std::vector<Complex> lambdas;
  if (config.lambda) {
    lambdas.push_back(*config.lambda);
  } else {
    for (Complex z : spectrum(coin, MomentumPoint::zero(coin.dimension()))) {
      bool seen = false;
      for (Complex w : lambdas) seen = seen || std::abs(w - z) < kCandidateDedupTol;
      if (!seen) lambdas.push_back(z / std::abs(z));
    }
  }
  Json results = Json::array();
  int found = 0;
  for (Complex lambda : lambdas) {
    const auto r = finite_support_eigenvector_search(coin, lambda, config.radius);
    Json basis = Json::array();
    for (const auto& psi : r.basis) basis.push_back(state_to_json(psi));
    results.push_back(Json{{"lambda", complex_to_json(r.lambda)},
                           {"radius", r.radius},
                           {"nullspace_dimension", r.nullspace_dimension},
                           {"residuals", r.residuals},
                           {"basis", std::move(basis)}});
    found += r.nullspace_dimension;
  }
  Json doc{{"coin", config.coin},
           {"d", coin.dimension().value()},
           {"results", std::move(results)},
           {"parameters", parameters_json(config)}};
  std::string summary = "radius " + std::to_string(config.radius) + ": " + std::to_string(found) +
                        " finite-support eigenvector(s) over " + std::to_string(lambdas.size()) +
                        " lambda value(s)";
  return {doc.dump(2) + "\n", summary, {}};
}

Outcome run_decide(const RunConfig& config, const CoinMatrix& coin) {
  const LocalizationVerdict verdict =
      decide(coin, ScanParameters{config.grid, config.tol}, config.radius);
  Outcome outcome;
  std::string state_file;
  if (const auto* ev = std::get_if<EigenvectorWitness>(&verdict.witness); ev && !config.out.empty()) {
    std::filesystem::path p(config.out);
    p.replace_extension(".witness.json");
    state_file = p.filename().string();
    outcome.extra_files.emplace_back(p, state_to_json(ev->state).dump(2) + "\n");
  }
  Json doc = verdict_to_json(verdict, config.coin, state_file);
  doc["parameters"] = parameters_json(config);
  outcome.artifact = doc.dump(2) + "\n";

  outcome.summary = to_string(verdict.status);
  if (const auto* sel = std::get_if<SubmatrixSelector>(&verdict.witness)) {
    outcome.summary += " (witness ell=" + sel->to_string() + ")";
  } else if (const auto* ev = std::get_if<EigenvectorWitness>(&verdict.witness)) {
    outcome.summary += " (lambda=" + format_complex(ev->lambda) + ")";
  } else {
    outcome.summary += " (no full-rank submatrix and no finite-support eigenvector up to radius " +
                       std::to_string(config.radius) + ")";
  }
  return outcome;
}

void emit_summary(const RunConfig& config, std::ostream& os, int status, const std::string& text) {
  if (config.json) {
    os << Json{{"command", config.command}, {"exit_status", status}, {"summary", text},
               {"artifact", config.out.empty() ? Json(nullptr) : Json(config.out)}}
              .dump()
       << "\n";
  } else {
    os << text << "\n";
  }
}

}  // namespace

CoinMatrix resolve_coin(const std::string& source) {
  if (source == "grover2d") return grover_coin_2d();
  if (source == "hadamard") return hadamard_coin();
  if (source.rfind("fourier:", 0) == 0) {
    const int d = parse_int(source.substr(8), "coin");
    if (d < 1 || d > 64) throw InvalidArgument("coin: fourier dimension must be in [1, 64]");
    return fourier_coin(Dimension(d));
  }
  if (!std::filesystem::is_regular_file(source)) {
    throw InvalidArgument("coin: \"" + source + "\" is neither a builtin coin nor a readable file");
  }
  return load_coin(read_text_file(source));
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::ostream& summary_stream = config.out.empty() ? err : out;
  try {
    const CoinMatrix coin = resolve_coin(config.coin);
    Outcome outcome;
    if (config.command == "simulate") {
      outcome = run_simulate(config, coin);
    } else if (config.command == "scan") {
      outcome = run_scan(config, coin);
    } else if (config.command == "rank-test") {
      outcome = run_rank_test(config, coin);
    } else if (config.command == "certificate") {
      outcome = run_certificate(config, coin);
    } else if (config.command == "search") {
      outcome = run_search(config, coin);
    } else if (config.command == "decide") {
      outcome = run_decide(config, coin);
    } else {
      throw InvalidArgument("command: unknown command \"" + config.command + "\"");
    }
    for (const auto& [path, text] : outcome.extra_files) write_file_atomic(path, text);
    if (config.out.empty()) {
      out << outcome.artifact;
    } else {
      write_file_atomic(config.out, outcome.artifact);
    }
    emit_summary(config, summary_stream, kOk, outcome.summary);
    return kOk;
  } catch (const ResourceError& e) {
    emit_summary(config, err, kResource, std::string("error: ") + e.what());
    return kResource;
  } catch (const ConsistencyError& e) {
    emit_summary(config, err, kConsistency, std::string("internal consistency error: ") + e.what());
    return kConsistency;
  } catch (const NumericalError& e) {
    emit_summary(config, err, kConsistency, std::string("numerical error: ") + e.what());
    return kConsistency;
  } catch (const Error& e) {
    emit_summary(config, err, kValidation, std::string("error: ") + e.what());
    return kValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    emit_summary(config, err, kValidation, std::string("error: ") + e.what());
    return kValidation;
  }
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coined quantum walks on Z^d: simulation, spectral scans and localization tests"};
  app.require_subcommand(1, 1);

  RunConfig config;
  std::string site_text;
  std::string lambda_text;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--coin", config.coin, "fourier:<d> | grover2d | hadamard | coin file path")
        ->capture_default_str();
    sub->add_option("--out", config.out, "artifact path (stdout when omitted)");
    sub->add_option("--seed", config.seed, "seed for randomized states")->capture_default_str();
    sub->add_flag("--json", config.json, "machine-readable summary");
  };

  auto* simulate = app.add_subcommand("simulate", "evolve a state and record return probabilities (CSV)");
  add_common(simulate);
  simulate->add_option("--steps", config.steps, "number of steps")->capture_default_str();
  simulate->add_option("--site", site_text, "tracked site x,y,... (default origin)");
  simulate->add_option("--init", config.init, "delta | random | grover-stationary | state file")
      ->capture_default_str();

  auto* scan = app.add_subcommand("scan", "scan the momentum grid for constant eigenvalues");
  add_common(scan);
  scan->add_option("--grid", config.grid, "grid points per axis")->capture_default_str();
  scan->add_option("--tol", config.tol, "constancy tolerance")->capture_default_str();

  auto* rank = app.add_subcommand("rank-test", "rank of every coin submatrix C^(ell)");
  add_common(rank);
  rank->add_option("--rank-tol", config.rank_tol, "relative singular value cutoff")->capture_default_str();

  auto* cert = app.add_subcommand("certificate", "full-rank certificate for a Fourier coin");
  add_common(cert);

  auto* search = app.add_subcommand("search", "finite-support eigenvectors on a truncated box");
  add_common(search);
  search->add_option("--radius", config.radius, "box radius")->capture_default_str();
  search->add_option("--lambda", lambda_text, "eigenvalue re,im (default: every eigenvalue at k=0)");

  auto* decide_cmd = app.add_subcommand("decide", "combined localization verdict");
  add_common(decide_cmd);
  decide_cmd->add_option("--grid", config.grid, "grid points per axis")->capture_default_str();
  decide_cmd->add_option("--tol", config.tol, "constancy tolerance")->capture_default_str();
  decide_cmd->add_option("--radius", config.radius, "largest search radius")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }

  config.command = app.get_subcommands().front()->get_name();
  try {
    if (!site_text.empty()) {
      std::vector<int> coords;
      for (const auto& part : split(site_text, ',')) coords.push_back(parse_int(part, "site"));
      config.site = std::move(coords);
    }
    if (!lambda_text.empty()) {
      const auto parts = split(lambda_text, ',');
      if (parts.size() != 2) throw InvalidArgument("lambda: expected re,im");
      config.lambda = Complex(std::stod(parts[0]), std::stod(parts[1]));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  return run(config, out, err);
}

}  // namespace qwalk::cli
