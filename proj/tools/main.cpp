#include <CLI11.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "latlab/harness.hpp"

namespace {

using latlab::json;

struct GlobalFlags {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  unsigned long long seed = 0;
  bool seed_set = false;
  int threads = 0;
  int grid = 0;
  int refine = -1;
};

json load_raw(const GlobalFlags& g) {
  if (g.config_path.empty()) return json::object();
  std::ifstream in(g.config_path);
  if (!in) throw std::runtime_error("cannot open config file: " + g.config_path);
  json j;
  in >> j;
  return j;
}

latlab::ExperimentConfig make_config(const GlobalFlags& g) {
  json raw = load_raw(g);
  if (g.seed_set) raw["seed"] = g.seed;
  if (g.threads > 0) raw["threads"] = g.threads;
  if (g.grid > 0) raw["grid"] = g.grid;
  if (g.refine >= 0) raw["refine"] = g.refine;
  return latlab::parse_config(raw);
}

void emit(const GlobalFlags& g, const std::string& text) {
  if (g.out_path.empty())
    std::cout << text;
  else
    latlab::write_text_file(g.out_path, text);
}

std::vector<double> parse_number_list(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  return vals;
}

int run_stability(const GlobalFlags& g, const std::string& potential_name,
                  const std::string& deformation) {
  json raw = load_raw(g);
  std::unique_ptr<latlab::SitePotential> w;
  if (potential_name == "lennard_jones" || potential_name == "lj") {
    w = std::make_unique<latlab::PairSumPotential>(
        latlab::InteractionStencil::triangular(), latlab::PairPotential::lennard_jones());
  } else if (potential_name == "ft_mass_spring") {
    const json p = raw.value("potential", json::object());
    w = latlab::make_ft_mass_spring(p.value("k1", 1.0), p.value("k2", 1.0),
                                    p.value("a1", 1.0), p.value("a2", std::sqrt(2.0)));
  } else if (potential_name.empty()) {
    w = latlab::build_potential(raw.at("potential"));
  } else {
    throw std::invalid_argument("unknown potential name: " + potential_name);
  }

  const int d = w->dim();
  double a0[9] = {0.0};
  const std::vector<double> vals =
      deformation.empty() ? std::vector<double>{1.0} : parse_number_list(deformation);
  if (static_cast<int>(vals.size()) == d * d) {
    std::memcpy(a0, vals.data(), sizeof(double) * d * d);
  } else if (vals.size() == 1) {
    const double t = vals[0];
    if (w->stencil().size() == 6 && d == 2) {
      // scalar deformation of the triangular reference basis
      a0[0] = t;
      a0[1] = 0.5 * t;
      a0[3] = 0.8660254037844386 * t;
    } else {
      for (int i = 0; i < d; ++i) a0[i * d + i] = t;
    }
  } else {
    throw std::invalid_argument("--deformation expects a scalar or d*d values");
  }

  const latlab::LinearizationTensor K = latlab::linearize(*w, a0);
  const latlab::StabilityReport rep =
      latlab::lambda_atom(K, w->stencil(), g.grid > 0 ? g.grid : 64,
                          g.refine >= 0 ? g.refine : 3);
  const char* cls = rep.classification == latlab::StabilityClass::stable ? "stable"
                    : rep.classification == latlab::StabilityClass::unstable ? "unstable"
                                                                             : "marginal";
  if (g.format == "csv") {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "lambda_atom,lambda_LH_tilde,classification\n%.17g,%.17g,%s\n",
                  rep.lambda_atom_estimate, rep.lambda_LH_tilde, cls);
    emit(g, buf);
  } else {
    json out = {{"schema_version", 1},
                {"experiment", "stability"},
                {"lambda_atom", rep.lambda_atom_estimate},
                {"lambda_LH", rep.lambda_LH},
                {"lambda_LH_tilde", rep.lambda_LH_tilde},
                {"minimizing_k", {rep.minimizing_k[0], rep.minimizing_k[1], rep.minimizing_k[2]}},
                {"grid_resolution", rep.grid_resolution},
                {"refinement_passes", rep.refinement_passes},
                {"classification", cls}};
    emit(g, out.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"atomistic-continuum lattice elasticity workbench"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config_path, "path to a JSON experiment config");
  app.add_option("--out", g.out_path, "output path (stdout when omitted)");
  app.add_option("--format", g.format, "report format: csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", g.seed, "override the config seed")
      ->each([&](const std::string&) { g.seed_set = true; });
  app.add_option("--threads", g.threads, "worker threads for parallel sweeps");

  auto* converge = app.add_subcommand("converge", "convergence study over epsilon_list");
  auto* stability = app.add_subcommand("stability", "stability constant of one configuration");
  auto* phase = app.add_subcommand("phase-diagram", "stability classification over a parameter sweep");
  auto* residual = app.add_subcommand("residual-order", "consistency-residual decay over epsilon_list");
  auto* solve = app.add_subcommand("solve", "single boundary-value solve with certification");

  std::string potential_name, deformation;
  stability->add_option("--potential", potential_name,
                        "named potential: lennard_jones | ft_mass_spring");
  stability->add_option("--deformation", deformation,
                        "scalar stretch t or d*d row-major matrix entries");
  stability->add_option("--grid", g.grid, "k-grid resolution per axis");
  stability->add_option("--refine", g.refine, "local refinement passes");
  stability->add_option("--report", g.out_path, "report path (alias of --out)");

  std::string method;
  double tol = -1.0;
  int max_iter = 0;
  solve->add_option("--method", method, "fixed_point | newton")
      ->check(CLI::IsMember({"fixed_point", "newton"}));
  solve->add_option("--tol", tol, "residual tolerance");
  solve->add_option("--max-iter", max_iter, "iteration cap");
  solve->add_option("--report", g.out_path, "report path (alias of --out)");

  phase->add_option("--grid", g.grid, "k-grid resolution per axis");
  phase->add_option("--refine", g.refine, "local refinement passes");

  CLI11_PARSE(app, argc, argv);

  try {
    if (stability->parsed()) return run_stability(g, potential_name, deformation);

    if (converge->parsed()) {
      const auto cfg = make_config(g);
      const auto rep = latlab::run_convergence(cfg);
      emit(g, g.format == "csv" ? latlab::to_csv(rep) : latlab::to_json(rep).dump(2) + "\n");
      return 0;
    }
    if (residual->parsed()) {
      const auto cfg = make_config(g);
      const auto rep = latlab::run_residual_order(cfg);
      emit(g, g.format == "csv" ? latlab::to_csv(rep) : latlab::to_json(rep).dump(2) + "\n");
      return 0;
    }
    if (phase->parsed()) {
      const auto cfg = make_config(g);
      const auto rep = latlab::run_phase_diagram(cfg);
      emit(g, g.format == "csv" ? latlab::to_csv(rep) : latlab::to_json(rep).dump(2) + "\n");
      return 0;
    }
    if (solve->parsed()) {
      json raw = load_raw(g);
      if (g.seed_set) raw["seed"] = g.seed;
      if (g.threads > 0) raw["threads"] = g.threads;
      if (!method.empty()) raw["method"] = method;
      if (tol > 0.0) raw["tol"] = tol;
      if (max_iter > 0) raw["max_iter"] = max_iter;
      const auto cfg = latlab::parse_config(raw);
      const json rep = latlab::run_solve_once(cfg);
      emit(g, rep.dump(2) + "\n");
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return std::strncmp(e.what(), "IFT hypothesis violated", 23) == 0 ? 2 : 1;
  }
  return 1;
}
