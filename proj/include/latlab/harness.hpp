#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "latlab/continuum.hpp"
#include "latlab/solver.hpp"
#include "latlab/stability.hpp"

namespace latlab {

using json = nlohmann::json;

// Experiment description; `raw` keeps the config echo for reports.
struct ExperimentConfig {
  json raw;

  std::string experiment;  // converge | stability | phase_diagram | residual_order | solve_once
  int dim = 1;
  std::vector<double> epsilon_list;
  double gamma = 2.0;
  double f_perturbation_scale = 0.0;  // multiples of eps^gamma
  double g_perturbation_scale = 0.0;
  unsigned long long seed = 1;
  int grid_resolution = 64;
  int refinement_passes = 3;
  std::string method = "fixed_point";
  double solve_tol = 1e-10;
  bool override_hypothesis = false;
  double r1 = 1.0, r2 = 1.0;
  int threads = 1;
};

ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);

// Factories driven by the config blocks.
std::shared_ptr<const DomainShape> build_shape(const json& domain_spec);
InteractionStencil build_stencil(const json& cfg_root);
std::unique_ptr<SitePotential> build_potential(const json& potential_spec);
ManufacturedDeformation build_solution(const json& solution_spec, int dim);

struct ConvergenceRow {
  double eps = 0.0;
  double error_h1_vs_sy = 0.0;
  double error_h1_vs_y = 0.0;
  double residual_l2 = 0.0;
  int iterations = 0;
  double certified_min = 0.0;
  std::string error;  // empty on success
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool done = false;
  std::string note;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  RateFit rate_vs_sy;
  RateFit rate_vs_y;
  double k3_measured = 0.0;  // max error / eps^gamma over successful rows
  IFTConstants constants;    // from the finest successful epsilon
  json config_echo;
};

ConvergenceReport run_convergence(const ExperimentConfig& cfg);

struct ResidualOrderRow {
  double eps = 0.0;
  double residual_l2 = 0.0;
  double ratio = 0.0;  // previous / current; 0 on the first row
  std::string error;
};

struct ResidualOrderReport {
  std::vector<ResidualOrderRow> rows;
  json config_echo;
};

ResidualOrderReport run_residual_order(const ExperimentConfig& cfg);

struct PhaseDiagramRow {
  double p1 = 0.0, p2 = 0.0;
  double lambda_atom = 0.0;
  double lambda_LH_tilde = 0.0;
  double closed_form = 0.0;  // NaN when unavailable
  std::string classification;
  Vec minimizing_k{};
};

struct PhaseDiagramReport {
  std::string family;  // triangular | ft_mass_spring
  std::string param1, param2;
  std::vector<PhaseDiagramRow> rows;
  // per grid row: bisected parameter value where the classification flips
  std::vector<double> boundary_estimates;
  json config_echo;
};

PhaseDiagramReport run_phase_diagram(const ExperimentConfig& cfg);

// Single solve at the first epsilon; JSON record embedding the IFT
// constants, the iteration trace, and the certification value.
json run_solve_once(const ExperimentConfig& cfg);

// OLS on (log eps, log error); nonpositive errors are excluded with a note.
RateFit fit_rate(const std::vector<std::pair<double, double>>& rows);

json to_json(const ConvergenceReport& rep);
json to_json(const ResidualOrderReport& rep);
json to_json(const PhaseDiagramReport& rep);
std::string to_csv(const ConvergenceReport& rep);
std::string to_csv(const ResidualOrderReport& rep);
std::string to_csv(const PhaseDiagramReport& rep);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace latlab
