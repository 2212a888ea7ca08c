#pragma once

// Discrete energies over a quadrature rule:
//   E_lip(f) = 1/2 sum_i w_i lip(f)(x_i)^2          (any l^p norm)
//   E_AM(f)  = 1/2 sum_i w_i |P_V(x_i) grad f(x_i)|^2 (Euclidean)

#include "wsob/bundle.hpp"
#include "wsob/fields.hpp"
#include "wsob/report.hpp"

#include <json.hpp>

#include <string>

namespace wsob {

enum class Functional { lip, am, cheeger_upper, cheeger_lower };

/// Energy used by experiments that take a functional as a parameter.
struct EnergySpec {
  Functional functional = Functional::am;
  NormPlugin norm = NormPlugin::euclidean();

  std::string label() const;  ///< "E_lip(inf)", "E_AM", ...
  static EnergySpec parse(const std::string& functional, const std::string& p = "2");
};

struct EnergyReport {
  std::string measure;
  std::string field;
  EnergySpec spec;
  double value = 0.0;
  nlohmann::json resolution;
  std::string resolution_tag;

  nlohmann::json to_json() const;
  /// measure, field, functional, p, resolution, value
  std::vector<std::string> csv_row() const;
  static std::vector<std::string> csv_header();
};

/// Throws InvalidInput unless f has a bounded support box.
void require_compact_support(const ScalarField& f, const char* operation);

EnergyReport energy_lip(const ScalarField& f, const Discretization& disc,
                        NormPlugin norm = NormPlugin::euclidean());
EnergyReport energy_am(const ScalarField& f, const Discretization& disc);
/// Dispatches on spec.functional (lip or am).
EnergyReport energy(const EnergySpec& spec, const ScalarField& f, const Discretization& disc);

/// P_V(x_i) grad f(x_i) at every node, as a d x N matrix.
Matrix am_gradient_field(const ScalarField& f, const Discretization& disc);
Matrix am_gradient_field(const ScalarField& f, const std::vector<SubspaceD>& node_bundle,
                         const QuadratureRule& rule);

struct DefectReport {
  std::string measure;
  std::string f;
  std::string g;
  EnergySpec spec;
  double energy_sum = 0.0;   ///< E(f+g)
  double energy_diff = 0.0;  ///< E(f-g)
  double energy_f = 0.0;
  double energy_g = 0.0;
  double defect = 0.0;    ///< E(f+g) + E(f-g) - 2E(f) - 2E(g)
  double relative = 0.0;  ///< defect / (2E(f) + 2E(g)), 0/0 reported as 0
  std::string resolution_tag;

  nlohmann::json to_json() const;
  std::vector<std::string> csv_row() const;
  static std::vector<std::string> csv_header();
};

DefectReport parallelogram_defect(const EnergySpec& spec, const ScalarField& f, const ScalarField& g,
                                  const Discretization& disc);

struct SobolevNorm {
  double value = 0.0;
  double l2_squared = 0.0;
  double energy = 0.0;
  EnergySpec surrogate;
  /// The surrogate overestimates the Cheeger energy in general.
  bool upper_bound_surrogate = true;
};

/// (||f||^2_{L^2} + 2 E(f))^{1/2} with E the chosen surrogate (E_AM by default).
SobolevNorm sobolev_norm(const ScalarField& f, const Discretization& disc,
                         EnergySpec surrogate = {});

}  // namespace wsob
