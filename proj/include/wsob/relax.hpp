#pragma once

// Relaxing sequences giving upper bounds on the Cheeger energy, and the
// assembly of the interval [E_Ch_lower, E_Ch_upper].

#include "wsob/energy.hpp"
#include "wsob/testplan.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace wsob {

/// Field equal to f(point(center_I)) on every stage-n interval I of the Cantor
/// component, smoothstep-interpolated across the gaps and ramped to zero over
/// length/4 beyond the ends. In d > 1 it is multiplied by a cutoff transverse to
/// the axis. `max_depth` is the deepest admissible stage.
ScalarField plateau_sequence(const ScalarField& f, const Measure& measure, std::size_t component, int n,
                             int max_depth);

/// Same with max_depth taken from `disc`'s Cantor depth for that component.
ScalarField plateau_sequence(const ScalarField& f, const Discretization& disc, std::size_t component, int n);

struct RelaxationStage {
  int n = 0;
  double l2_error = 0.0;  ///< ||f_n - f||_{L^2(mu)}
  double energy = 0.0;
};

struct RelaxationCertificate {
  std::string target;
  std::string measure;
  std::string constructor;  ///< "trivial" or "plateau"
  nlohmann::json descriptor;
  EnergySpec energy_spec;
  std::vector<RelaxationStage> stages;
  double upper = kInf;  ///< min over stage energies

  nlohmann::json to_json() const;
  CsvTable table() const;
};

/// f_n = f: one stage with the E_AM energy of f.
RelaxationCertificate trivial_constructor(const ScalarField& f, const Discretization& disc);

/// Plateau stages 1..max_stage (default: the discretization depth), energies
/// E_lip(2)(f_n).
RelaxationCertificate plateau_constructor(const ScalarField& f, const Discretization& disc,
                                          int max_stage = 0);

/// True when the measure consists of a single Cantor component.
bool plateau_applicable(const Measure& measure);

/// "trivial" always; "plateau" when applicable.
std::vector<std::string> default_constructors(const Measure& measure);

struct CheegerInterval {
  std::string measure;
  std::string field;
  double lower = 0.0;
  double upper = kInf;
  double energy_am = 0.0;
  double energy_lip2 = 0.0;
  std::vector<RelaxationCertificate> relaxations;
  std::vector<std::pair<std::string, LowerBound>> lower_bounds;
  std::string resolution_tag;

  nlohmann::json to_json() const;
};

/// lower = max over ensembles of LB^2/2 (0 when none qualifies), upper = min over
/// constructors. Throws InvariantViolation unless
/// lower <= upper <= E_AM <= E_lip(2) up to 1e-10.
CheegerInterval assemble_cheeger_interval(const ScalarField& f, const Discretization& disc,
                                          const std::vector<CurveEnsemble>& ensembles,
                                          const std::vector<std::string>& constructors);

}  // namespace wsob
