#pragma once

// Refutations of closability: explicit sequences f_n -> 0 in L^2(mu) whose
// gradients converge to a nonzero field, and identity gaps between the relaxed
// and the pointwise Lipschitz energy. No positive verdict is ever issued.

#include "wsob/relax.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace wsob {

/// theta(t) = t exp(1 - 1/(1 - t^2)) on (-1, 1), 0 outside.
double theta(double t);
double theta_derivative(double t);

enum class Verdict { not_closable, no_counterexample_found };
enum class WitnessKind { none, sequence, identity_gap };

std::string to_string(Verdict v);
std::string to_string(WitnessKind w);

struct ClosabilityStage {
  int n = 0;
  double f_norm = 0.0;    ///< ||f_n||_{L^2(mu)}
  double residual = 0.0;  ///< ||grad f_n - v||_{L^2_mu}
};

struct SequenceAttempt {
  nlohmann::json constructor;
  std::vector<ClosabilityStage> stages;
  double v_norm = 0.0;
  bool accepted = false;
  std::string note;
  nlohmann::json to_json() const;
};

struct ClosabilityCertificate {
  Verdict verdict = Verdict::no_counterexample_found;
  WitnessKind witness = WitnessKind::none;
  std::string measure;
  nlohmann::json resolution;
  std::string reason;

  // sequence witness
  nlohmann::json constructor;
  std::vector<ClosabilityStage> stages;
  double v_norm = 0.0;
  std::vector<SequenceAttempt> attempts;  ///< every attempt, including rejected ones

  // identity-gap witness
  std::string field;
  nlohmann::json field_descriptor;
  std::vector<std::string> constructors;
  double cheeger_upper = 0.0;
  double energy_lip2 = 0.0;
  double gap = 0.0;

  nlohmann::json to_json() const;
  static ClosabilityCertificate from_json(const nlohmann::json& j);
  CsvTable table() const;
};

/// A replayable sequence: members f_n and the limit gradient field v.
struct TransversalSequence {
  nlohmann::json descriptor;
  std::function<ScalarField(int)> member;
  std::function<Vector(const Vector&)> limit;
  std::vector<int> stages;
};

/// Rebuilds a sequence from its descriptor. Throws InvalidInput when the
/// descriptor does not match the measure.
TransversalSequence build_sequence(const Measure& measure, const nlohmann::json& descriptor);

/// Stage records of `seq` over `disc`.
SequenceAttempt evaluate_sequence(const TransversalSequence& seq, const Discretization& disc);

/// Invariants of a sequence witness with tolerances multiplied by `slack`.
bool sequence_invariants_hold(const std::vector<ClosabilityStage>& stages, double v_norm, double slack,
                              std::string* why = nullptr);

/// Searches the components of mu for one whose bundle has dimension < d at
/// every owned node and builds f_n = eta theta(n s) / n.
ClosabilityCertificate transversal_counterexample(const Measure& measure, const Resolution& resolution = {});

/// NOT_CLOSABLE when E_Ch_upper(f) < 0.5 E_lip(f, 2).
ClosabilityCertificate identity_gap_check(const ScalarField& f, const Discretization& disc,
                                          const std::vector<CurveEnsemble>& ensembles,
                                          const std::vector<std::string>& constructors);

struct VerificationReport {
  bool pass = false;
  std::vector<std::string> reasons;
  std::optional<SequenceAttempt> recomputed;
  double cheeger_upper = 0.0;
  double energy_lip2 = 0.0;
  nlohmann::json to_json() const;
};

/// Re-evaluates the certificate from its stored descriptors over `resolution`
/// and checks its invariants with doubled tolerances and its stored values.
VerificationReport verify_certificate(const ClosabilityCertificate& certificate, const Measure& measure,
                                      const Resolution& resolution);

}  // namespace wsob
