#pragma once

// Named measures and fields used by the curated experiments, and a seeded
// generator of random catalog fields.

#include "wsob/fields.hpp"
#include "wsob/measure.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace wsob {

std::vector<std::string> catalog_measure_names();
/// Throws InvalidInput for unknown names.
Measure catalog_measure(const std::string& name);
/// Resolves a string as a catalog name, an object via parse_measure.
Measure resolve_measure(const nlohmann::json& ref);

/// Names valid in every dimension: "x", "y", "z", "x+y", "x*y", "gaussian",
/// "tent", "zero", "one" (every field but "zero" and "one" is multiplied by
/// unit_cutoff; "one" is the cutoff itself).
std::vector<std::string> catalog_field_names();
ScalarField catalog_field(const std::string& name, Index dim);
ScalarField resolve_field(const nlohmann::json& ref, Index dim);

/// Portable uniform in [0, 1): the top 53 bits of one mt19937_64 draw.
double uniform01(std::mt19937_64& rng);

/// A random combination of coordinates, quadratic monomials and a Gaussian,
/// multiplied by unit_cutoff(dim). Parameters are drawn with uniform01 only.
ScalarField random_catalog_field(Index dim, std::mt19937_64& rng);

/// Stream for task `index` of a run seeded with `seed`.
std::mt19937_64 task_rng(std::uint64_t seed, std::uint64_t index);

}  // namespace wsob
