#pragma once

// Instance files and JSON serialization of results.
//
// Instance layout:
//   {
//     "dimension": 3,
//     "M": [[a, b, c], ...] or "computational",
//     "N": [...]            (or "N_list": [[...], [...]]),
//     "p": [..],            optional
//     "rho": [[..], ..],    optional, row-major
//     "spectrum": [..],     optional
//     "labels": {"M": "..", "N": ["..", ..]}  optional
//   }
// Vectors are lists of amplitudes; an amplitude is a number or [re, im].

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cip/bounds.hpp"
#include "cip/quantum.hpp"

namespace cip {

struct Instance {
  std::string name;
  int dimension = 0;
  MeasurementBasis m;
  std::vector<MeasurementBasis> posts;  // N, or every entry of N_list
  std::optional<ProbVector> p;
  std::optional<DensityMatrix> rho;
  std::optional<std::vector<double>> spectrum;

  const ProbVector& require_p() const;
  const MeasurementBasis& post(std::size_t index) const;
  /// Explicit spectrum, else the spectrum of rho, else nullopt.
  std::optional<std::vector<double>> known_spectrum() const;
};

/// Throws InputError with the offending field named.
Instance parse_instance(const nlohmann::json& j, double tol_ortho = kDefaultTolOrtho);
Instance load_instance(const std::filesystem::path& path, double tol_ortho = kDefaultTolOrtho);

/// Rounds to 12 significant digits so that serialized output is stable.
double round12(double v);
nlohmann::json to_json_rounded(std::span<const double> v);
nlohmann::json to_json_rounded(const ProbVector& v);
nlohmann::json to_json(const SolverStats& s);
nlohmann::json to_json(const BoundSet& b);
nlohmann::json to_json(const DensityMatrix& rho);

/// Two-space indented dump with a trailing newline.
std::string serialize(const nlohmann::json& j);

}  // namespace cip
