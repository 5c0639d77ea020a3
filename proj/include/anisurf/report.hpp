#pragma once

#include "anisurf/anisotropy.hpp"
#include "anisurf/json_writer.hpp"
#include "anisurf/surface.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace anisurf {

enum class CheckStatus { pass, fail, not_applicable, error };
std::string to_string(CheckStatus s);

struct CheckRecord {
  std::string name;
  std::string identity;  // the relation checked, as a formula
  CheckStatus status = CheckStatus::not_applicable;
  std::optional<double> max_pointwise;
  std::optional<double> integral_residual;
  int sample_count = 0;
  double tolerance = 0.0;
  std::string message;
  Json details = Json::object();
};

/// Default tolerances; every one is multiplied by the tolerance scale.
struct Tolerances {
  double pointwise = 1e-5;          // FD-stencil identities
  double rep = 1e-8;
  double lambda_two_ways = 1e-6;    // relative
  double integral = 1e-6;           // relative to F
  double closed_integral = 1e-6;    // relative to F
  double first_variation = 1e-6;    // relative to max(|dF|, F)
  double expansion = 1e-6;          // relative coefficients
  double expansion_fit = 1e-9;      // fit misfit
  double second_variation = 1e-8;   // relative to F
  double pointwise_sign = 1e-10;
  double isoperimetric = 1e-6;      // relative to F[W]
  double degree = 0.01;
  double rigidity = 1e-6;           // relative to F[W]
};

struct VerifyOptions {
  int quadrature = 32;
  int samples = 200;
  std::uint64_t seed = 1;
  double tolerance_scale = 1.0;
  double stencil = 1e-4;
  std::set<std::string> checks;  // empty: all
  Tolerances tol;
};

/// Names of every check, sorted.
const std::vector<std::string>& check_names();

struct ResidualDump {
  std::string check;
  int patch = 0;
  double s = 0.0;
  double t = 0.0;
  double residual = 0.0;
};

struct VerificationReport {
  std::string gamma;
  std::string gamma_family;
  std::string surface;
  int quadrature = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  double tolerance_scale = 1.0;
  std::vector<CheckRecord> checks;  // sorted by name
  std::vector<ResidualDump> dump;

  [[nodiscard]] bool passed() const;  // no fail or error
  [[nodiscard]] bool has_failures() const;
  [[nodiscard]] Json to_json() const;
  [[nodiscard]] std::string table() const;
  [[nodiscard]] std::string residual_csv() const;
};

VerificationReport run_verification(const PiecewiseSurface& surf, const AnisotropyFunction& gamma,
                                    const VerifyOptions& opt);

/// Concatenation of several report JSON documents, checks keyed by source.
Json merge_reports(const std::vector<std::pair<std::string, Json>>& reports);

}  // namespace anisurf
