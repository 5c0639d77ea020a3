#pragma once

#include "anisurf/anisotropy.hpp"
#include "anisurf/delaunay.hpp"
#include "anisurf/json_writer.hpp"
#include "anisurf/planar.hpp"
#include "anisurf/report.hpp"
#include "anisurf/surface.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace anisurf {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GammaSpec {
  std::string family = "isotropic";  // isotropic | quadratic | lens | product | sampled
  std::vector<double> q = {1, 1, 1};  // diagonal (3 values) or row-major (9 values)
  double beta = 0.0;
  std::string profile = "circle";  // planar support spec, see parse_planar_support
  std::string cross = "circle";
  std::string table;  // sampled: CSV of nx, ny, nz, gamma
  int degree = 6;     // sampled: total degree of the polynomial fit
};

struct SurfaceSpec {
  std::string family = "sphere";  // sphere | ellipsoid | torus | wulff | delaunay | mesh
  double radius = 1.0;
  std::vector<double> center = {0, 0, 0};
  std::vector<double> axes = {1, 1, 1};
  double major = 2.0;
  double minor = 0.5;
  double scale = 1.0;
  std::string path;  // mesh
};

struct DelaunaySpec {
  std::string profile_class = "catenoid";
  double lambda = 0.0;
  double neck = 1.0;
  double z_extent = 1.0;
  int periods = 2;
  double tolerance = 1e-13;
  int csv_rows = 401;
  int mesh_resolution = 48;
  int summary_samples = 200;
};

struct NumericsSpec {
  int quadrature = 32;
  int samples = 200;
  std::uint64_t seed = 1;
  double tolerance_scale = 1.0;
  double stencil = 1e-4;
  int wulff_samples = 5000;
};

struct ScenarioConfig {
  GammaSpec gamma;
  SurfaceSpec surface;
  DelaunaySpec delaunay;
  std::vector<std::string> checks;  // empty: all
  NumericsSpec numerics;
  std::string output_dir = "out";
  std::string source;  // path the config was read from

  /// Every key with its resolved value, in schema order.
  [[nodiscard]] std::string echo_ini() const;
  [[nodiscard]] Json echo_json() const;
};

/// Strict INI parsing: unknown sections or keys, malformed values and out of
/// range values raise ConfigError.
ScenarioConfig parse_config_text(const std::string& text, const std::string& source = "<text>");
ScenarioConfig load_config(const std::string& path);

/// "circle [r]", "ellipse a b", "lens beta", "trig m b", "fourier c0 a1 a2 ... | b1 b2 ...".
PlanarSupport parse_planar_support(const std::string& spec);

struct SampledFit {
  std::function<double(const Vec3&)> eval;  // degree-zero extension of the fit
  double max_residual = 0.0;                // at the table samples
  int samples = 0;
};

/// Rows (n, gamma) with n normalized; ConfigError on malformed rows.
std::vector<std::array<double, 4>> read_gamma_table(const std::string& path);
/// Least-squares fit of a polynomial of the given total degree in (n1, n2, n3).
SampledFit fit_sampled_gamma(const std::vector<std::array<double, 4>>& rows, int degree);

AnisotropyFunction make_gamma(const GammaSpec& g);
/// Parametric surfaces only; ConfigError for "mesh".
PiecewiseSurface make_surface(const ScenarioConfig& c, const AnisotropyFunction& gamma);
ProfileRequest make_profile_request(const DelaunaySpec& d);
VerifyOptions make_verify_options(const ScenarioConfig& c);

}  // namespace anisurf
