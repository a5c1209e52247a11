#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "torsion/certify.hpp"
#include "torsion/pde.hpp"

namespace torsion::report {

using nlohmann::json;

inline constexpr const char* kSchemaVersion = "torsion-landscape/1";

// {"name": "definition and unit", ...}
json meta(std::initializer_list<std::pair<const char*, const char*>> entries);

json point_json(Vec2 p);
json config_json(const RootConfig& config, bool roots_defaulted);
json predictions_json(const AsymptoticPrediction& p);
json rect_json(const RectNegativity& r);
json starshape_json(const StarshapeCertificate& s);
json multiplicity_json(const MaximaCheck& m);
json curvature_json(const CurvatureCertificate& c);
json critical_points_json(const std::vector<CriticalPoint>& points);
json auto_epsilon_json(const AutoEpsilon& a);
json domain_json(const DomainExtract& d);
// Construction status, P0/P1/P3 blocks and critical points.
json certificates_json(const CertificateSet& c);
json error_json(const std::string& kind, const std::string& message);

// Columns x, y, curvature, radial_derivative, grad_norm; contour must be annotated.
std::string boundary_csv(const Contour& boundary);
std::string mask_pgm(const Mask& mask);
// Columns x, y, value.
std::string field_csv(const pde::IrregularGrid& grid, const std::vector<double>& values);
// Linear grey scale from 0 (black) to the field maximum (white) on the lattice.
std::string field_pgm(const pde::IrregularGrid& grid, const std::vector<double>& values);
// Boundary and level curves, axis-equal, y upwards.
std::string domain_svg(const DomainExtract& domain, const std::vector<Contour>& level_curves,
                       const RootConfig& config);

std::string sha256_hex(std::string_view bytes);

// Records written artifacts with their hashes and phase wall times.
class Manifest {
 public:
  Manifest(std::string command, std::filesystem::path directory);

  // Writes the file under the output directory and records its hash.
  std::filesystem::path write(const std::string& name, const std::string& content);
  void record_external(const std::string& what);
  void set(const std::string& key, json value) { extra_[key] = std::move(value); }
  void time_phase(const std::string& phase, double seconds) { times_[phase] = seconds; }
  const std::filesystem::path& directory() const { return directory_; }

  // Writes <command>-manifest.json and returns its path.
  std::filesystem::path finish();

 private:
  std::string command_;
  std::filesystem::path directory_;
  json artifacts_ = json::array();
  json extra_ = json::object();
  json times_ = json::object();
  std::chrono::steady_clock::time_point start_;
};

}  // namespace torsion::report
