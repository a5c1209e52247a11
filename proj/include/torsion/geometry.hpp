#pragma once

#include <optional>
#include <string>
#include <vector>

#include "torsion/analytic.hpp"
#include "torsion/grid.hpp"

namespace torsion {

/// Oriented polyline approximating a component of a level curve. Closed
/// contours repeat no vertex (closure is implicit). Contours are oriented with
/// the superlevel side on the left, so the boundary of a bounded superlevel
/// region runs counterclockwise.
struct Contour {
  std::vector<Vec2> vertices;
  bool closed = false;
  bool ccw = false;
  double level = 0.0;

  // Per-vertex data, filled by annotate().
  std::vector<double> grad_norm;
  std::vector<double> curvature;
  std::vector<double> radial_derivative;

  std::size_t size() const { return vertices.size(); }
  double signed_area() const;
  double length() const;
  Rect bounds() const;
  // Even-odd containment; closed contours only.
  bool contains(Vec2 p) const;
};

// Fills grad_norm, curvature and radial derivative (about (center_x, 0)).
// Throws Error(DegeneratePoint) if the gradient vanishes at a vertex.
void annotate(Contour& contour, const ScalarField& field, double center_x);

// Moves p onto {field == level} with Newton steps along the gradient.
Vec2 project_to_level(const ScalarField& field, double level, Vec2 p, int steps = 3);

struct LevelSetOptions {
  double refine_tol = 1e-10;
  // Closed loops with fewer vertices are treated as under-resolved and dropped.
  std::size_t min_closed_vertices = 8;
};

/// Marching-squares tracing of {field == level} over the window. Crossing
/// points are polished along their grid edge until |u - level| <= refine_tol;
/// saddle cells are disambiguated by the exact field value at the cell centre.
/// Components that leave the window come back with closed == false.
std::vector<Contour> extract_level_set(const ScalarField& field, double level,
                                       const GridWindow& window, double refine_tol = 1e-10);
std::vector<Contour> extract_level_set(const ScalarField& field, const Raster<double>& samples,
                                       double level, const LevelSetOptions& options);

struct DomainExtract {
  Contour boundary;
  Mask inside;  // flood fill of {u > 0} from the anchor
  Vec2 anchor;

  bool contains(Vec2 p) const { return boundary.contains(p); }
  double mask_area() const;
};

/// Component of {field > 0} containing the anchor, with its outer boundary.
/// Throws ConstructionFailed if field(anchor) <= 0 and EnclosureViolation if
/// the component reaches the window edge.
DomainExtract extract_domain(const ScalarField& field, Vec2 anchor, const GridWindow& window,
                             double refine_tol = 1e-10);
// Anchor (x_1, 0).
DomainExtract extract_domain(const ImplicitField& field, const GridWindow& window,
                             double refine_tol = 1e-10);

inline constexpr int kDefaultGridNx = 2048;
inline constexpr int kDefaultGridNy = 512;

// The enclosure rectangle inflated by 5%, sampled 2048 x 512.
GridWindow default_window(const RootConfig& config, int nx = kDefaultGridNx,
                          int ny = kDefaultGridNy);

struct RectNegativity {
  double max_u = 0.0;           // over the whole rectangle boundary
  Vec2 argmax;
  bool pass = false;            // max_u < 0
  double max_u_vertical = 0.0;  // over the two vertical sides
  bool vertical_pass = false;   // max_u_vertical <= -2 + slack
  // max |u(+-x_enc, y) + 5/2 + y^2/2| over the vertical sides
  double vertical_deviation = 0.0;
};

RectNegativity check_rect_negativity(const ImplicitField& field,
                                     const AsymptoticPrediction& prediction,
                                     int samples_per_side = 4096, double vertical_slack = 0.5);

struct ComponentCount {
  int count = 0;
  std::vector<Vec2> seeds;
  GridWindow window;       // final (most refined) lattice
  std::vector<int> labels; // per node of `window`, -1 outside every counted component
  std::vector<int> history;

  // Component label of the lattice node nearest to p, or of any neighbouring
  // node within one cell when the nearest is unlabeled; -1 if none.
  int label_near(Vec2 p) const;
};

/// Counts 4-connected components of {field > level} on the lattice, keeping
/// only components inside `domain` when it is given. The lattice is doubled
/// until two consecutive resolutions agree; throws Indeterminate if that does
/// not happen by max_nx x max_ny.
ComponentCount superlevel_component_count(const ScalarField& field, double level,
                                          const GridWindow& window,
                                          const DomainExtract* domain = nullptr,
                                          int max_nx = 4096, int max_ny = 1024);

// Bounding box of the domain boundary, inflated by 2%.
GridWindow counting_window(const DomainExtract& domain, int nx = 1024, int ny = 256);

struct StarshapeCertificate {
  Vec2 center;
  double max_radial_derivative = 0.0;
  Vec2 argmax;
  double margin = 0.1;
  bool pass = false;  // max_radial_derivative <= -margin
};

StarshapeCertificate starshape_certificate(const DomainExtract& domain, const ScalarField& field,
                                           double center_x, double margin = 0.1);

struct CurvatureCertificate {
  int zero_count = 0;          // sign changes at the extracted vertices
  int zero_count_refined = 0;  // sign changes at doubled vertex density
  std::vector<Vec2> zero_locations;
  double min_curvature = 0.0;
  Vec2 min_location;
  double max_curvature = 0.0;
  std::vector<double> predicted_zeros;  // zeta_minus, zeta_plus when available
  // |measured - predicted| / |predicted| for zeros matched by sign of x.
  std::vector<double> zero_relative_errors;
  std::optional<Vec2> bottom_point;  // boundary point on x = 0 below the axis
  std::optional<double> bottom_curvature;
  bool pass = false;  // exactly two sign changes at both densities
};

CurvatureCertificate curvature_certificate(const DomainExtract& domain, const ScalarField& field,
                                           const AsymptoticPrediction* prediction = nullptr);

struct TrendEntry {
  double epsilon = 0.0;
  std::optional<double> min_curvature;
  std::string error;
};

struct CurvatureTrend {
  std::vector<TrendEntry> entries;
  bool decreasing = false;  // |min curvature| strictly decreasing along the list
};

// Entries are evaluated in the order given; callers pass decreasing epsilon.
CurvatureTrend min_curvature_trend(const std::vector<RootConfig>& configs,
                                   int nx = kDefaultGridNx, int ny = kDefaultGridNy);

struct StripDistance {
  double hausdorff = 0.0;
  double contour_to_lines = 0.0;
  double lines_to_contour = 0.0;
  std::size_t contour_points = 0;
};

/// Hausdorff distance between {u = 0} and the lines y = +-1, both restricted
/// to |x| <= half_width. The level set is traced on a window slightly wider
/// than the strip section.
StripDistance strip_hausdorff(const ScalarField& field, double half_width = 2.0,
                              double refine_tol = 1e-10, int nx = 1024, int ny = 1024);

}  // namespace torsion
