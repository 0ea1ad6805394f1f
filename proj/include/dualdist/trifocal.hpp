#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "dualdist/conditional.hpp"
#include "dualdist/subspace.hpp"

namespace dualdist {

// 3x3x3 three-view tensor T^{qr}_i flattened to theta[9*i + 3*q + r] (slice
// index i slowest), unit norm, with a 27x27 tangent-space covariance.
struct TrifocalModel {
  Eigen::VectorXd theta;  // R^27
  Eigen::MatrixXd cov;
  double sigma = 0.0;

  GaussianParam gaussian(int rank_hint = 0) const;
};

inline int tensor_index(int i, int q, int r) { return 9 * i + 3 * q + r; }

// Tensor of the camera triple (P1, P2, P3); cameras need not be in canonical
// form (the first camera is reduced to [I|0] internally).  Result unit norm.
Eigen::VectorXd tensor_from_cameras(const Eigen::Matrix<double, 3, 4>& P1,
                                    const Eigen::Matrix<double, 3, 4>& P2,
                                    const Eigen::Matrix<double, 3, 4>& P3);

// One three-view feature; each view is a homogeneous 3-vector tagged as a
// point or a line.
struct Correspondence {
  std::array<Eigen::Vector3d, 3> views;
  std::array<bool, 3> is_line = {false, false, false};
};

// Constraint columns y_l with theta^T y_l = 0 for the incidence relation the
// tag pattern selects: point-point-point (9 columns, rank 4),
// point-point-line (3, rank 2), point-line-line (1, rank 1),
// line-line-line (3, rank 2).  Throws DegenerateError for tag patterns with
// no incidence relation (a line in view 1 with points behind it).
ConstraintMatrix trilinearity_columns(const Correspondence& c);

// Maximum-likelihood tensor from three-view point correspondences: linear
// estimate from the stacked constraint columns (with per-view coordinate
// normalization), refined by Gauss-Newton on covariance-standardized
// residuals.  Covariance: tangent-space pseudoinverse of the normal matrix.
TrifocalModel fit_trifocal(const std::vector<Correspondence>& corrs, double sigma = -1.0);

// View-1 point minimizing the algebraic point-point-point residual for the
// measured (m2, m3); the equations are linear in the unknown point.
Eigen::Vector2d deterministic_transfer(const TrifocalModel& model,
                                       const Eigen::Vector3d& m2,
                                       const Eigen::Vector3d& m3);

// Feature map (u, v) -> (s, Phi1..Phi_K~) of the constraint system built
// from the view-1 point (u, v) and the fixed (m2, m3), composed with the
// reduced frame; evaluates through the multi-constraint dual density.
// expected_rank (when > 0) is checked at the chart's construction probe.
FeatureMap transfer_density_chart(const TrifocalModel& model, const ReducedFrame& frame,
                                  const Eigen::Vector3d& m2, const Eigen::Vector3d& m3,
                                  const Eigen::Vector2d& probe, bool* rank_warning = nullptr);

// Synthetic three-view scene: random points in front of three perturbed
// pinhole cameras, projections corrupted by isotropic pixel noise.
struct SyntheticScene {
  std::vector<Correspondence> corrs;          // noisy projections
  std::vector<Correspondence> clean_corrs;    // noiseless projections
  Eigen::Matrix<double, 3, 4> P1, P2, P3;
  Eigen::VectorXd theta_true;                 // tensor of the true cameras
  std::vector<Eigen::Vector3d> points;        // 3-D points
};

SyntheticScene make_synthetic_scene(int n_points, double sigma_px, uint64_t seed);

}  // namespace dualdist
