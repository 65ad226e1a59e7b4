#pragma once

// Shared numeric tolerances. Library code and tests must agree on these,
// so they live in one place and are never repeated as literals elsewhere.

namespace odeig::tol {

inline constexpr double orthonormality    = 1e-10; // max |Q^T Q - I| for orthonormal inputs/outputs
inline constexpr double jacobi_offdiag    = 1e-12; // Jacobi sweep convergence threshold
inline constexpr double reconstruction    = 1e-9;  // max |V diag(w) V^T - A| after sym_eig
inline constexpr double rank_deficiency   = 1e-12; // residual norm floor in Gram-Schmidt
inline constexpr double eigen_residual    = 1e-10; // |S u^{m-1} - lambda u|_inf for closed-form pairs
inline constexpr double hessian_residual  = 1e-8;  // eigenpair residual allowed into stability ops
inline constexpr double unit_norm         = 1e-12; // | ||u|| - 1 | for assembled eigenvectors
inline constexpr double spectrum_match    = 1e-8;  // spectrum agreement, scaled by max(1, lambda)
inline constexpr double symmetry          = 1e-12; // per-probe permutation deviation
inline constexpr double power_residual    = 1e-9;  // power-iteration convergence
inline constexpr double match_distance    = 1e-6;  // discovered-vs-enumerated matching
inline constexpr double fd_gradient       = 1e-6;  // finite-difference gradient agreement
inline constexpr double fd_hessian        = 1e-4;  // finite-difference Hessian agreement

inline constexpr int jacobi_max_sweeps    = 100;
inline constexpr int power_max_iterations = 5000;

} // namespace odeig::tol
