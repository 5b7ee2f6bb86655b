#pragma once

#include "liftplan/dense.hpp"

namespace liftplan {

// Largest singular value via power iteration on the smaller Gram matrix,
// deterministic all-ones start, capped at 10000 iterations (throws when the
// tolerance is not reached). Zero matrix returns 0.
double spectral_norm(const DenseMatrix& m, double tol = 1e-10);

// Largest / smallest eigenvalue of a symmetric matrix (checked to 1e-12
// relative asymmetry; argument error otherwise). Shifted power iteration.
double max_eig_sym(const DenseMatrix& m, double tol = 1e-10);
double min_eig_sym(const DenseMatrix& m, double tol = 1e-10);

}  // namespace liftplan
