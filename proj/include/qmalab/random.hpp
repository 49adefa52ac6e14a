#pragma once

#include <Eigen/Dense>
#include <random>

#include "qmalab/forms.hpp"
#include "qmalab/quaternion.hpp"

namespace qmalab {

using Rng = std::mt19937_64;

Eigen::MatrixXcd random_complex_matrix(int rows, int cols, Rng& rng);

/// G* G for gaussian G: PSD with a spread of eigenvalue scales.
HermitianForm random_psd_form(int n, Rng& rng);

HermitianForm random_hermitian_form(int n, Rng& rng);

QuaternionMatrix random_quaternion_hermitian(int n, Rng& rng);

/// Random J-real antisymmetric form, generated through the decomposition.
HyperhermitianForm random_j_real_form(int n, const HypercomplexFrame& frame, Rng& rng);

Eigen::MatrixXcd random_antisymmetric(int m, Rng& rng);

}  // namespace qmalab
