// Cyclic Jacobi eigendecomposition for small Hermitian matrices.
// Used for difference-matrix spectra, correlation matrix square roots,
// and as the dense oracle in tests. Sizes here never exceed 16.

#pragma once

#include <vector>

#include "csim/mat.hpp"

namespace csim {

struct HermitianEig {
    std::vector<double> eigenvalues; // descending
    CMat eigenvectors;               // columns match eigenvalues
};

// a must be Hermitian (validated up to a tolerance); throws otherwise.
HermitianEig hermitian_eig(const CMat& a);

// V diag(sqrt(max(lambda, 0))) V^H
CMat hermitian_sqrt(const CMat& a);

} // namespace csim
