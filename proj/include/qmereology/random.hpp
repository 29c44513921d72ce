#pragma once

#include "qmereology/hilbert.hpp"

#include <cstdint>
#include <random>

namespace qm {

using Rng = std::mt19937_64;

// Independent stream for (master seed, index); identical whatever the worker count.
Rng make_stream(std::uint64_t master, std::uint64_t index);

// Entries i.i.d. complex Gaussian, then (X + X^dagger) / 2.
Operator random_hermitian(int dim, Rng& rng);
// Unit vector with i.i.d. complex Gaussian components.
Ket random_ket(int dim, Rng& rng);
Eigen::VectorXd random_gaussian(int n, double sigma, Rng& rng);

}  // namespace qm
