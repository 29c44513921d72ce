#include "qmereology/random.hpp"

namespace qm {

Rng make_stream(std::uint64_t master, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x51ed27u};
    return Rng(seq);
}

Operator random_hermitian(int dim, Rng& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    Operator X(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i) {
            const double re = n01(rng);
            const double im = n01(rng);
            X(i, j) = cplx(re, im);
        }
    return 0.5 * (X + X.adjoint());
}

Ket random_ket(int dim, Rng& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    Ket v(dim);
    for (int i = 0; i < dim; ++i) {
        const double re = n01(rng);
        const double im = n01(rng);
        v(i) = cplx(re, im);
    }
    return v / v.norm();
}

Eigen::VectorXd random_gaussian(int n, double sigma, Rng& rng) {
    std::normal_distribution<double> dist(0.0, sigma);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
}

}  // namespace qm
