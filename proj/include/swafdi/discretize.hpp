#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "swafdi/model.hpp"

namespace swafdi {

class DiscretizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Continuous-time affine dynamics xdot = A_c x + b_c sampled every T_s.
template <typename Scalar>
struct BasicAffineOde {
    MatX<Scalar> A_c;
    VecX<Scalar> b_c;
    Scalar T_s = Scalar(1);
};

template <typename Scalar>
struct BasicDiscreteAffine {
    MatX<Scalar> A_d;
    VecX<Scalar> f_d;
};

using AffineOde = BasicAffineOde<double>;
using DiscreteAffine = BasicDiscreteAffine<double>;

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
/// The matrix is scaled by 2^-k so that its 1-norm is at most 0.5; the series
/// stops once a term is below tol relative to the partial sum.
template <typename Derived>
MatX<typename Derived::Scalar> expm(const Eigen::MatrixBase<Derived>& a, double tol = 1e-12) {
    using Scalar = typename Derived::Scalar;
    using std::abs;
    if (a.rows() != a.cols()) throw DiscretizeError("expm needs a square matrix");
    if (!a.allFinite()) throw DiscretizeError("expm input has non-finite entries");
    const auto n = a.rows();
    const double norm = static_cast<double>(a.cwiseAbs().colwise().sum().maxCoeff());
    int k = 0;
    if (norm > 0.5) k = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const MatX<Scalar> scaled = a / std::pow(Scalar(2), k);

    MatX<Scalar> sum = MatX<Scalar>::Identity(n, n);
    MatX<Scalar> term = MatX<Scalar>::Identity(n, n);
    bool converged = false;
    for (int j = 1; j <= 60; ++j) {
        term = (term * scaled) / Scalar(j);
        sum += term;
        const double tnorm = static_cast<double>(term.cwiseAbs().maxCoeff());
        const double snorm = static_cast<double>(sum.cwiseAbs().maxCoeff());
        if (tnorm <= tol * snorm) {
            converged = true;
            break;
        }
    }
    if (!converged) throw DiscretizeError("matrix exponential series did not converge");
    for (int i = 0; i < k; ++i) sum = sum * sum;
    if (!sum.allFinite()) throw DiscretizeError("matrix exponential overflowed");
    return sum;
}

/// Zero-order hold through the augmented exponential exp([[A_c, b_c], [0, 0]] T_s).
template <typename Scalar>
BasicDiscreteAffine<Scalar> zoh(const BasicAffineOde<Scalar>& ode) {
    const auto n = ode.A_c.rows();
    if (ode.A_c.cols() != n || ode.b_c.size() != n) throw DiscretizeError("zoh: inconsistent dimensions");
    if (!(ode.T_s > Scalar(0))) throw DiscretizeError("zoh: sampling period must be positive");
    MatX<Scalar> aug = MatX<Scalar>::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = ode.A_c * ode.T_s;
    aug.topRightCorner(n, 1) = ode.b_c * ode.T_s;
    const MatX<Scalar> e = expm(aug);
    return {e.topLeftCorner(n, n), e.topRightCorner(n, 1)};
}

}  // namespace swafdi
