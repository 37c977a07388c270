// SPDX-License-Identifier: Apache-2.0
//
// rmtstap: random-matrix-theory corrected space-time adaptive processing
// Copyright (C) 2026 The rmtstap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmtstap
{
    using cdouble = std::complex<double>;
    using ComplexMatrix = Eigen::MatrixXcd;
    using ComplexVector = Eigen::VectorXcd;
    using RealVector = Eigen::VectorXd;

    /// Raised when an input breaks a documented precondition (non-Hermitian, indefinite, mismatched sizes).
    class ContractViolation : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// Raised when a computation produces a degenerate quantity (e.g. a non-positive LCMV denominator).
    class NumericalFailure : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline constexpr double kHermitianTol = 1e-10;
    inline constexpr double kPinvRelTol = 1e-12;

    /// Largest entrywise |m - m^H|.
    inline double hermitian_defect(const ComplexMatrix &m)
    {
        if (m.rows() != m.cols())
            return std::numeric_limits<double>::infinity();
        return (m - m.adjoint()).cwiseAbs().maxCoeff();
    }

    /**
     * Eigenpairs of a Hermitian matrix, values in descending order.
     *
     * Column i of `vectors` is the unit-norm eigenvector belonging to values[i].
     */
    struct EigenSystem
    {
        RealVector values;
        ComplexMatrix vectors;

        Eigen::Index size() const { return values.size(); }

        /// Sum of values[i] v_i v_i^H.
        ComplexMatrix reconstruct() const
        {
            return vectors * values.cast<cdouble>().asDiagonal() * vectors.adjoint();
        }
    };

    /// Hermitian eigendecomposition; throws ContractViolation on non-Hermitian input.
    inline EigenSystem eigh(const ComplexMatrix &m)
    {
        if (m.rows() == 0 || m.rows() != m.cols())
            throw ContractViolation("eigh: matrix must be square and non-empty");
        if (!m.allFinite())
            throw ContractViolation("eigh: matrix has non-finite entries");
        const double defect = hermitian_defect(m);
        if (defect > kHermitianTol * std::max(1.0, m.cwiseAbs().maxCoeff()))
            throw ContractViolation("eigh: matrix is not Hermitian (defect " + std::to_string(defect) + ")");

        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("eigh: eigensolver did not converge");

        // Eigen returns ascending order; reverse it. Equal values keep their relative order reversed,
        // which is harmless since downstream code only uses projectors.
        EigenSystem es;
        es.values = solver.eigenvalues().reverse();
        es.vectors = solver.eigenvectors().rowwise().reverse();
        return es;
    }

    /// Hermitian square root of a PSD matrix. Eigenvalues down to -1e-10 (relative) are clamped to zero.
    inline ComplexMatrix herm_sqrt(const ComplexMatrix &m)
    {
        const EigenSystem es = eigh(m);
        const double scale = std::max(1.0, std::abs(es.values(0)));
        RealVector root(es.size());
        for (Eigen::Index i = 0; i < es.size(); ++i)
        {
            const double v = es.values(i);
            if (v < -kHermitianTol * scale)
                throw ContractViolation("herm_sqrt: matrix is indefinite (eigenvalue " + std::to_string(v) + ")");
            root(i) = std::sqrt(std::max(v, 0.0));
        }
        return es.vectors * root.cast<cdouble>().asDiagonal() * es.vectors.adjoint();
    }

    /**
     * Inverse (or Moore-Penrose pseudo-inverse) of a Hermitian matrix held in eigen form.
     *
     * Eigenvalues whose magnitude falls below rel_tol times the largest magnitude are
     * treated as zero. Built once, applied to any number of right-hand sides.
     */
    class HermitianPseudoInverse
    {
    public:
        HermitianPseudoInverse(EigenSystem es, double rel_tol = kPinvRelTol)
            : es_(std::move(es))
        {
            const double largest = es_.values.cwiseAbs().maxCoeff();
            inv_values_.resize(es_.size());
            rank_ = 0;
            for (Eigen::Index i = 0; i < es_.size(); ++i)
            {
                const double v = es_.values(i);
                if (largest > 0.0 && std::abs(v) > rel_tol * largest)
                {
                    inv_values_(i) = 1.0 / v;
                    ++rank_;
                }
                else
                    inv_values_(i) = 0.0;
            }
        }

        explicit HermitianPseudoInverse(const ComplexMatrix &m, double rel_tol = kPinvRelTol)
            : HermitianPseudoInverse(eigh(m), rel_tol)
        {
        }

        ComplexVector apply(const ComplexVector &b) const
        {
            if (b.size() != es_.vectors.rows())
                throw ContractViolation("pseudo-inverse: dimension mismatch");
            ComplexVector coeffs = es_.vectors.adjoint() * b;
            coeffs.array() *= inv_values_.array().cast<cdouble>();
            return es_.vectors * coeffs;
        }

        Eigen::Index rank() const { return rank_; }
        const EigenSystem &eigen() const { return es_; }

    private:
        EigenSystem es_;
        RealVector inv_values_;
        Eigen::Index rank_ = 0;
    };

    /// m^-1 b when m is invertible, otherwise the pseudo-inverse truncated at rel_tol applied to b.
    inline ComplexVector solve_or_pinv(const ComplexMatrix &m, const ComplexVector &b, double rel_tol = kPinvRelTol)
    {
        if (m.rows() != b.size())
            throw ContractViolation("solve_or_pinv: dimension mismatch");
        return HermitianPseudoInverse(m, rel_tol).apply(b);
    }

    inline double relative_frobenius(const ComplexMatrix &got, const ComplexMatrix &want)
    {
        const double denom = want.norm();
        return denom > 0.0 ? (got - want).norm() / denom : (got - want).norm();
    }

    inline double db10(double linear) { return 10.0 * std::log10(linear); }
    inline double from_db10(double db) { return std::pow(10.0, db / 10.0); }

} // namespace rmtstap
