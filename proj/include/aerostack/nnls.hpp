#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "aerostack/error.hpp"

namespace aerostack {

/// Optimality tolerance used by nnls(): 1e-8 * |A'b|_inf.
inline double nnls_tolerance(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    return 1e-8 * (A.transpose() * b).cwiseAbs().maxCoeff();
}

/// KKT check for min |Aw - b|^2 s.t. w >= 0 with gradient g = A'(Aw - b):
/// |g_i| <= tol where w_i > 0 and g_i >= -tol where w_i = 0.
inline bool nnls_kkt_holds(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& w, double tol) {
    const Eigen::VectorXd g = A.transpose() * (A * w - b);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) < 0) return false;
        if (w(i) > 0 && std::abs(g(i)) > tol) return false;
        if (w(i) == 0 && g(i) < -tol) return false;
    }
    return true;
}

/// Nonnegative least squares by the Lawson-Hanson active-set method.
///
/// The passive set P holds the free coordinates. Each outer step moves the
/// coordinate with the largest positive dual A'(b - Aw) into P, solves the
/// unconstrained problem on P, and walks back toward feasibility whenever
/// that solution has nonpositive entries.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iterations = 0) {
    const Eigen::Index n = A.rows();
    const Eigen::Index k = A.cols();
    if (n < 1 || k < 1) fail(ErrorKind::InvalidArgument, "nnls needs a non-empty system");
    if (b.size() != n) fail(ErrorKind::LengthMismatch, "nnls: A has " + std::to_string(n) + " rows, b has " +
                                                           std::to_string(b.size()));
    if (!A.allFinite() || !b.allFinite()) fail(ErrorKind::NonFinite, "nnls input contains non-finite values");
    if (max_iterations <= 0) max_iterations = static_cast<int>(3 * k);

    const double tol = nnls_tolerance(A, b);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(k);
    std::vector<char> passive(static_cast<std::size_t>(k), 0);
    Eigen::VectorXd dual = A.transpose() * b;

    auto solve_passive = [&](Eigen::VectorXd& s) {
        std::vector<Eigen::Index> cols;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
        }
        Eigen::MatrixXd Ap(n, static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c) Ap.col(static_cast<Eigen::Index>(c)) = A.col(cols[c]);
        const Eigen::VectorXd sp = Ap.colPivHouseholderQr().solve(b);
        s.setZero(k);
        for (std::size_t c = 0; c < cols.size(); ++c) s(cols[c]) = sp(static_cast<Eigen::Index>(c));
    };

    int iterations = 0;
    Eigen::VectorXd s(k);
    for (;;) {
        Eigen::Index enter = -1;
        double best = tol;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (!passive[static_cast<std::size_t>(j)] && dual(j) > best) {
                best = dual(j);
                enter = j;
            }
        }
        if (enter < 0) break;
        passive[static_cast<std::size_t>(enter)] = 1;

        bool first_solve = true;
        for (;;) {
            if (++iterations > max_iterations) {
                fail(ErrorKind::MaxIterations, "nnls exceeded " + std::to_string(max_iterations) + " iterations");
            }
            solve_passive(s);
            if (first_solve && s(enter) <= 0) {
                // roundoff: the entering coordinate cannot move; exclude it
                // until w changes
                passive[static_cast<std::size_t>(enter)] = 0;
                dual(enter) = 0;
                break;
            }
            first_solve = false;

            bool feasible = true;
            double alpha = 1.0;
            for (Eigen::Index j = 0; j < k; ++j) {
                if (passive[static_cast<std::size_t>(j)] && s(j) <= 0) {
                    feasible = false;
                    alpha = std::min(alpha, w(j) / (w(j) - s(j)));
                }
            }
            if (feasible) {
                w = s;
                dual = A.transpose() * (b - A * w);
                break;
            }
            w += alpha * (s - w);
            for (Eigen::Index j = 0; j < k; ++j) {
                if (passive[static_cast<std::size_t>(j)] && w(j) <= 1e-15 * (1.0 + std::abs(s(j)))) {
                    passive[static_cast<std::size_t>(j)] = 0;
                    w(j) = 0;
                }
            }
        }
    }
    for (Eigen::Index j = 0; j < k; ++j) {
        if (!passive[static_cast<std::size_t>(j)]) w(j) = 0;
    }
    return w;
}

}  // namespace aerostack
