#include "csim/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace csim {

namespace {

double offdiag_norm2(const CMat& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j)
            if (i != j) s += std::norm(a(i, j));
    return s;
}

// Unitary plane rotation G: G(p,p)=G(q,q)=c, G(q,p)=u, G(p,q)=-conj(u),
// chosen so that (G^H A G)(p,q) = 0 for Hermitian A.
struct PlaneRotation {
    double c;
    cd u;
};

PlaneRotation solve_rotation(double app, double aqq, cd apq) {
    const double m = std::abs(apq);
    const cd phase = apq / m;
    const double tau = (aqq - app) / (2.0 * m);
    // roots of t^2 - 2*tau*t - 1 = 0; take the smaller-magnitude one
    const double sign = tau >= 0.0 ? 1.0 : -1.0;
    const double t = -sign / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    return PlaneRotation{c, s * std::conj(phase)};
}

} // namespace

HermitianEig hermitian_eig(const CMat& input) {
    if (input.rows != input.cols) throw std::invalid_argument("hermitian_eig: matrix not square");
    const int n = input.rows;
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(input(i, j)));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            if (std::abs(input(i, j) - std::conj(input(j, i))) > 1e-9 * std::max(1.0, scale))
                throw std::invalid_argument("hermitian_eig: matrix not Hermitian");

    CMat a = input;
    CMat v(n, n);
    for (int i = 0; i < n; ++i) v(i, i) = 1.0;

    const double tol = 1e-28 * std::max(1.0, scale * scale) * n * n;
    for (int sweep = 0; sweep < 60 && offdiag_norm2(a) > tol; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const PlaneRotation g =
                    solve_rotation(a(p, p).real(), a(q, q).real(), a(p, q));
                const double c = g.c;
                const cd u = g.u;
                // B = A G
                for (int k = 0; k < n; ++k) {
                    const cd akp = a(k, p);
                    const cd akq = a(k, q);
                    a(k, p) = c * akp + u * akq;
                    a(k, q) = -std::conj(u) * akp + c * akq;
                }
                // A' = G^H B
                for (int k = 0; k < n; ++k) {
                    const cd apk = a(p, k);
                    const cd aqk = a(q, k);
                    a(p, k) = c * apk + std::conj(u) * aqk;
                    a(q, k) = -u * apk + c * aqk;
                }
                a(p, q) = cd(0.0, 0.0);
                a(q, p) = cd(0.0, 0.0);
                a(p, p) = cd(a(p, p).real(), 0.0);
                a(q, q) = cd(a(q, q).real(), 0.0);
                // V <- V G
                for (int k = 0; k < n; ++k) {
                    const cd vkp = v(k, p);
                    const cd vkq = v(k, q);
                    v(k, p) = c * vkp + u * vkq;
                    v(k, q) = -std::conj(u) * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a(i, i).real() > a(j, j).real(); });

    HermitianEig out;
    out.eigenvalues.resize(n);
    out.eigenvectors = CMat(n, n);
    for (int j = 0; j < n; ++j) {
        out.eigenvalues[j] = a(order[j], order[j]).real();
        for (int i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
    }
    return out;
}

CMat hermitian_sqrt(const CMat& a) {
    HermitianEig e = hermitian_eig(a);
    const int n = a.rows;
    CMat out(n, n);
    for (int k = 0; k < n; ++k) {
        const double lam = std::max(e.eigenvalues[k], 0.0);
        const double r = std::sqrt(lam);
        if (r == 0.0) continue;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out(i, j) += r * e.eigenvectors(i, k) * std::conj(e.eigenvectors(j, k));
    }
    return out;
}

} // namespace csim
