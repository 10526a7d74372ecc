#pragma once
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lobeq {

struct QuadRule {
    std::vector<double> nodes, weights;
};

// Golub-Welsch: nodes/weights from the symmetric tridiagonal recurrence matrix.
inline QuadRule golub_welsch(const std::vector<double>& alpha,
                             const std::vector<double>& beta, double mu0) {
    int n = static_cast<int>(alpha.size());
    Eigen::VectorXd diag(n), sub(n - 1);
    for (int i = 0; i < n; ++i) diag[i] = alpha[i];
    for (int i = 0; i + 1 < n; ++i) sub[i] = std::sqrt(beta[i + 1]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw std::runtime_error("quadrature: eigensolve failed");
    QuadRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = es.eigenvalues()[i];
        double v = es.eigenvectors()(0, i);
        r.weights[i] = mu0 * v * v;
    }
    return r;
}

// Gauss-Hermite for weight e^{-t^2}.
inline const QuadRule& hermite_rule(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> alpha(n, 0.0), beta(n, 0.0);
    for (int k = 1; k < n; ++k) beta[k] = 0.5 * k;
    return cache.emplace(n, golub_welsch(alpha, beta, std::sqrt(M_PI))).first->second;
}

// Gauss-Jacobi on [0,1] with weight y^b (a=0 in the (1-x)^a (1+x)^b convention),
// already mapped: sum of weights = 1/(b+1).
inline const QuadRule& jacobi01_rule(int n, double b) {
    static std::map<std::pair<int, long>, QuadRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, std::lround(b * 65536.0));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double a = 0.0;
    std::vector<double> alpha(n), beta(n, 0.0);
    alpha[0] = (b - a) / (a + b + 2.0);
    for (int k = 1; k < n; ++k) {
        double s = 2.0 * k + a + b;
        alpha[k] = (b * b - a * a) / (s * (s + 2.0));
        beta[k] = 4.0 * k * (k + a) * (k + b) * (k + a + b) /
                  (s * s * (s + 1.0) * (s - 1.0));
    }
    // mu0 folded together with the [-1,1] -> [0,1] weight rescale: the 2^{b+1}
    // factors cancel, which also keeps large b from overflowing.
    double mu0 = std::beta(a + 1.0, b + 1.0);
    QuadRule raw = golub_welsch(alpha, beta, mu0);
    for (int i = 0; i < n; ++i) raw.nodes[i] = 0.5 * (1.0 + raw.nodes[i]);
    return cache.emplace(key, std::move(raw)).first->second;
}

// Gauss-Legendre on [0,1] (unit weight).
inline const QuadRule& legendre01_rule(int n) { return jacobi01_rule(n, 0.0); }

}  // namespace lobeq
