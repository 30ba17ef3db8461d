#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hrec {

/// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2n-1.
struct GaussRule {
    std::vector<double> points;
    std::vector<double> weights;
};

inline GaussRule gauss_legendre(int n)
{
    if (n < 1) {
        throw std::invalid_argument("gauss_legendre: need at least one point");
    }
    // P_n(x) and P_{n-1}(x) by the three-term recurrence
    const auto legendre = [n](double x) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        return std::pair{p1, p0};
    };
    GaussRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    // roots are symmetric; Newton from the usual cosine guess
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [pn, pm] = legendre(x);
            const double dp = n * (x * pn - pm) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const auto [pn, pm] = legendre(x);
        const double dp = n * (x * pn - pm) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[i] = -x;
        rule.points[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        rule.points[n / 2] = 0.0;
    }
    return rule;
}

/// Tensor rule mapped to the unit square [0,1]^2 (weights sum to 1).
struct UnitSquareRule {
    std::vector<double> xi;
    std::vector<double> eta;
    std::vector<double> weights;
};

inline UnitSquareRule unit_square_rule(int n)
{
    const GaussRule g = gauss_legendre(n);
    UnitSquareRule rule;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            rule.xi.push_back(0.5 * (g.points[i] + 1.0));
            rule.eta.push_back(0.5 * (g.points[j] + 1.0));
            rule.weights.push_back(0.25 * g.weights[i] * g.weights[j]);
        }
    }
    return rule;
}

} // namespace hrec
