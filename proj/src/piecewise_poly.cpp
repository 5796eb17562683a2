#include "symgeo/piecewise_poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace symgeo::dh {

PiecewisePoly::PiecewisePoly(std::vector<double> breaks, std::vector<std::vector<double>> coef)
    : breaks_(std::move(breaks)), coef_(std::move(coef)) {
    if (breaks_.size() < 2) throw std::invalid_argument("PiecewisePoly: need at least two breakpoints");
    if (coef_.size() + 1 != breaks_.size())
        throw std::invalid_argument("PiecewisePoly: coefficient count must be breakpoints - 1");
    if (!std::is_sorted(breaks_.begin(), breaks_.end()))
        throw std::invalid_argument("PiecewisePoly: breakpoints must ascend");
}

int PiecewisePoly::degree() const {
    std::size_t d = 0;
    for (const auto& c : coef_) d = std::max(d, c.size());
    return static_cast<int>(d) - 1;
}

double PiecewisePoly::eval(double x) const {
    if (x < breaks_.front() || x >= breaks_.back()) return 0.0;
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - breaks_.begin()) - 1;
    const double u = x - breaks_[i];
    double v = 0.0;
    for (std::size_t j = coef_[i].size(); j-- > 0;) v = v * u + coef_[i][j];
    return v;
}

double PiecewisePoly::integral() const {
    double total = 0.0;
    for (std::size_t i = 0; i < coef_.size(); ++i) {
        const double L = breaks_[i + 1] - breaks_[i];
        double p = L;
        for (std::size_t j = 0; j < coef_[i].size(); ++j) {
            total += coef_[i][j] * p / (j + 1);
            p *= L;
        }
    }
    return total;
}

double monomial_exp_integral(int j, double t, double L) {
    const double x = t * L;
    if (std::abs(x) < 0.5) {
        // series: L^{j+1} sum_k (-x)^k / (k! (j+k+1)), avoids cancellation
        double term = 1.0, sum = 1.0 / (j + 1);
        for (int k = 1; k < 60; ++k) {
            term *= -x / k;
            const double add = term / (j + k + 1);
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        }
        return std::pow(L, j + 1) * sum;
    }
    // closed form: j!/t^{j+1} (1 - e^{-x} sum_{k<=j} x^k/k!)
    double fact = 1.0;
    for (int k = 2; k <= j; ++k) fact *= k;
    double partial = 1.0, xp = 1.0, kf = 1.0;
    for (int k = 1; k <= j; ++k) {
        xp *= x;
        kf *= k;
        partial += xp / kf;
    }
    return fact / std::pow(t, j + 1) * (1.0 - std::exp(-x) * partial);
}

double PiecewisePoly::laplace(double t) const {
    if (t == 0.0) return integral();
    double total = 0.0;
    for (std::size_t i = 0; i < coef_.size(); ++i) {
        const double L = breaks_[i + 1] - breaks_[i];
        const double damp = std::exp(-t * breaks_[i]);
        for (std::size_t j = 0; j < coef_[i].size(); ++j)
            if (coef_[i][j] != 0.0)
                total += coef_[i][j] * damp * monomial_exp_integral(static_cast<int>(j), t, L);
    }
    return total;
}

PiecewisePoly PiecewisePoly::shifted(double c) const {
    std::vector<double> b = breaks_;
    for (double& x : b) x += c;
    return PiecewisePoly(std::move(b), coef_);
}

}  // namespace symgeo::dh
