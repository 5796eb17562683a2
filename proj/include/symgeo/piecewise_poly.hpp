#pragma once

#include <vector>

namespace symgeo::dh {

/// Piecewise polynomial density on the real line: zero outside
/// [breaks.front(), breaks.back()], polynomial in (x - breaks[i]) on each
/// interval [breaks[i], breaks[i+1]).
class PiecewisePoly {
public:
    PiecewisePoly(std::vector<double> breaks, std::vector<std::vector<double>> coef);

    const std::vector<double>& breakpoints() const { return breaks_; }
    const std::vector<std::vector<double>>& coefficients() const { return coef_; }
    int degree() const;

    double eval(double x) const;

    /// Exact integral over the support.
    double integral() const;

    /// Exact Laplace transform int rho(x) e^{-t x} dx, via closed forms for
    /// int_0^L u^j e^{-t u} du per interval (series branch for small tL).
    double laplace(double t) const;

    /// Density of the shifted measure (x -> x + c).
    PiecewisePoly shifted(double c) const;

private:
    std::vector<double> breaks_;
    std::vector<std::vector<double>> coef_;  // per interval, local monomial basis
};

/// int_0^L u^j e^{-t u} du
double monomial_exp_integral(int j, double t, double L);

}  // namespace symgeo::dh
