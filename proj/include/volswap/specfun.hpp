#pragma once

#include <cmath>
#include <vector>

namespace volswap {

struct SeriesResult {
    double value = 0.0;
    int terms_used = 0;
    double last_term = 0.0; // magnitude of the final included term
    bool converged = false;
};

// Neumaier's variant of compensated summation: error <= 2 eps sum|x_i| up to O(n eps^2).
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) { add(x); return *this; }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double log_gamma(double x);
// ln|Gamma(x)| and its sign for any x that is not a pole.
double log_abs_gamma(double x, int* sign);
double pochhammer(double a, int k);

// 2F1(-k, b; c; z), a polynomial of degree k in z.
double gauss_2f1_terminating(int k, double b, double c, double z);

SeriesResult kummer_1f1(double a, double b, double z, int max_terms = 10000);
// exp(-z) 1F1(a; b; z), free of overflow for large |z|.
SeriesResult kummer_1f1_scaled(double a, double b, double z, int max_terms = 10000);

double laguerre_int(double a, int n, double x);
// L_0^{(a)}(x) .. L_n^{(a)}(x).
std::vector<double> laguerre_int_all(double a, int n, double x);

// Laguerre function of real order b through Gamma(a+b+1)/(Gamma(b+1)Gamma(a+1)) 1F1(-b; a+1; x).
SeriesResult laguerre_frac(double a, double b, double x);

} // namespace volswap
