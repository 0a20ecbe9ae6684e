// The fixed-point analysis layer: phi_{d,k}, its largest fixed point p*,
// the mixing probabilities q and q-bar, the core density psi_k(d), the
// emergence threshold d_k, and the message-density trajectory p^(t).
#pragma once

#include <stdexcept>
#include <vector>

namespace coremantle::fixedpoint {

struct CoreParams {
    double d = 0.0; // average degree, > 0
    int k = 3;      // core order, >= 3

    void validate() const;
};

struct FixedPointResult {
    double p_star = 0.0;
    double q = 0.0;
    double q_bar = 0.0;
    double psi = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

// Thrown by solve_p_star when the iteration collapses to 0, i.e. d lies
// below the emergence threshold d_k.
struct SubcriticalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// phi_{d,k}(p) = P[Po(dp) >= k-1].
double phi(const CoreParams& params, double p);

// Fixed-point iteration p <- phi(p) from p = 1. The iterates decrease
// monotonically into [p*, 1], where phi is a contraction, so the limit is
// the largest fixed point. Declares SubcriticalError once an iterate
// drops below 10*tol.
FixedPointResult solve_p_star(const CoreParams& params, double tol = 1e-12);

// q = P[Po(dp) = k-1 | Po(dp) >= k-1]. Throws std::domain_error when the
// conditioning event has probability zero.
double q_of(const CoreParams& params, double p);

// q_bar = P[Po(dp) = k-2 | Po(dp) <= k-2].
double q_bar_of(const CoreParams& params, double p);

// d_k = inf over lambda of lambda / P[Po(lambda) >= k-1], located by
// golden-section search on [1e-3, 100]. Supported for 3 <= k <= 50.
double threshold_d_k(int k, double tol = 1e-10);

// p^(0) = 1, p^(t+1) = phi(p^(t)); returns p^(0..t_max).
std::vector<double> density_trajectory(const CoreParams& params, int t_max);

// x^(t+1) = P[Po(d * p^(t)) >= k]; equals psi_k(d) at p_prev = p*.
double mark_density(const CoreParams& params, double p_prev);

} // namespace coremantle::fixedpoint
