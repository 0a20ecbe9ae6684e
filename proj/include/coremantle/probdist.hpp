// Poisson pmf/tail computations and truncated Poisson samplers.
#pragma once

#include <cstdint>

#include "coremantle/rng.hpp"

namespace coremantle::probdist {

// P[Po(rate) = x]. Computed in log space. Throws std::domain_error for
// rate < 0.
double poisson_pmf(double rate, unsigned x);

// P[Po(rate) >= z]. Direct tail summation, so small tails keep full
// relative precision. Equals 1 for z = 0.
double poisson_tail(double rate, unsigned z);

// P[Po(rate) <= z].
double poisson_head(double rate, unsigned z);

enum class Constraint : std::uint8_t { none, at_least, at_most, less_than };

struct TruncatedPoissonSpec {
    double rate = 0.0;
    Constraint constraint = Constraint::none;
    unsigned threshold = 0;

    // Throws std::domain_error unless rate >= 0 and the constrained event
    // has positive probability.
    void validate() const;
};

// Draws from Po(rate) conditioned on the spec's constraint.
// Bounded-support constraints use inverse-CDF over the finite support;
// at_least uses inverse-CDF on the renormalized tail with support capped
// at the 1 - 1e-12 conditional quantile.
unsigned sample_truncated_poisson(const TruncatedPoissonSpec& spec, rng::Stream& rng);

// Plain Poisson draw (inverse-CDF walk, capped at negligible tail mass).
unsigned sample_poisson(double rate, rng::Stream& rng);

} // namespace coremantle::probdist
