#pragma once

#include "ccnls/grid.hpp"

namespace ccnls {

// Unnormalised forward DFT (kernel e^{-i xi x}) over the spatial axes, in place.
void fft_forward(const Grid& g, cvec& data);
// Inverse DFT including the 1/M^d factor, so inverse(forward(f)) == f.
void fft_inverse(const Grid& g, cvec& data);

// Same contract over (t, x1, ..., xd) for a Q-sample uniform time lattice.
void fft_spacetime_forward(const Grid& g, int Q, cvec& data);
void fft_spacetime_inverse(const Grid& g, int Q, cvec& data);

// Discrete angular frequency of time index q for Q samples spaced dt.
double tau_of(int q, int Q, double dt);

}  // namespace ccnls
