#pragma once

// Plain serial versions of the hot kernels. They follow the textbook form of
// each stencil (no fused loops, no OpenMP) and serve as the baseline in the
// kernel tests and the benchmark.

#include "lcflow/fields.hpp"
#include "lcflow/operators.hpp"

namespace lcflow::reference {

FaceField laplacian(const FaceField& u, const ChannelGrid& g, const SlipMatrixB& B);
VectorField laplacian(const VectorField& d, const ChannelGrid& g);

/// 1/2 [u.grad f + div(u f)] for a cell-centered field.
VectorField advect(const FaceField& u, const VectorField& f, const ChannelGrid& g);
/// Same for the velocity itself on the MAC dual cells.
FaceField advect(const FaceField& u, const FaceField& f, const ChannelGrid& g);

ScalarField divergence(const FaceField& u, const ChannelGrid& g);
VectorField elastic_stress(const VectorField& d, const ChannelGrid& g);
ScalarField gradient_density(const VectorField& d, const ChannelGrid& g);

/// 1/2 sum over faces u^2 dV, accumulated in storage order.
double kinetic_energy(const FaceField& u, const ChannelGrid& g);

}  // namespace lcflow::reference
