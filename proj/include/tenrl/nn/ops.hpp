#pragma once

#include "tenrl/nn/tape.hpp"

namespace tenrl::nn {

// Differentiable operations. Leading mode is always the batch.

/// y = x·Wᵀ + b with W (out, in); x is flattened to (B, in). `b` may be kNoVar.
VarId linear(Tape& t, VarId x, VarId weight, VarId bias);

/// Valid (unpadded) strided cross-correlation. x (B, C, H, W), weight (O, C, k, k), bias (O).
VarId conv2d(Tape& t, VarId x, VarId weight, VarId bias, std::size_t stride);

/// max(x, 0); the derivative at exactly 0 is taken as 0.
VarId relu(Tape& t, VarId x);

VarId reshape(Tape& t, VarId x, Shape shape);

/// z ×_mode Uᵀ for U of shape (I, R): mode extent I becomes R.
VarId mode_product_transposed(Tape& t, VarId z, VarId factor, std::size_t mode);

/// Contracts every non-batch mode of z (B, R_1..R_M) with the leading modes of
/// core (R_1..R_M, R_out), giving (B, R_out).
VarId contract_core(Tape& t, VarId z, VarId core);

/// q = v + adv − mean_a adv. value (B, atoms), advantage (B, actions·atoms);
/// output (B, actions) when atoms == 1, else (B, actions, atoms).
VarId dueling_combine(Tape& t, VarId value, VarId advantage, std::size_t actions, std::size_t atoms);

/// Splits (B, actions·atoms) into (B, actions) or (B, actions, atoms) without combining.
VarId action_view(Tape& t, VarId x, std::size_t actions, std::size_t atoms);

/// Sum of all entries as a (1) tensor.
VarId sum_all(Tape& t, VarId x);

}  // namespace tenrl::nn
