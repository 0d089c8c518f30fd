#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aicare/num/tape.hpp"

// Differentiable operations over tape variables. Every op returns a new
// node on the tape of its inputs; binary ops require both inputs on the
// same tape.

namespace aicare::num {

// Elementwise arithmetic with numpy-style broadcasting (shapes aligned at
// the trailing axis; a dimension of 1 stretches).
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }
inline Var operator/(const Var& a, const Var& b) { return div(a, b); }

Var scale(const Var& x, double factor);
Var add_scalar(const Var& x, double offset);

Var sigmoid(const Var& x);
Var tanh(const Var& x);
Var exp(const Var& x);
/// Natural log; input must be strictly positive.
Var log(const Var& x);
Var square(const Var& x);
/// Square root; input must be strictly positive so the derivative exists.
Var sqrt(const Var& x);

/// Plain matrix product of [M,K] and [K,N].
Var matmul(const Var& a, const Var& b);
/// Batched product. `a` is [G,M,K]; `b` is [G,K,N] or a shared [K,N].
/// With `transpose_b`, `b` is read as [G,N,K] / [N,K].
Var bmm(const Var& a, const Var& b, bool transpose_b = false);

Var reshape(const Var& x, Shape shape);
/// Output axis i is input axis perm[i].
Var permute(const Var& x, const std::vector<std::size_t>& perm);
Var slice(const Var& x, std::size_t axis, std::size_t start, std::size_t length);
Var concat(std::span<const Var> parts, std::size_t axis);

/// Softmax along `axis`, max-shifted for stability. Empty axis is an error.
Var softmax(const Var& x, std::size_t axis);

Var sum(const Var& x);
Var sum(const Var& x, std::size_t axis, bool keepdim = false);
Var mean(const Var& x);
Var mean(const Var& x, std::size_t axis, bool keepdim = false);

/// Mean of `x` over entries where `mask` is nonzero. `mask` has x's shape.
Var masked_mean(const Var& x, const Tensor& mask);

/// Mean binary cross-entropy of sigmoid(logits) against 0/1 `labels`,
/// over entries where `mask` is nonzero. Throws when the mask is empty.
Var bce_with_logits(const Var& logits, const Tensor& labels, const Tensor& mask);

}  // namespace aicare::num
