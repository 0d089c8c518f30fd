#include "aicare/num/ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>

namespace aicare::num {
namespace {

void same_tape(const Var& a, const Var& b) {
  if (a.tape() != b.tape() || a.tape() == nullptr) {
    throw std::logic_error("operands live on different tapes");
  }
}

// Index maps from output positions to operand positions. An empty map means
// the operand already has the output shape.
struct Broadcast {
  Shape out;
  std::vector<std::size_t> ia;
  std::vector<std::size_t> ib;
};

std::vector<std::size_t> broadcast_map(const Shape& in, const Shape& out) {
  const std::size_t rank = out.size();
  const std::size_t offset = rank - in.size();
  std::vector<std::size_t> stride(rank, 0);
  std::size_t s = 1;
  for (std::size_t d = in.size(); d-- > 0;) {
    stride[d + offset] = in[d] == 1 ? 0 : s;
    s *= in[d];
  }
  const std::size_t n = numel(out);
  std::vector<std::size_t> map(n);
  std::vector<std::size_t> counter(rank, 0);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    map[i] = pos;
    for (std::size_t d = rank; d-- > 0;) {
      ++counter[d];
      pos += stride[d];
      if (counter[d] < out[d]) break;
      pos -= stride[d] * counter[d];
      counter[d] = 0;
    }
  }
  return map;
}

std::shared_ptr<const Broadcast> plan_broadcast(const Shape& a, const Shape& b) {
  auto plan = std::make_shared<Broadcast>();
  if (a == b) {
    plan->out = a;
    return plan;
  }
  const std::size_t rank = std::max(a.size(), b.size());
  plan->out.assign(rank, 1);
  for (std::size_t d = 0; d < rank; ++d) {
    const std::size_t da = d + a.size() >= rank ? a[d + a.size() - rank] : 1;
    const std::size_t db = d + b.size() >= rank ? b[d + b.size() - rank] : 1;
    if (da != db && da != 1 && db != 1) {
      throw std::invalid_argument("shapes " + to_string(a) + " and " + to_string(b) +
                                  " do not broadcast");
    }
    plan->out[d] = std::max(da, db);
  }
  if (a != plan->out) plan->ia = broadcast_map(a, plan->out);
  if (b != plan->out) plan->ib = broadcast_map(b, plan->out);
  return plan;
}

inline std::size_t at(const std::vector<std::size_t>& map, std::size_t i) {
  return map.empty() ? i : map[i];
}

// Elementwise binary op. `fwd(x, y)` gives the value; `da(x, y, out)` and
// `db(x, y, out)` give the local partials.
template <class Fwd, class Da, class Db>
Var binary(const Var& a, const Var& b, Fwd fwd, Da da, Db db) {
  same_tape(a, b);
  auto plan = plan_broadcast(a.shape(), b.shape());
  const auto& va = a.value().data();
  const auto& vb = b.value().data();
  const std::size_t n = numel(plan->out);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(va[at(plan->ia, i)], vb[at(plan->ib, i)]);
  const std::size_t ia = a.id();
  const std::size_t ib = b.id();
  Tape& tape = *a.tape();
  const std::size_t out_id = tape.size();
  return tape.record(Tensor(plan->out, std::move(out)), {a, b},
                     [=](Tape& t, std::span<const double> g) {
                       const auto xa = t.value(ia).data();
                       const auto xb = t.value(ib).data();
                       const auto y = t.value(out_id).data();
                       if (t.requires_grad(ia)) {
                         auto& ga = t.grad_buffer(ia);
                         for (std::size_t i = 0; i < g.size(); ++i) {
                           const auto pa = at(plan->ia, i);
                           const auto pb = at(plan->ib, i);
                           ga[pa] += g[i] * da(xa[pa], xb[pb], y[i]);
                         }
                       }
                       if (t.requires_grad(ib)) {
                         auto& gb = t.grad_buffer(ib);
                         for (std::size_t i = 0; i < g.size(); ++i) {
                           const auto pa = at(plan->ia, i);
                           const auto pb = at(plan->ib, i);
                           gb[pb] += g[i] * db(xa[pa], xb[pb], y[i]);
                         }
                       }
                     });
}

// Elementwise unary op; `d(x, y)` is dy/dx.
template <class Fwd, class D>
Var unary(const Var& x, Fwd fwd, D d) {
  const auto& v = x.value().data();
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = fwd(v[i]);
  Tape& tape = *x.tape();
  const std::size_t ix = x.id();
  const std::size_t out_id = tape.size();
  return tape.record(Tensor(x.shape(), std::move(out)), {x},
                     [=](Tape& t, std::span<const double> g) {
                       const auto xv = t.value(ix).data();
                       const auto y = t.value(out_id).data();
                       auto& gx = t.grad_buffer(ix);
                       for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * d(xv[i], y[i]);
                     });
}

// Splits a shape around `axis` into (outer, axis length, inner).
struct AxisSplit {
  std::size_t outer = 1;
  std::size_t len = 1;
  std::size_t inner = 1;
};

AxisSplit split_at(const Shape& shape, std::size_t axis) {
  if (axis >= shape.size()) {
    throw std::out_of_range("axis " + std::to_string(axis) + " out of range for shape " +
                            to_string(shape));
  }
  AxisSplit s;
  for (std::size_t d = 0; d < axis; ++d) s.outer *= shape[d];
  s.len = shape[axis];
  for (std::size_t d = axis + 1; d < shape.size(); ++d) s.inner *= shape[d];
  return s;
}

// C[M,N] += A[M,K] * B[K,N]
void mm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
           std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    const double* ai = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

// C[M,N] += A[M,K] * B[N,K]^T
void mm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
           std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* bj = b + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
      ci[j] += acc;
    }
  }
}

// C[K,N] += A[M,K]^T * B[M,N]
void mm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
           std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    const double* bi = b + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      double* cp = c + p * n;
      for (std::size_t j = 0; j < n; ++j) cp[j] += av * bi[j];
    }
  }
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var add(const Var& a, const Var& b) {
  return binary(
      a, b, [](double x, double y) { return x + y; }, [](double, double, double) { return 1.0; },
      [](double, double, double) { return 1.0; });
}

Var sub(const Var& a, const Var& b) {
  return binary(
      a, b, [](double x, double y) { return x - y; }, [](double, double, double) { return 1.0; },
      [](double, double, double) { return -1.0; });
}

Var mul(const Var& a, const Var& b) {
  return binary(
      a, b, [](double x, double y) { return x * y; }, [](double, double y, double) { return y; },
      [](double x, double, double) { return x; });
}

Var div(const Var& a, const Var& b) {
  return binary(
      a, b, [](double x, double y) { return x / y; },
      [](double, double y, double) { return 1.0 / y; },
      [](double, double y, double out) { return -out / y; });
}

Var scale(const Var& x, double factor) {
  return unary(
      x, [factor](double v) { return v * factor; }, [factor](double, double) { return factor; });
}

Var add_scalar(const Var& x, double offset) {
  return unary(
      x, [offset](double v) { return v + offset; }, [](double, double) { return 1.0; });
}

Var sigmoid(const Var& x) {
  return unary(x, stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Var tanh(const Var& x) {
  return unary(
      x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Var exp(const Var& x) {
  return unary(
      x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Var log(const Var& x) {
  for (double v : x.value().data()) {
    if (!(v > 0.0)) throw std::domain_error("log of a non-positive value");
  }
  return unary(
      x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Var sqrt(const Var& x) {
  for (double v : x.value().data()) {
    if (!(v > 0.0)) throw std::domain_error("sqrt of a non-positive value");
  }
  return unary(
      x, [](double v) { return std::sqrt(v); }, [](double, double y) { return 0.5 / y; });
}

Var square(const Var& x) {
  return unary(
      x, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Var matmul(const Var& a, const Var& b) {
  if (a.shape().size() != 2 || b.shape().size() != 2) {
    throw std::invalid_argument("matmul expects 2-D operands, got " + to_string(a.shape()) +
                                " and " + to_string(b.shape()));
  }
  const Shape as = a.shape();
  Var a3 = reshape(a, {1, as[0], as[1]});
  Var c = bmm(a3, b);
  return reshape(c, {as[0], b.shape()[1]});
}

Var bmm(const Var& a, const Var& b, bool transpose_b) {
  same_tape(a, b);
  const Shape& as = a.shape();
  const Shape& bs = b.shape();
  if (as.size() != 3 || (bs.size() != 3 && bs.size() != 2)) {
    throw std::invalid_argument("bmm expects [G,M,K] x [G,K,N] or [K,N], got " + to_string(as) +
                                " and " + to_string(bs));
  }
  const bool shared = bs.size() == 2;
  const std::size_t g = as[0];
  const std::size_t m = as[1];
  const std::size_t k = as[2];
  const std::size_t b_rows = shared ? bs[0] : bs[1];
  const std::size_t b_cols = shared ? bs[1] : bs[2];
  const std::size_t kb = transpose_b ? b_cols : b_rows;
  const std::size_t n = transpose_b ? b_rows : b_cols;
  if ((!shared && bs[0] != g) || kb != k) {
    throw std::invalid_argument("bmm shape mismatch: " + to_string(as) + " x " + to_string(bs) +
                                (transpose_b ? " (transposed)" : ""));
  }
  const std::size_t b_stride = shared ? 0 : k * n;
  const double* pa = a.value().data().data();
  const double* pb = b.value().data().data();
  std::vector<double> out(g * m * n, 0.0);
  for (std::size_t i = 0; i < g; ++i) {
    if (transpose_b) {
      mm_nt(pa + i * m * k, pb + i * b_stride, out.data() + i * m * n, m, k, n);
    } else {
      mm_nn(pa + i * m * k, pb + i * b_stride, out.data() + i * m * n, m, k, n);
    }
  }
  const std::size_t ia = a.id();
  const std::size_t ib = b.id();
  return a.tape()->record(
      Tensor({g, m, n}, std::move(out)), {a, b}, [=](Tape& t, std::span<const double> gout) {
        const double* xa = t.value(ia).data().data();
        const double* xb = t.value(ib).data().data();
        const double* go = gout.data();
        if (t.requires_grad(ia)) {
          double* ga = t.grad_buffer(ia).data();
          for (std::size_t i = 0; i < g; ++i) {
            // dA = dC * B^T  (or dC * B when B was read transposed)
            if (transpose_b) {
              mm_nn(go + i * m * n, xb + i * b_stride, ga + i * m * k, m, n, k);
            } else {
              mm_nt(go + i * m * n, xb + i * b_stride, ga + i * m * k, m, n, k);
            }
          }
        }
        if (t.requires_grad(ib)) {
          double* gb = t.grad_buffer(ib).data();
          for (std::size_t i = 0; i < g; ++i) {
            if (transpose_b) {
              // dB[N,K] = dC^T * A
              mm_tn(go + i * m * n, xa + i * m * k, gb + i * b_stride, m, n, k);
            } else {
              // dB[K,N] = A^T * dC
              mm_tn(xa + i * m * k, go + i * m * n, gb + i * b_stride, m, k, n);
            }
          }
        }
      });
}

Var reshape(const Var& x, Shape shape) {
  if (numel(shape) != x.size()) {
    throw std::invalid_argument("cannot reshape " + to_string(x.shape()) + " to " +
                                to_string(shape));
  }
  const std::size_t ix = x.id();
  return x.tape()->record(x.value().reshaped(std::move(shape)), {x},
                          [ix](Tape& t, std::span<const double> g) { t.accumulate(ix, g); });
}

Var permute(const Var& x, const std::vector<std::size_t>& perm) {
  const Shape& in = x.shape();
  const std::size_t rank = in.size();
  if (perm.size() != rank) throw std::invalid_argument("permutation rank mismatch");
  std::vector<bool> seen(rank, false);
  for (auto p : perm) {
    if (p >= rank || seen[p]) throw std::invalid_argument("invalid axis permutation");
    seen[p] = true;
  }
  std::vector<std::size_t> in_stride(rank, 1);
  for (std::size_t d = rank; d-- > 1;) in_stride[d - 1] = in_stride[d] * in[d];
  Shape out_shape(rank);
  std::vector<std::size_t> stride(rank);
  for (std::size_t d = 0; d < rank; ++d) {
    out_shape[d] = in[perm[d]];
    stride[d] = in_stride[perm[d]];
  }
  const std::size_t n = x.size();
  auto map = std::make_shared<std::vector<std::size_t>>(n);
  std::vector<std::size_t> counter(rank, 0);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    (*map)[i] = pos;
    for (std::size_t d = rank; d-- > 0;) {
      ++counter[d];
      pos += stride[d];
      if (counter[d] < out_shape[d]) break;
      pos -= stride[d] * counter[d];
      counter[d] = 0;
    }
  }
  const auto& v = x.value().data();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = v[(*map)[i]];
  const std::size_t ix = x.id();
  return x.tape()->record(Tensor(out_shape, std::move(out)), {x},
                          [ix, map](Tape& t, std::span<const double> g) {
                            auto& gx = t.grad_buffer(ix);
                            for (std::size_t i = 0; i < g.size(); ++i) gx[(*map)[i]] += g[i];
                          });
}

Var slice(const Var& x, std::size_t axis, std::size_t start, std::size_t length) {
  const auto s = split_at(x.shape(), axis);
  if (start + length > s.len) {
    throw std::out_of_range("slice [" + std::to_string(start) + ", " +
                            std::to_string(start + length) + ") exceeds axis of length " +
                            std::to_string(s.len));
  }
  Shape out_shape = x.shape();
  out_shape[axis] = length;
  const auto& v = x.value().data();
  std::vector<double> out;
  out.reserve(s.outer * length * s.inner);
  for (std::size_t o = 0; o < s.outer; ++o) {
    const auto begin = v.begin() + static_cast<std::ptrdiff_t>((o * s.len + start) * s.inner);
    out.insert(out.end(), begin, begin + static_cast<std::ptrdiff_t>(length * s.inner));
  }
  const std::size_t ix = x.id();
  return x.tape()->record(Tensor(out_shape, std::move(out)), {x},
                          [=](Tape& t, std::span<const double> g) {
                            auto& gx = t.grad_buffer(ix);
                            const std::size_t block = length * s.inner;
                            for (std::size_t o = 0; o < s.outer; ++o) {
                              double* dst = gx.data() + (o * s.len + start) * s.inner;
                              const double* src = g.data() + o * block;
                              for (std::size_t j = 0; j < block; ++j) dst[j] += src[j];
                            }
                          });
}

Var concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) throw std::invalid_argument("concat of zero tensors");
  const Shape& first = parts.front().shape();
  const auto s0 = split_at(first, axis);
  std::vector<std::size_t> lens;
  std::size_t total = 0;
  for (const auto& p : parts) {
    same_tape(parts.front(), p);
    const Shape& sh = p.shape();
    if (sh.size() != first.size()) throw std::invalid_argument("concat rank mismatch");
    for (std::size_t d = 0; d < sh.size(); ++d) {
      if (d != axis && sh[d] != first[d]) {
        throw std::invalid_argument("concat shape mismatch: " + to_string(first) + " vs " +
                                    to_string(sh));
      }
    }
    lens.push_back(sh[axis]);
    total += sh[axis];
  }
  Shape out_shape = first;
  out_shape[axis] = total;
  std::vector<double> out;
  out.reserve(s0.outer * total * s0.inner);
  for (std::size_t o = 0; o < s0.outer; ++o) {
    for (std::size_t p = 0; p < parts.size(); ++p) {
      const auto& v = parts[p].value().data();
      const std::size_t block = lens[p] * s0.inner;
      const auto begin = v.begin() + static_cast<std::ptrdiff_t>(o * block);
      out.insert(out.end(), begin, begin + static_cast<std::ptrdiff_t>(block));
    }
  }
  std::vector<std::size_t> ids;
  for (const auto& p : parts) ids.push_back(p.id());
  const std::size_t outer = s0.outer;
  const std::size_t inner = s0.inner;
  return parts.front().tape()->record(
      Tensor(out_shape, std::move(out)), parts, [=](Tape& t, std::span<const double> g) {
        std::size_t offset = 0;
        for (std::size_t o = 0; o < outer; ++o) {
          for (std::size_t p = 0; p < ids.size(); ++p) {
            const std::size_t block = lens[p] * inner;
            if (t.requires_grad(ids[p])) {
              double* dst = t.grad_buffer(ids[p]).data() + o * block;
              for (std::size_t j = 0; j < block; ++j) dst[j] += g[offset + j];
            }
            offset += block;
          }
        }
      });
}

Var softmax(const Var& x, std::size_t axis) {
  const auto s = split_at(x.shape(), axis);
  if (s.len == 0) throw std::invalid_argument("softmax over an empty axis");
  const auto& v = x.value().data();
  std::vector<double> out(v.size());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t in = 0; in < s.inner; ++in) {
      const std::size_t base = o * s.len * s.inner + in;
      double mx = v[base];
      for (std::size_t j = 1; j < s.len; ++j) mx = std::max(mx, v[base + j * s.inner]);
      double total = 0.0;
      for (std::size_t j = 0; j < s.len; ++j) {
        const double e = std::exp(v[base + j * s.inner] - mx);
        out[base + j * s.inner] = e;
        total += e;
      }
      for (std::size_t j = 0; j < s.len; ++j) out[base + j * s.inner] /= total;
    }
  }
  const std::size_t ix = x.id();
  Tape& tape = *x.tape();
  const std::size_t out_id = tape.size();
  return tape.record(Tensor(x.shape(), std::move(out)), {x},
                     [=](Tape& t, std::span<const double> g) {
                       const auto y = t.value(out_id).data();
                       auto& gx = t.grad_buffer(ix);
                       for (std::size_t o = 0; o < s.outer; ++o) {
                         for (std::size_t in = 0; in < s.inner; ++in) {
                           const std::size_t base = o * s.len * s.inner + in;
                           double dot = 0.0;
                           for (std::size_t j = 0; j < s.len; ++j) {
                             const auto p = base + j * s.inner;
                             dot += g[p] * y[p];
                           }
                           for (std::size_t j = 0; j < s.len; ++j) {
                             const auto p = base + j * s.inner;
                             gx[p] += y[p] * (g[p] - dot);
                           }
                         }
                       }
                     });
}

Var sum(const Var& x) {
  const auto& v = x.value().data();
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  const std::size_t ix = x.id();
  const std::size_t n = x.size();
  return x.tape()->record(Tensor::scalar(total), {x}, [=](Tape& t, std::span<const double> g) {
    auto& gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < n; ++i) gx[i] += g[0];
  });
}

Var sum(const Var& x, std::size_t axis, bool keepdim) {
  const auto s = split_at(x.shape(), axis);
  Shape out_shape = x.shape();
  if (keepdim) {
    out_shape[axis] = 1;
  } else {
    out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
  }
  const auto& v = x.value().data();
  std::vector<double> out(s.outer * s.inner, 0.0);
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t j = 0; j < s.len; ++j) {
      const double* src = v.data() + (o * s.len + j) * s.inner;
      double* dst = out.data() + o * s.inner;
      for (std::size_t in = 0; in < s.inner; ++in) dst[in] += src[in];
    }
  }
  const std::size_t ix = x.id();
  return x.tape()->record(Tensor(out_shape, std::move(out)), {x},
                          [=](Tape& t, std::span<const double> g) {
                            auto& gx = t.grad_buffer(ix);
                            for (std::size_t o = 0; o < s.outer; ++o) {
                              for (std::size_t j = 0; j < s.len; ++j) {
                                double* dst = gx.data() + (o * s.len + j) * s.inner;
                                const double* src = g.data() + o * s.inner;
                                for (std::size_t in = 0; in < s.inner; ++in) dst[in] += src[in];
                              }
                            }
                          });
}

Var mean(const Var& x) {
  if (x.size() == 0) throw std::invalid_argument("mean of an empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.size()));
}

Var mean(const Var& x, std::size_t axis, bool keepdim) {
  const auto len = split_at(x.shape(), axis).len;
  if (len == 0) throw std::invalid_argument("mean over an empty axis");
  return scale(sum(x, axis, keepdim), 1.0 / static_cast<double>(len));
}

Var masked_mean(const Var& x, const Tensor& mask) {
  if (mask.shape() != x.shape()) {
    throw std::invalid_argument("mask shape " + to_string(mask.shape()) + " != " +
                                to_string(x.shape()));
  }
  double count = 0.0;
  for (double m : mask.data()) count += m != 0.0 ? 1.0 : 0.0;
  if (count == 0.0) throw std::invalid_argument("masked_mean over an empty mask");
  Var m = x.tape()->constant(mask);
  return scale(sum(mul(x, m)), 1.0 / count);
}

Var bce_with_logits(const Var& logits, const Tensor& labels, const Tensor& mask) {
  const Shape& shape = logits.shape();
  if (labels.shape() != shape || mask.shape() != shape) {
    throw std::invalid_argument("bce_with_logits: labels/mask must match logits shape " +
                                to_string(shape));
  }
  const auto x = logits.value().data();
  const auto y = labels.data();
  const auto w = mask.data();
  double count = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (w[i] == 0.0) continue;
    count += 1.0;
    // max(x,0) - x*y + log(1 + e^{-|x|})
    total += std::max(x[i], 0.0) - x[i] * y[i] + std::log1p(std::exp(-std::abs(x[i])));
  }
  if (count == 0.0) throw std::invalid_argument("binary cross-entropy over zero labeled entries");
  const std::size_t ix = logits.id();
  return logits.tape()->record(
      Tensor::scalar(total / count), {logits},
      [=, labels = labels, mask = mask](Tape& t, std::span<const double> g) {
        const auto xv = t.value(ix).data();
        const auto yv = labels.data();
        const auto wv = mask.data();
        auto& gx = t.grad_buffer(ix);
        for (std::size_t i = 0; i < xv.size(); ++i) {
          if (wv[i] == 0.0) continue;
          gx[i] += g[0] * (stable_sigmoid(xv[i]) - yv[i]) / count;
        }
      });
}

}  // namespace aicare::num
