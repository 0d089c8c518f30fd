#pragma once

// Straight-line scalar re-implementation of the model equations, written
// independently of the tensor graph. Loops only; no tape, no broadcasting.

#include <cmath>
#include <vector>

#include "aicare/ehr/preprocess.hpp"
#include "aicare/model/model.hpp"

namespace aicare::testing {

struct OracleOutputs {
  std::vector<double> logits;
  std::vector<std::vector<double>> importance;
  /// heads[t][a] = flattened [channel][i] output of head a at visit t.
  std::vector<std::vector<std::vector<double>>> heads;
};

inline OracleOutputs oracle_forward(const model::Model& m, const ehr::PatientTensor& pt) {
  const auto& P = m.params;
  auto w = [&](const char* name) { return P.at(name).data(); };
  const std::size_t H = m.hyper.hidden_dim;
  const std::size_t nh = m.hyper.n_heads;
  const std::size_t dk = H / nh;
  const std::size_t D = m.hyper.dynamic_dim;
  const std::size_t S = m.hyper.static_dim;
  const std::size_t C = D + S;
  const std::size_t T = pt.n_visits;
  auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };

  // emb[t][c][k]
  std::vector<std::vector<std::vector<double>>> emb(T, std::vector<std::vector<double>>(C, std::vector<double>(H)));
  const auto wx_rz = w("gru_wx_rz");
  const auto wx_n = w("gru_wx_n");
  const auto wh_rz = w("gru_wh_rz");
  const auto wh_n = w("gru_wh_n");
  const auto b_rz = w("gru_b_rz");
  const auto b_n = w("gru_b_n");
  for (std::size_t j = 0; j < D; ++j) {
    std::vector<double> h(H, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
      const double x[2] = {pt.z(t, j), pt.gaps[t]};
      std::vector<double> r(H), zg(H), n(H);
      for (std::size_t k = 0; k < H; ++k) {
        double ar = b_rz[j * 2 * H + k];
        double az = b_rz[j * 2 * H + H + k];
        for (std::size_t i = 0; i < 2; ++i) {
          ar += x[i] * wx_rz[(j * 2 + i) * 2 * H + k];
          az += x[i] * wx_rz[(j * 2 + i) * 2 * H + H + k];
        }
        for (std::size_t i = 0; i < H; ++i) {
          ar += h[i] * wh_rz[(j * H + i) * 2 * H + k];
          az += h[i] * wh_rz[(j * H + i) * 2 * H + H + k];
        }
        r[k] = sig(ar);
        zg[k] = sig(az);
      }
      for (std::size_t k = 0; k < H; ++k) {
        double an = b_n[j * H + k];
        for (std::size_t i = 0; i < 2; ++i) an += x[i] * wx_n[(j * 2 + i) * H + k];
        for (std::size_t i = 0; i < H; ++i) an += r[i] * h[i] * wh_n[(j * H + i) * H + k];
        n[k] = std::tanh(an);
      }
      for (std::size_t k = 0; k < H; ++k) h[k] = (1.0 - zg[k]) * h[k] + zg[k] * n[k];
      emb[t][j] = h;
    }
  }
  std::vector<double> ctx(H, 0.0);
  if (S > 0) {
    const auto st_w = w("st_w");
    const auto st_b = w("st_b");
    for (std::size_t j = 0; j < S; ++j) {
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t k = 0; k < H; ++k) {
          emb[t][D + j][k] = std::tanh(pt.static_z[j] * st_w[j * H + k] + st_b[j * H + k]);
        }
      }
    }
    const auto mlp_w = w("mlp_w");
    const auto mlp_b = w("mlp_b");
    const auto wps = w("wps");
    std::vector<double> mv(H);
    for (std::size_t k = 0; k < H; ++k) {
      double a = mlp_b[k];
      for (std::size_t j = 0; j < S; ++j) a += pt.static_z[j] * mlp_w[j * H + k];
      mv[k] = std::tanh(a);
    }
    for (std::size_t k = 0; k < H; ++k) {
      for (std::size_t i = 0; i < H; ++i) ctx[k] += mv[i] * wps[i * H + k];
    }
  }

  auto matvec = [&](const std::vector<double>& x, std::span<const double> W) {
    std::vector<double> y(H, 0.0);
    for (std::size_t k = 0; k < H; ++k) {
      for (std::size_t i = 0; i < H; ++i) y[k] += x[i] * W[i * H + k];
    }
    return y;
  };

  OracleOutputs out;
  for (std::size_t t = 0; t < T; ++t) {
    const auto& E = emb[t];
    std::vector<std::vector<double>> Q(C), K(C), V(C);
    for (std::size_t c = 0; c < C; ++c) {
      Q[c] = matvec(E[c], w("wq"));
      K[c] = matvec(E[c], w("wk"));
      V[c] = matvec(E[c], w("wv"));
    }
    std::vector<std::vector<double>> merged(C, std::vector<double>(H, 0.0));
    std::vector<std::vector<double>> head_vecs(nh);
    for (std::size_t a = 0; a < nh; ++a) {
      for (std::size_t c = 0; c < C; ++c) {
        std::vector<double> sc(C);
        double mx = -1e300;
        for (std::size_t c2 = 0; c2 < C; ++c2) {
          double s = 0;
          for (std::size_t i = a * dk; i < (a + 1) * dk; ++i) s += Q[c][i] * K[c2][i];
          sc[c2] = s / std::sqrt(double(dk));
          mx = std::max(mx, sc[c2]);
        }
        double zsum = 0;
        for (auto& s : sc) zsum += (s = std::exp(s - mx));
        for (std::size_t i = a * dk; i < (a + 1) * dk; ++i) {
          double o = 0;
          for (std::size_t c2 = 0; c2 < C; ++c2) o += sc[c2] / zsum * V[c2][i];
          merged[c][i] = o;
          head_vecs[a].push_back(o);
        }
      }
    }
    out.heads.push_back(head_vecs);
    std::vector<std::vector<double>> Z(C);
    const auto bo = w("bo");
    for (std::size_t c = 0; c < C; ++c) {
      const auto proj = matvec(merged[c], w("wo"));
      Z[c].resize(H);
      for (std::size_t k = 0; k < H; ++k) Z[c][k] = E[c][k] + proj[k] + bo[k];
    }
    std::vector<double> zbar(H, 0.0);
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t k = 0; k < H; ++k) zbar[k] += Z[c][k] / double(C);
    }
    auto q = matvec(zbar, w("wpq"));
    const auto bp = w("bp");
    std::vector<double> p(H);
    for (std::size_t k = 0; k < H; ++k) p[k] = std::tanh(q[k] + ctx[k] + bp[k]);
    std::vector<double> alpha(C);
    double mx = -1e300;
    for (std::size_t c = 0; c < C; ++c) {
      const auto key = matvec(Z[c], w("wtk"));
      double s = 0;
      for (std::size_t k = 0; k < H; ++k) s += key[k] * p[k];
      alpha[c] = s / std::sqrt(double(H));
      mx = std::max(mx, alpha[c]);
    }
    double asum = 0;
    for (auto& a : alpha) asum += (a = std::exp(a - mx));
    for (auto& a : alpha) a /= asum;
    std::vector<double> r(H, 0.0);
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t k = 0; k < H; ++k) r[k] += alpha[c] * Z[c][k];
    }
    const auto hidden = matvec(r, w("wo1"));
    const auto bo1 = w("bo1");
    const auto w_out = w("w_out");
    double logit = w("b_out")[0];
    for (std::size_t k = 0; k < H; ++k) logit += std::tanh(hidden[k] + bo1[k]) * w_out[k];
    out.logits.push_back(logit);
    out.importance.push_back(alpha);
  }
  return out;
}

}  // namespace aicare::testing
