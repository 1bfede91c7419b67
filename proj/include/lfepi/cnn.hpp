#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lfepi/epi.hpp"

namespace lfepi {

/// One convolution layer; weights are (out, in, kh, kw) row-major — the
/// canonical order used by the weights file. Spatial size is preserved by
/// zero padding.
struct ConvLayer {
  int out_ch = 0, in_ch = 0, kh = 0, kw = 0;
  std::vector<double> w;
  std::vector<double> b;

  ConvLayer() = default;
  ConvLayer(int oc, int ic, int k_h, int k_w)
      : out_ch(oc), in_ch(ic), kh(k_h), kw(k_w),
        w(static_cast<size_t>(oc) * ic * k_h * k_w, 0.0), b(oc, 0.0) {}

  size_t widx(int oc, int ic, int ky, int kx) const {
    return ((static_cast<size_t>(oc) * in_ch + ic) * kh + ky) * kw + kx;
  }
  size_t n_params() const { return w.size() + b.size(); }
};

/// The residual restoration network: feature extraction (9x9), non-linear
/// mapping (5x5) and detail reconstruction (5x5), with ReLU after the first
/// two layers only and no activation after the last.
struct Network {
  ConvLayer l1, l2, l3;

  Network() : Network(64, 32) {}
  Network(int f1, int f2) : l1(f1, 1, 9, 9), l2(f2, f1, 5, 5), l3(1, f2, 5, 5) {}

  size_t n_params() const { return l1.n_params() + l2.n_params() + l3.n_params(); }

  bool is_zero() const {
    auto allz = [](const std::vector<double>& v) {
      for (double x : v)
        if (x != 0.0) return false;
      return true;
    };
    return allz(l1.w) && allz(l1.b) && allz(l2.w) && allz(l2.b) && allz(l3.w) && allz(l3.b);
  }
};

/// Deterministic Gaussian source (Box-Muller over mt19937_64 output);
/// identical streams for identical seeds on every platform.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : rng_(seed) {}

  double uniform01() {  // [0,1)
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0,1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t raw() { return rng_(); }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Gaussian-initialized filters (zero mean, init_std), zero biases.
inline Network init_network(std::uint64_t seed, double init_std, int f1 = 64, int f2 = 32) {
  if (!(init_std > 0.0)) throw std::invalid_argument("init_network: init_std must be positive");
  Network net(f1, f2);
  GaussianRng g(seed);
  for (auto* layer : {&net.l1, &net.l2, &net.l3})
    for (double& w : layer->w) w = init_std * g.normal();
  return net;
}

namespace detail {

/// Channels-last activation block: (y, x, c) row-major, so per-pixel channel
/// vectors are contiguous and the conv inner loops stream over them.
struct TensorCL {
  int h = 0, w = 0, ch = 0;
  std::vector<double> v;

  TensorCL() = default;
  TensorCL(int hh, int ww, int c)
      : h(hh), w(ww), ch(c), v(static_cast<size_t>(hh) * ww * c, 0.0) {}

  double* px(int y, int x) { return v.data() + (static_cast<size_t>(y) * w + x) * ch; }
  const double* px(int y, int x) const {
    return v.data() + (static_cast<size_t>(y) * w + x) * ch;
  }
};

/// Fixed-order blocked dot product: deterministic for a given build, wide
/// enough for the vectorizer.
inline double dot_cl(const double* a, const double* b, int n) {
  double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  int i = 0;
  for (; i + 8 <= n; i += 8)
    for (int j = 0; j < 8; ++j) acc[j] += a[i + j] * b[i + j];
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return (((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]))) +
         tail;
}

inline void axpy_cl(double* dst, const double* src, double s, int n) {
  for (int i = 0; i < n; ++i) dst[i] += s * src[i];
}

inline void ensure_shape(TensorCL& t, int h, int w, int ch) {
  if (t.h != h || t.w != w || t.ch != ch) t = TensorCL(h, w, ch);
}

/// First layer weights reordered to (ky, kx, oc); later layers to
/// (oc, ky, kx, ic). Biases stay as-is.
struct PackedNet {
  int f1 = 0, f2 = 0;
  int k1h = 0, k1w = 0, k2h = 0, k2w = 0, k3h = 0, k3w = 0;
  std::vector<double> w1;  // (ky, kx, oc)
  std::vector<double> w2;  // (oc, ky, kx, ic)
  std::vector<double> w3;  // (1, ky, kx, ic)
  const std::vector<double>*b1, *b2, *b3;

  explicit PackedNet(const Network& net)
      : f1(net.l1.out_ch), f2(net.l2.out_ch),
        k1h(net.l1.kh), k1w(net.l1.kw), k2h(net.l2.kh), k2w(net.l2.kw),
        k3h(net.l3.kh), k3w(net.l3.kw),
        w1(net.l1.w.size()), w2(net.l2.w.size()), w3(net.l3.w.size()),
        b1(&net.l1.b), b2(&net.l2.b), b3(&net.l3.b) {
    for (int oc = 0; oc < net.l1.out_ch; ++oc)
      for (int ky = 0; ky < k1h; ++ky)
        for (int kx = 0; kx < k1w; ++kx)
          w1[(static_cast<size_t>(ky) * k1w + kx) * f1 + oc] = net.l1.w[net.l1.widx(oc, 0, ky, kx)];
    auto pack_ocin = [](const ConvLayer& L, std::vector<double>& dst) {
      for (int oc = 0; oc < L.out_ch; ++oc)
        for (int ic = 0; ic < L.in_ch; ++ic)
          for (int ky = 0; ky < L.kh; ++ky)
            for (int kx = 0; kx < L.kw; ++kx)
              dst[((static_cast<size_t>(oc) * L.kh + ky) * L.kw + kx) * L.in_ch + ic] =
                  L.w[L.widx(oc, ic, ky, kx)];
    };
    pack_ocin(net.l2, w2);
    pack_ocin(net.l3, w3);
  }
};

/// conv for in_ch == 1: scatter each input sample through the (ky,kx,oc)
/// weight rows. Zero padding == skipping out-of-range taps.
inline void conv1_forward(const TensorCL& in, const PackedNet& p, TensorCL& out) {
  const int h = in.h, w = in.w, oc = p.f1;
  const int ph = p.k1h / 2, pw = p.k1w / 2;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double* dst = out.px(y, x);
      for (int c = 0; c < oc; ++c) dst[c] = (*p.b1)[c];
      for (int ky = 0; ky < p.k1h; ++ky) {
        const int sy = y + ky - ph;
        if (sy < 0 || sy >= h) continue;
        for (int kx = 0; kx < p.k1w; ++kx) {
          const int sx = x + kx - pw;
          if (sx < 0 || sx >= w) continue;
          axpy_cl(dst, p.w1.data() + (static_cast<size_t>(ky) * p.k1w + kx) * oc,
                  in.px(sy, sx)[0], oc);
        }
      }
    }
  }
}

/// conv with contiguous channel dot products; weights (oc, ky, kx, ic).
inline void conv_forward_cl(const TensorCL& in, const std::vector<double>& wp,
                            const std::vector<double>& bias, int out_ch, int kh, int kw,
                            TensorCL& out) {
  const int h = in.h, w = in.w, ic = in.ch;
  const int ph = kh / 2, pw = kw / 2;
  const size_t ocstride = static_cast<size_t>(kh) * kw * ic;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double* dst = out.px(y, x);
      for (int c = 0; c < out_ch; ++c) dst[c] = bias[c];
      for (int ky = 0; ky < kh; ++ky) {
        const int sy = y + ky - ph;
        if (sy < 0 || sy >= h) continue;
        for (int kx = 0; kx < kw; ++kx) {
          const int sx = x + kx - pw;
          if (sx < 0 || sx >= w) continue;
          const double* src = in.px(sy, sx);
          const double* wrow = wp.data() + (static_cast<size_t>(ky) * kw + kx) * ic;
          for (int c = 0; c < out_ch; ++c) dst[c] += dot_cl(wrow + c * ocstride, src, ic);
        }
      }
    }
  }
}

inline void relu_cl(const TensorCL& z, TensorCL& a) {
  a = z;
  for (double& x : a.v) x = x > 0.0 ? x : 0.0;
}

/// Gradients in the packed layouts; unpacked into ParamBuffers afterwards.
struct PackedGrads {
  std::vector<double> w1, b1, w2, b2, w3, b3;

  explicit PackedGrads(const PackedNet& p)
      : w1(p.w1.size(), 0.0), b1(p.f1, 0.0), w2(p.w2.size(), 0.0), b2(p.f2, 0.0),
        w3(p.w3.size(), 0.0), b3(1, 0.0) {}
};

/// dIn accumulation (transposed conv) plus dW/db for one (oc,ky,kx,ic)
/// packed layer. `din` may be null when the input gradient is not needed.
inline void conv_backward_cl(const TensorCL& in, const TensorCL& dout,
                             const std::vector<double>& wp, int out_ch, int kh, int kw,
                             TensorCL* din, std::vector<double>& dwp, std::vector<double>& db) {
  const int h = in.h, w = in.w, ic = in.ch;
  const int ph = kh / 2, pw = kw / 2;
  const size_t ocstride = static_cast<size_t>(kh) * kw * ic;
  if (din) std::fill(din->v.begin(), din->v.end(), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double* dg = dout.px(y, x);
      for (int c = 0; c < out_ch; ++c) db[c] += dg[c];
      for (int ky = 0; ky < kh; ++ky) {
        const int sy = y + ky - ph;
        if (sy < 0 || sy >= h) continue;
        for (int kx = 0; kx < kw; ++kx) {
          const int sx = x + kx - pw;
          if (sx < 0 || sx >= w) continue;
          const double* src = in.px(sy, sx);
          double* dsrc = din ? din->px(sy, sx) : nullptr;
          const size_t tap = (static_cast<size_t>(ky) * kw + kx) * ic;
          for (int c = 0; c < out_ch; ++c) {
            const double g = dg[c];
            if (g == 0.0) continue;
            axpy_cl(dwp.data() + tap + c * ocstride, src, g, ic);
            if (dsrc) axpy_cl(dsrc, wp.data() + tap + c * ocstride, g, ic);
          }
        }
      }
    }
  }
}

/// Backward pass of the in_ch == 1 first layer (input gradient not needed).
inline void conv1_backward(const TensorCL& in, const TensorCL& dout, const PackedNet& p,
                           std::vector<double>& dw1, std::vector<double>& db1) {
  const int h = in.h, w = in.w, oc = p.f1;
  const int ph = p.k1h / 2, pw = p.k1w / 2;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double* dg = dout.px(y, x);
      for (int c = 0; c < oc; ++c) db1[c] += dg[c];
      for (int ky = 0; ky < p.k1h; ++ky) {
        const int sy = y + ky - ph;
        if (sy < 0 || sy >= h) continue;
        for (int kx = 0; kx < p.k1w; ++kx) {
          const int sx = x + kx - pw;
          if (sx < 0 || sx >= w) continue;
          axpy_cl(dw1.data() + (static_cast<size_t>(ky) * p.k1w + kx) * oc, dg, in.px(sy, sx)[0],
                  oc);
        }
      }
    }
  }
}

}  // namespace detail

/// Pre-activation and post-activation maps kept for backprop.
struct Activations {
  detail::TensorCL x0;       // network input, single channel
  detail::TensorCL z1, a1;   // layer 1 pre/post ReLU
  detail::TensorCL z2, a2;   // layer 2 pre/post ReLU
  detail::TensorCL z3;       // network output (predicted residual)
};

/// Runs conv9 -> ReLU -> conv5 -> ReLU -> conv5 on a single-channel plane.
/// Output shape equals input shape (zero padding).
inline Image2D forward(const Network& net, const Image2D& input, Activations* acts = nullptr,
                       const detail::PackedNet* packed = nullptr) {
  if (input.rows < 1 || input.cols < 1) throw std::invalid_argument("forward: empty input");
  std::optional<detail::PackedNet> local_pack;
  if (!packed) local_pack.emplace(net);
  const detail::PackedNet& p = packed ? *packed : *local_pack;
  Activations local;
  Activations& A = acts ? *acts : local;
  detail::ensure_shape(A.x0, input.rows, input.cols, 1);
  std::copy(input.data.begin(), input.data.end(), A.x0.v.begin());
  detail::ensure_shape(A.z1, input.rows, input.cols, p.f1);
  detail::conv1_forward(A.x0, p, A.z1);
  detail::relu_cl(A.z1, A.a1);
  detail::ensure_shape(A.z2, input.rows, input.cols, p.f2);
  detail::conv_forward_cl(A.a1, p.w2, *p.b2, p.f2, p.k2h, p.k2w, A.z2);
  detail::relu_cl(A.z2, A.a2);
  detail::ensure_shape(A.z3, input.rows, input.cols, 1);
  detail::conv_forward_cl(A.a2, p.w3, *p.b3, 1, p.k3h, p.k3w, A.z3);
  Image2D out(input.rows, input.cols);
  std::copy(A.z3.v.begin(), A.z3.v.end(), out.data.begin());
  return out;
}

inline EPI forward(const Network& net, const EPI& epi) {
  Image2D in(epi.n_views, epi.width);
  in.data = epi.pix;
  const Image2D r = forward(net, in);
  EPI out(epi.n_views, epi.width);
  out.max_disparity_px = epi.max_disparity_px;
  out.pix = r.data;
  return out;
}

/// Residual-learning output: input plus the predicted detail. No clamping
/// here; clamping happens only at final image export.
inline Image2D restore(const Network& net, const Image2D& input) {
  Image2D r = forward(net, input);
  for (size_t i = 0; i < r.data.size(); ++i) r.data[i] += input.data[i];
  return r;
}

inline EPI restore(const Network& net, const EPI& epi) {
  EPI r = forward(net, epi);
  for (size_t i = 0; i < r.pix.size(); ++i) r.pix[i] += epi.pix[i];
  return r;
}

/// Parameter-shaped buffers (gradients, momentum velocity) in the canonical
/// (out, in, kh, kw) weight order.
struct ParamBuffers {
  std::vector<double> w1, b1, w2, b2, w3, b3;

  ParamBuffers() = default;
  explicit ParamBuffers(const Network& net)
      : w1(net.l1.w.size(), 0.0), b1(net.l1.b.size(), 0.0),
        w2(net.l2.w.size(), 0.0), b2(net.l2.b.size(), 0.0),
        w3(net.l3.w.size(), 0.0), b3(net.l3.b.size(), 0.0) {}

  void zero() {
    for (auto* v : {&w1, &b1, &w2, &b2, &w3, &b3}) std::fill(v->begin(), v->end(), 0.0);
  }

  void add(const ParamBuffers& o) {
    auto axpy = [](std::vector<double>& a, const std::vector<double>& b) {
      for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    };
    axpy(w1, o.w1); axpy(b1, o.b1);
    axpy(w2, o.w2); axpy(b2, o.b2);
    axpy(w3, o.w3); axpy(b3, o.b3);
  }

  void scale(double s) {
    for (auto* v : {&w1, &b1, &w2, &b2, &w3, &b3})
      for (double& x : *v) x *= s;
  }
};

namespace detail {

/// Converts packed-layout gradients back to the canonical parameter order.
inline void unpack_grads(const Network& net, const PackedNet& p, const PackedGrads& pg,
                         ParamBuffers& g) {
  for (int oc = 0; oc < net.l1.out_ch; ++oc) {
    for (int ky = 0; ky < p.k1h; ++ky)
      for (int kx = 0; kx < p.k1w; ++kx)
        g.w1[net.l1.widx(oc, 0, ky, kx)] +=
            pg.w1[(static_cast<size_t>(ky) * p.k1w + kx) * p.f1 + oc];
    g.b1[oc] += pg.b1[oc];
  }
  auto unpack_ocin = [](const ConvLayer& L, const std::vector<double>& src,
                        std::vector<double>& dst) {
    for (int oc = 0; oc < L.out_ch; ++oc)
      for (int ic = 0; ic < L.in_ch; ++ic)
        for (int ky = 0; ky < L.kh; ++ky)
          for (int kx = 0; kx < L.kw; ++kx)
            dst[L.widx(oc, ic, ky, kx)] +=
                src[((static_cast<size_t>(oc) * L.kh + ky) * L.kw + kx) * L.in_ch + ic];
  };
  unpack_ocin(net.l2, pg.w2, g.w2);
  unpack_ocin(net.l3, pg.w3, g.w3);
  for (int c = 0; c < net.l2.out_ch; ++c) g.b2[c] += pg.b2[c];
  g.b3[0] += pg.b3[0];
}

}  // namespace detail

/// A training example: blurred+upsampled EPI tile and its residual target.
struct PatchPair {
  Image2D input;
  Image2D target_residual;
};

namespace detail {

/// Accumulates one example's gradients into packed buffers; scratch tensors
/// are caller-owned so chunked training can reuse them.
inline void backprop_packed(const PackedNet& p, const Activations& A, const TensorCL& dout,
                            TensorCL& da2, TensorCL& da1, PackedGrads& pg) {
  ensure_shape(da2, dout.h, dout.w, p.f2);
  conv_backward_cl(A.a2, dout, p.w3, 1, p.k3h, p.k3w, &da2, pg.w3, pg.b3);
  for (size_t i = 0; i < da2.v.size(); ++i)
    if (A.z2.v[i] <= 0.0) da2.v[i] = 0.0;
  ensure_shape(da1, dout.h, dout.w, p.f1);
  conv_backward_cl(A.a1, da2, p.w2, p.f2, p.k2h, p.k2w, &da1, pg.w2, pg.b2);
  for (size_t i = 0; i < da1.v.size(); ++i)
    if (A.z1.v[i] <= 0.0) da1.v[i] = 0.0;
  conv1_backward(A.x0, da1, p, pg.w1, pg.b1);
}

}  // namespace detail

/// Backprop for one example given d(loss)/d(output); gradients accumulate
/// into g in canonical order.
inline void backprop_into(const Network& net, const detail::PackedNet& p, const Activations& A,
                          const detail::TensorCL& dout, ParamBuffers& g) {
  detail::PackedGrads pg(p);
  detail::TensorCL da2, da1;
  detail::backprop_packed(p, A, dout, da2, da1, pg);
  detail::unpack_grads(net, p, pg, g);
}

/// Loss per the training objective: mean over the batch of the summed
/// squared residual error of each patch. Gradients are exact reverse-mode
/// derivatives; per-item gradients are reduced in a fixed order, so the
/// result is identical for any thread count.
double batch_loss_and_gradients(const Network& net, const std::vector<const PatchPair*>& batch,
                                ParamBuffers& grads, int threads);

inline std::pair<double, ParamBuffers> loss_and_gradients(const Network& net,
                                                          const std::vector<PatchPair>& batch,
                                                          int threads = 1) {
  if (batch.empty()) throw std::invalid_argument("loss_and_gradients: empty batch");
  std::vector<const PatchPair*> ptrs;
  ptrs.reserve(batch.size());
  for (const auto& p : batch) ptrs.push_back(&p);
  ParamBuffers g(net);
  const double loss = batch_loss_and_gradients(net, ptrs, g, threads);
  return {loss, std::move(g)};
}

/// Momentum state and bookkeeping carried across sgd steps.
struct TrainState {
  ParamBuffers velocity;
  long iteration = 0;
  std::vector<std::pair<long, double>> loss_history;  // (iteration, batch loss)

  TrainState() = default;
  explicit TrainState(const Network& net) : velocity(net) {}
};

/// v <- momentum*v - lr*g;  w <- w + v
inline void sgd_step(Network& net, const ParamBuffers& grads, TrainState& state, double lr,
                     double momentum) {
  if (!(lr > 0.0)) throw std::invalid_argument("sgd_step: lr must be positive");
  auto upd = [&](std::vector<double>& w, std::vector<double>& v, const std::vector<double>& g) {
    if (w.size() != g.size() || v.size() != g.size())
      throw std::invalid_argument("sgd_step: shape mismatch");
    for (size_t i = 0; i < w.size(); ++i) {
      v[i] = momentum * v[i] - lr * g[i];
      w[i] += v[i];
    }
  };
  upd(net.l1.w, state.velocity.w1, grads.w1);
  upd(net.l1.b, state.velocity.b1, grads.b1);
  upd(net.l2.w, state.velocity.w2, grads.w2);
  upd(net.l2.b, state.velocity.b2, grads.b2);
  upd(net.l3.w, state.velocity.w3, grads.w3);
  upd(net.l3.b, state.velocity.b3, grads.b3);
  state.iteration += 1;
}

}  // namespace lfepi

#include "lfepi/parallel.hpp"

namespace lfepi {

inline double batch_loss_and_gradients(const Network& net,
                                       const std::vector<const PatchPair*>& batch,
                                       ParamBuffers& grads, int threads) {
  const size_t n = batch.size();
  const detail::PackedNet packed(net);
  // Gradients accumulate per fixed-size chunk and the chunks are reduced in
  // order, so the result does not depend on the thread count.
  constexpr size_t kChunk = 8;
  const size_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<detail::PackedGrads> chunk_grads(n_chunks, detail::PackedGrads(packed));
  std::vector<double> chunk_loss(n_chunks, 0.0);
  parallel_for(n_chunks, threads, [&](size_t ci) {
    Activations A;
    detail::TensorCL dout, da1, da2;
    const size_t lo = ci * kChunk, hi = std::min(n, lo + kChunk);
    for (size_t i = lo; i < hi; ++i) {
      const PatchPair& p = *batch[i];
      const Image2D out = forward(net, p.input, &A, &packed);
      if (!out.same_shape(p.target_residual))
        throw std::invalid_argument("loss_and_gradients: patch shape mismatch");
      detail::ensure_shape(dout, out.rows, out.cols, 1);
      double l = 0.0;
      const double scale = 2.0 / static_cast<double>(n);
      for (size_t k = 0; k < out.data.size(); ++k) {
        const double diff = out.data[k] - p.target_residual.data[k];
        l += diff * diff;
        dout.v[k] = scale * diff;
      }
      chunk_loss[ci] += l;
      detail::backprop_packed(packed, A, dout, da2, da1, chunk_grads[ci]);
    }
  });
  grads.zero();
  double loss = 0.0;
  for (size_t ci = 0; ci < n_chunks; ++ci) {
    detail::unpack_grads(net, packed, chunk_grads[ci], grads);
    loss += chunk_loss[ci];
  }
  return loss / static_cast<double>(n);
}

}  // namespace lfepi
