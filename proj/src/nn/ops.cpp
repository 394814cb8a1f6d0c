#include "tenrl/nn/ops.hpp"

#include <stdexcept>
#include <string>

namespace tenrl::nn {

namespace {

std::size_t batch_of(const DenseTensor& x) {
  if (x.order() < 1) throw std::invalid_argument("operation input has no batch mode");
  return x.extent(0);
}

bool any_requires(const Tape& t, std::initializer_list<VarId> ids) {
  for (auto id : ids)
    if (id != kNoVar && t.requires_grad(id)) return true;
  return false;
}

}  // namespace

VarId linear(Tape& t, VarId x, VarId weight, VarId bias) {
  const auto& xv = t.value(x);
  const auto& wv = t.value(weight);
  if (wv.order() != 2) throw std::invalid_argument("linear: weight must be (out, in)");
  const std::size_t batch = batch_of(xv);
  const std::size_t in = xv.size() / batch;
  const std::size_t out = wv.extent(0);
  if (wv.extent(1) != in) {
    throw std::invalid_argument("linear: input width " + std::to_string(in) + " does not match weight (" +
                                std::to_string(out) + ", " + std::to_string(wv.extent(1)) + ")");
  }
  DenseTensor y({batch, out});
  if (bias != kNoVar) {
    const auto& bv = t.value(bias);
    if (bv.size() != out) throw std::invalid_argument("linear: bias length mismatch");
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t o = 0; o < out; ++o) y[b * out + o] = bv[o];
  }
  kernels::gemm_nt(batch, out, in, xv.data().data(), wv.data().data(), y.data().data());

  return t.record(std::move(y), any_requires(t, {x, weight, bias}), [=](Tape& tp, VarId self) {
    const auto& g = tp.grad(self);
    if (tp.requires_grad(x)) {
      kernels::gemm_nn(batch, in, out, g.data().data(), tp.value(weight).data().data(),
                       tp.grad_buffer(x).data().data());
    }
    if (tp.requires_grad(weight)) {
      kernels::gemm_tn(out, in, batch, g.data().data(), tp.value(x).data().data(),
                       tp.grad_buffer(weight).data().data());
    }
    if (bias != kNoVar && tp.requires_grad(bias)) {
      auto& gb = tp.grad_buffer(bias);
      for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t o = 0; o < out; ++o) gb[o] += g[b * out + o];
    }
  });
}

namespace {

struct ConvGeometry {
  std::size_t batch, channels, height, width, out_channels, kernel, stride, out_h, out_w;
  std::size_t patch() const { return channels * kernel * kernel; }
  std::size_t positions() const { return out_h * out_w; }
};

// cols (C·k·k, Ho·Wo) for one sample.
void im2col(const ConvGeometry& g, const double* x, double* cols) {
  for (std::size_t c = 0; c < g.channels; ++c)
    for (std::size_t ki = 0; ki < g.kernel; ++ki)
      for (std::size_t kj = 0; kj < g.kernel; ++kj) {
        double* row = cols + ((c * g.kernel + ki) * g.kernel + kj) * g.positions();
        for (std::size_t oi = 0; oi < g.out_h; ++oi) {
          const double* src = x + (c * g.height + oi * g.stride + ki) * g.width + kj;
          for (std::size_t oj = 0; oj < g.out_w; ++oj) row[oi * g.out_w + oj] = src[oj * g.stride];
        }
      }
}

void col2im_add(const ConvGeometry& g, const double* cols, double* x) {
  for (std::size_t c = 0; c < g.channels; ++c)
    for (std::size_t ki = 0; ki < g.kernel; ++ki)
      for (std::size_t kj = 0; kj < g.kernel; ++kj) {
        const double* row = cols + ((c * g.kernel + ki) * g.kernel + kj) * g.positions();
        for (std::size_t oi = 0; oi < g.out_h; ++oi) {
          double* dst = x + (c * g.height + oi * g.stride + ki) * g.width + kj;
          for (std::size_t oj = 0; oj < g.out_w; ++oj) dst[oj * g.stride] += row[oi * g.out_w + oj];
        }
      }
}

}  // namespace

VarId conv2d(Tape& t, VarId x, VarId weight, VarId bias, std::size_t stride) {
  const auto& xv = t.value(x);
  const auto& wv = t.value(weight);
  if (xv.order() != 4 || wv.order() != 4) throw std::invalid_argument("conv2d: expects (B,C,H,W) input and (O,C,k,k) weight");
  if (wv.extent(1) != xv.extent(1)) throw std::invalid_argument("conv2d: channel mismatch");
  if (wv.extent(2) != wv.extent(3)) throw std::invalid_argument("conv2d: square kernels only");
  if (stride == 0) throw std::invalid_argument("conv2d: stride must be positive");
  ConvGeometry g{xv.extent(0), xv.extent(1), xv.extent(2), xv.extent(3), wv.extent(0), wv.extent(2), stride, 0, 0};
  if (g.height < g.kernel || g.width < g.kernel) throw std::invalid_argument("conv2d: kernel larger than input");
  g.out_h = (g.height - g.kernel) / stride + 1;
  g.out_w = (g.width - g.kernel) / stride + 1;

  DenseTensor y({g.batch, g.out_channels, g.out_h, g.out_w});
  std::vector<double> cols(g.patch() * g.positions());
  const std::size_t in_plane = g.channels * g.height * g.width;
  const std::size_t out_plane = g.out_channels * g.positions();
  for (std::size_t b = 0; b < g.batch; ++b) {
    im2col(g, xv.data().data() + b * in_plane, cols.data());
    double* yb = y.data().data() + b * out_plane;
    if (bias != kNoVar) {
      const auto& bv = t.value(bias);
      for (std::size_t o = 0; o < g.out_channels; ++o)
        for (std::size_t p = 0; p < g.positions(); ++p) yb[o * g.positions() + p] = bv[o];
    }
    kernels::gemm_nn(g.out_channels, g.positions(), g.patch(), wv.data().data(), cols.data(), yb);
  }

  return t.record(std::move(y), any_requires(t, {x, weight, bias}), [=](Tape& tp, VarId self) {
    const auto& gy = tp.grad(self);
    const auto& xval = tp.value(x);
    std::vector<double> c(g.patch() * g.positions());
    std::vector<double> dc(g.patch() * g.positions());
    const bool need_x = tp.requires_grad(x);
    const bool need_w = tp.requires_grad(weight);
    for (std::size_t b = 0; b < g.batch; ++b) {
      const double* gb = gy.data().data() + b * out_plane;
      if (need_w) {
        im2col(g, xval.data().data() + b * in_plane, c.data());
        kernels::gemm_nt(g.out_channels, g.patch(), g.positions(), gb, c.data(),
                         tp.grad_buffer(weight).data().data());
      }
      if (need_x) {
        std::fill(dc.begin(), dc.end(), 0.0);
        kernels::gemm_tn(g.patch(), g.positions(), g.out_channels, tp.value(weight).data().data(), gb, dc.data());
        col2im_add(g, dc.data(), tp.grad_buffer(x).data().data() + b * in_plane);
      }
      if (bias != kNoVar && tp.requires_grad(bias)) {
        auto& gbias = tp.grad_buffer(bias);
        for (std::size_t o = 0; o < g.out_channels; ++o)
          for (std::size_t p = 0; p < g.positions(); ++p) gbias[o] += gb[o * g.positions() + p];
      }
    }
  });
}

VarId relu(Tape& t, VarId x) {
  const auto& xv = t.value(x);
  DenseTensor y(xv.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = xv[i] > 0.0 ? xv[i] : 0.0;
  return t.record(std::move(y), t.requires_grad(x), [=](Tape& tp, VarId self) {
    const auto& g = tp.grad(self);
    const auto& in = tp.value(x);
    auto& gx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (in[i] > 0.0) gx[i] += g[i];
  });
}

VarId reshape(Tape& t, VarId x, Shape shape) {
  DenseTensor y = t.value(x).reshaped(std::move(shape));
  return t.record(std::move(y), t.requires_grad(x), [=](Tape& tp, VarId self) {
    const auto& g = tp.grad(self);
    auto& gx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
  });
}

VarId mode_product_transposed(Tape& t, VarId z, VarId factor, std::size_t mode) {
  const auto& zv = t.value(z);
  const auto& uv = t.value(factor);
  if (mode == 0 || mode >= zv.order()) throw std::invalid_argument("mode_product_transposed: invalid mode");
  if (uv.order() != 2 || uv.extent(0) != zv.extent(mode)) {
    throw std::invalid_argument("mode_product_transposed: factor rows must equal mode extent " +
                                std::to_string(zv.extent(mode)));
  }
  const std::size_t extent = uv.extent(0);
  const std::size_t rank = uv.extent(1);
  std::size_t left = 1;
  std::size_t right = 1;
  for (std::size_t k = 0; k < mode; ++k) left *= zv.extent(k);
  for (std::size_t k = mode + 1; k < zv.order(); ++k) right *= zv.extent(k);
  Shape out_shape = zv.shape();
  out_shape[mode] = rank;
  DenseTensor y(out_shape);
  for (std::size_t l = 0; l < left; ++l) {
    kernels::gemm_tn(rank, right, extent, uv.data().data(), zv.data().data() + l * extent * right,
                     y.data().data() + l * rank * right);
  }
  return t.record(std::move(y), any_requires(t, {z, factor}), [=](Tape& tp, VarId self) {
    const auto& g = tp.grad(self);
    const bool need_z = tp.requires_grad(z);
    const bool need_u = tp.requires_grad(factor);
    for (std::size_t l = 0; l < left; ++l) {
      const double* gl = g.data().data() + l * rank * right;
      if (need_z) {
        kernels::gemm_nn(extent, right, rank, tp.value(factor).data().data(), gl,
                         tp.grad_buffer(z).data().data() + l * extent * right);
      }
      if (need_u) {
        kernels::gemm_nt(extent, rank, right, tp.value(z).data().data() + l * extent * right, gl,
                         tp.grad_buffer(factor).data().data());
      }
    }
  });
}

VarId contract_core(Tape& t, VarId z, VarId core) {
  const auto& zv = t.value(z);
  const auto& cv = t.value(core);
  const std::size_t batch = batch_of(zv);
  const std::size_t inner = zv.size() / batch;
  if (cv.order() != zv.order()) throw std::invalid_argument("contract_core: core must have one mode per input mode plus output");
  for (std::size_t k = 1; k < zv.order(); ++k) {
    if (zv.extent(k) != cv.extent(k - 1)) throw std::invalid_argument("contract_core: rank mismatch at mode " + std::to_string(k));
  }
  const std::size_t out = cv.extent(cv.order() - 1);
  DenseTensor y({batch, out});
  kernels::gemm_nn(batch, out, inner, zv.data().data(), cv.data().data(), y.data().data());
  return t.record(std::move(y), any_requires(t, {z, core}), [=](Tape& tp, VarId self) {
    const auto& g = tp.grad(self);
    if (tp.requires_grad(z)) {
      kernels::gemm_nt(batch, inner, out, g.data().data(), tp.value(core).data().data(),
                       tp.grad_buffer(z).data().data());
    }
    if (tp.requires_grad(core)) {
      kernels::gemm_tn(inner, out, batch, tp.value(z).data().data(), g.data().data(),
                       tp.grad_buffer(core).data().data());
    }
  });
}

VarId dueling_combine(Tape& t, VarId value, VarId advantage, std::size_t actions, std::size_t atoms) {
  const auto& vv = t.value(value);
  const auto& av = t.value(advantage);
  const std::size_t batch = batch_of(vv);
  if (vv.size() != batch * atoms || av.size() != batch * actions * atoms || batch_of(av) != batch) {
    throw std::invalid_argument("dueling_combine: value/advantage shapes do not match actions and atoms");
  }
  Shape shape = atoms == 1 ? Shape{batch, actions} : Shape{batch, actions, atoms};
  DenseTensor q(shape);
  const double inv_a = 1.0 / static_cast<double>(actions);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t z = 0; z < atoms; ++z) {
      double mean = 0.0;
      for (std::size_t a = 0; a < actions; ++a) mean += av[(b * actions + a) * atoms + z];
      mean *= inv_a;
      for (std::size_t a = 0; a < actions; ++a) {
        const std::size_t i = (b * actions + a) * atoms + z;
        q[i] = vv[b * atoms + z] + (av[i] - mean);
      }
    }
  return t.record(std::move(q), any_requires(t, {value, advantage}), [=](Tape& tp, VarId self) {
    const auto& g = tp.grad(self);
    const bool need_v = tp.requires_grad(value);
    const bool need_a = tp.requires_grad(advantage);
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t z = 0; z < atoms; ++z) {
        double total = 0.0;
        for (std::size_t a = 0; a < actions; ++a) total += g[(b * actions + a) * atoms + z];
        if (need_v) tp.grad_buffer(value)[b * atoms + z] += total;
        if (need_a) {
          auto& ga = tp.grad_buffer(advantage);
          for (std::size_t a = 0; a < actions; ++a) {
            const std::size_t i = (b * actions + a) * atoms + z;
            ga[i] += g[i] - total * inv_a;
          }
        }
      }
  });
}

VarId action_view(Tape& t, VarId x, std::size_t actions, std::size_t atoms) {
  const std::size_t batch = batch_of(t.value(x));
  return reshape(t, x, atoms == 1 ? Shape{batch, actions} : Shape{batch, actions, atoms});
}

VarId sum_all(Tape& t, VarId x) {
  double s = 0.0;
  for (double v : t.value(x).data()) s += v;
  return t.record(DenseTensor::scalar(s), t.requires_grad(x), [=](Tape& tp, VarId self) {
    const double g = tp.grad(self)[0];
    auto& gx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g;
  });
}

}  // namespace tenrl::nn
