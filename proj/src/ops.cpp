// Copyright 2026 The JMIE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "jmie/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jmie/error.hpp"

namespace jmie::ad {
namespace {

[[noreturn]] void shape_error(const std::string& op, const std::string& what) {
  throw Error(ErrorCode::kShapeMismatch, op + ": " + what);
}

void require_rank(const std::string& op, const Tensor& t, std::size_t rank) {
  if (t.rank() != rank) {
    shape_error(op, "expected rank " + std::to_string(rank) + ", got " +
                        shape_string(t.shape()));
  }
}

void require_same(const std::string& op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    shape_error(op, shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

void require_mask(const std::string& op, Mask mask, std::size_t n) {
  if (!mask.empty() && mask.size() != n) {
    shape_error(op, "mask has " + std::to_string(mask.size()) +
                        " entries, expected " + std::to_string(n));
  }
}

Tape::Node& node_of(Tape& tape, std::size_t id) { return tape.node(id); }

// Views a vector or matrix as (outer x len x inner) around one axis.
struct AxisView {
  std::size_t outer = 1;
  std::size_t len = 1;
  std::size_t inner = 1;

  AxisView(const Shape& shape, std::size_t axis) {
    if (axis >= shape.size()) shape_error("axis", "axis out of range");
    for (std::size_t d = 0; d < shape.size(); ++d) {
      if (d < axis) outer *= shape[d];
      else if (d == axis) len = shape[d];
      else inner *= shape[d];
    }
  }
  std::size_t index(std::size_t o, std::size_t l, std::size_t i) const {
    return (o * len + l) * inner + i;
  }
};

Shape drop_axis(const Shape& shape, std::size_t axis) {
  Shape out;
  for (std::size_t d = 0; d < shape.size(); ++d) {
    if (d != axis) out.push_back(shape[d]);
  }
  return out;
}

bool active(Mask mask, std::size_t i) { return mask.empty() || mask[i] != 0.0; }

template <typename F>
Tensor unary(const Tensor& x, F&& f, Tape::BackwardFn bw) {
  const auto in = x.data();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
  return x.tape().record(x.shape(), std::move(out), {x}, std::move(bw));
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank("matmul", a, 2);
  require_rank("matmul", b, 2);
  const std::size_t m = a.shape()[0];
  const std::size_t k = a.shape()[1];
  const std::size_t n = b.shape()[1];
  if (b.shape()[0] != k) {
    shape_error("matmul", shape_string(a.shape()) + " @ " + shape_string(b.shape()));
  }
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = bv.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  const std::size_t ia = a.id();
  const std::size_t ib = b.id();
  return a.tape().record({m, n}, std::move(out), {a, b},
                         [ia, ib, m, k, n](Tape& t, std::size_t self) {
    auto& na = node_of(t, ia);
    auto& nb = node_of(t, ib);
    const auto g = node_of(t, self).grads();
    const auto av = na.values();
    const auto bv = nb.values();
    if (na.requires_grad) {
      auto ga = na.grads();
      for (std::size_t i = 0; i < m; ++i) {
        const double* grow = g.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const double* brow = bv.data() + p * n;
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
          ga[i * k + p] += acc;
        }
      }
    }
    if (nb.requires_grad) {
      auto gb = nb.grads();
      for (std::size_t i = 0; i < m; ++i) {
        const double* grow = g.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = av[i * k + p];
          if (aip == 0.0) continue;
          double* gbrow = gb.data() + p * n;
          for (std::size_t j = 0; j < n; ++j) gbrow[j] += aip * grow[j];
        }
      }
    }
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  const bool bias = a.rank() == 2 && b.rank() == 1 && a.shape()[1] == b.shape()[0];
  if (!bias) require_same("add", a, b);
  const auto av = a.data();
  const auto bv = b.data();
  const std::size_t n = av.size();
  const std::size_t width = bv.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = av[i] + bv[bias ? i % width : i];
  const std::size_t ia = a.id();
  const std::size_t ib = b.id();
  return a.tape().record(a.shape(), std::move(out), {a, b},
                         [ia, ib, n, width, bias](Tape& t, std::size_t self) {
    const auto g = node_of(t, self).grads();
    auto& na = node_of(t, ia);
    auto& nb = node_of(t, ib);
    if (na.requires_grad) {
      auto ga = na.grads();
      for (std::size_t i = 0; i < n; ++i) ga[i] += g[i];
    }
    if (nb.requires_grad) {
      auto gb = nb.grads();
      for (std::size_t i = 0; i < n; ++i) gb[bias ? i % width : i] += g[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same("sub", a, b);
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] - bv[i];
  const std::size_t ia = a.id();
  const std::size_t ib = b.id();
  return a.tape().record(a.shape(), std::move(out), {a, b},
                         [ia, ib](Tape& t, std::size_t self) {
    const auto g = node_of(t, self).grads();
    auto& na = node_of(t, ia);
    auto& nb = node_of(t, ib);
    if (na.requires_grad) {
      auto ga = na.grads();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (nb.requires_grad) {
      auto gb = nb.grads();
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same("mul", a, b);
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[i];
  const std::size_t ia = a.id();
  const std::size_t ib = b.id();
  return a.tape().record(a.shape(), std::move(out), {a, b},
                         [ia, ib](Tape& t, std::size_t self) {
    const auto g = node_of(t, self).grads();
    auto& na = node_of(t, ia);
    auto& nb = node_of(t, ib);
    const auto av = na.values();
    const auto bv = nb.values();
    if (na.requires_grad) {
      auto ga = na.grads();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (nb.requires_grad) {
      auto gb = nb.grads();
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  });
}

Tensor scale(const Tensor& a, double factor) {
  const std::size_t ia = a.id();
  return unary(a, [factor](double v) { return v * factor; },
               [ia, factor](Tape& t, std::size_t self) {
    const auto g = node_of(t, self).grads();
    auto ga = node_of(t, ia).grads();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * factor;
  });
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) shape_error("concat", "no inputs");
  const std::size_t rank = parts[0].rank();
  if (rank == 0 || rank > 2 || axis >= rank) shape_error("concat", "bad axis or rank");
  for (const auto& p : parts) {
    if (p.rank() != rank) shape_error("concat", "rank mismatch");
    if (rank == 2 && p.shape()[1 - axis] != parts[0].shape()[1 - axis]) {
      shape_error("concat", shape_string(p.shape()) + " vs " +
                                shape_string(parts[0].shape()));
    }
  }
  // Each part occupies a contiguous block of "width" columns within every
  // one of "outer" rows of the output.
  std::size_t outer = 1;
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    const std::size_t w = (rank == 2 && axis == 1) ? p.shape()[1] : p.numel();
    widths.push_back(w);
    total += w;
  }
  if (rank == 2 && axis == 1) outer = parts[0].shape()[0];
  Shape shape = parts[0].shape();
  if (rank == 1) shape[0] = total;
  else if (axis == 0) {
    shape[0] = 0;
    for (const auto& p : parts) shape[0] += p.shape()[0];
  } else {
    shape[1] = total;
  }
  std::vector<double> out(outer * total);
  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    offsets.push_back(off);
    const auto v = parts[k].data();
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(v.data() + o * widths[k], widths[k], out.data() + o * total + off);
    }
    off += widths[k];
  }
  std::vector<std::size_t> ids;
  for (const auto& p : parts) ids.push_back(p.id());
  return parts[0].tape().record(std::move(shape), std::move(out), parts,
                                [ids, widths, offsets, outer, total](Tape& t, std::size_t self) {
    const auto g = node_of(t, self).grads();
    for (std::size_t k = 0; k < ids.size(); ++k) {
      auto& n = node_of(t, ids[k]);
      if (!n.requires_grad) continue;
      auto gk = n.grads();
      for (std::size_t o = 0; o < outer; ++o) {
        const double* src = g.data() + o * total + offsets[k];
        double* dst = gk.data() + o * widths[k];
        for (std::size_t i = 0; i < widths[k]; ++i) dst[i] += src[i];
      }
    }
  });
}

Tensor tanh(const Tensor& x) {
  const std::size_t ix = x.id();
  return unary(x, [](double v) { return std::tanh(v); },
               [ix](Tape& t, std::size_t self) {
    auto& out = node_of(t, self);
    const auto y = out.values();
    const auto g = out.grads();
    auto gx = node_of(t, ix).grads();
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Tensor sigmoid(const Tensor& x) {
  const std::size_t ix = x.id();
  return unary(x, [](double v) {
                 return v >= 0 ? 1.0 / (1.0 + std::exp(-v))
                               : std::exp(v) / (1.0 + std::exp(v));
               },
               [ix](Tape& t, std::size_t self) {
    auto& out = node_of(t, self);
    const auto y = out.values();
    const auto g = out.grads();
    auto gx = node_of(t, ix).grads();
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Tensor softmax(const Tensor& x, std::size_t axis, Mask mask) {
  if (x.rank() == 0 || x.rank() > 2) shape_error("softmax", "needs rank 1 or 2");
  require_mask("softmax", mask, x.numel());
  const AxisView view(x.shape(), axis);
  const auto in = x.data();
  std::vector<double> out(in.size(), 0.0);
  for (std::size_t o = 0; o < view.outer; ++o) {
    for (std::size_t i = 0; i < view.inner; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < view.len; ++l) {
        const std::size_t idx = view.index(o, l, i);
        if (active(mask, idx)) mx = std::max(mx, in[idx]);
      }
      if (mx == -std::numeric_limits<double>::infinity()) continue;
      double z = 0.0;
      for (std::size_t l = 0; l < view.len; ++l) {
        const std::size_t idx = view.index(o, l, i);
        if (active(mask, idx)) z += (out[idx] = std::exp(in[idx] - mx));
      }
      for (std::size_t l = 0; l < view.len; ++l) out[view.index(o, l, i)] /= z;
    }
  }
  const std::size_t ix = x.id();
  return x.tape().record(x.shape(), std::move(out), {x}, [ix, view](Tape& t, std::size_t self) {
    auto& outn = node_of(t, self);
    const auto y = outn.values();
    const auto g = outn.grads();
    auto gx = node_of(t, ix).grads();
    for (std::size_t o = 0; o < view.outer; ++o) {
      for (std::size_t i = 0; i < view.inner; ++i) {
        double dot = 0.0;
        for (std::size_t l = 0; l < view.len; ++l) {
          const std::size_t idx = view.index(o, l, i);
          dot += g[idx] * y[idx];
        }
        // Masked entries have y = 0 and so receive no gradient.
        for (std::size_t l = 0; l < view.len; ++l) {
          const std::size_t idx = view.index(o, l, i);
          gx[idx] += y[idx] * (g[idx] - dot);
        }
      }
    }
  });
}

Tensor log_softmax(const Tensor& x, std::size_t axis) {
  if (x.rank() == 0 || x.rank() > 2) shape_error("log_softmax", "needs rank 1 or 2");
  const AxisView view(x.shape(), axis);
  const auto in = x.data();
  std::vector<double> out(in.size());
  for (std::size_t o = 0; o < view.outer; ++o) {
    for (std::size_t i = 0; i < view.inner; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < view.len; ++l) mx = std::max(mx, in[view.index(o, l, i)]);
      double z = 0.0;
      for (std::size_t l = 0; l < view.len; ++l) z += std::exp(in[view.index(o, l, i)] - mx);
      const double lse = mx + std::log(z);
      for (std::size_t l = 0; l < view.len; ++l) {
        const std::size_t idx = view.index(o, l, i);
        out[idx] = in[idx] - lse;
      }
    }
  }
  const std::size_t ix = x.id();
  return x.tape().record(x.shape(), std::move(out), {x}, [ix, view](Tape& t, std::size_t self) {
    auto& outn = node_of(t, self);
    const auto y = outn.values();
    const auto g = outn.grads();
    auto gx = node_of(t, ix).grads();
    for (std::size_t o = 0; o < view.outer; ++o) {
      for (std::size_t i = 0; i < view.inner; ++i) {
        double gsum = 0.0;
        for (std::size_t l = 0; l < view.len; ++l) gsum += g[view.index(o, l, i)];
        for (std::size_t l = 0; l < view.len; ++l) {
          const std::size_t idx = view.index(o, l, i);
          gx[idx] += g[idx] - std::exp(y[idx]) * gsum;
        }
      }
    }
  });
}

Tensor logsumexp(const Tensor& x, std::size_t axis) {
  if (x.rank() == 0 || x.rank() > 2) shape_error("logsumexp", "needs rank 1 or 2");
  const AxisView view(x.shape(), axis);
  const auto in = x.data();
  std::vector<double> out(view.outer * view.inner);
  for (std::size_t o = 0; o < view.outer; ++o) {
    for (std::size_t i = 0; i < view.inner; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < view.len; ++l) mx = std::max(mx, in[view.index(o, l, i)]);
      double z = 0.0;
      for (std::size_t l = 0; l < view.len; ++l) z += std::exp(in[view.index(o, l, i)] - mx);
      out[o * view.inner + i] = mx + std::log(z);
    }
  }
  const std::size_t ix = x.id();
  return x.tape().record(drop_axis(x.shape(), axis), std::move(out), {x},
                         [ix, view](Tape& t, std::size_t self) {
    auto& outn = node_of(t, self);
    const auto y = outn.values();
    const auto g = outn.grads();
    auto& nx = node_of(t, ix);
    const auto in = nx.values();
    auto gx = nx.grads();
    for (std::size_t o = 0; o < view.outer; ++o) {
      for (std::size_t i = 0; i < view.inner; ++i) {
        const std::size_t r = o * view.inner + i;
        for (std::size_t l = 0; l < view.len; ++l) {
          const std::size_t idx = view.index(o, l, i);
          gx[idx] += g[r] * std::exp(in[idx] - y[r]);
        }
      }
    }
  });
}

Tensor embedding_lookup(const Tensor& table, std::span<const int> indices) {
  require_rank("embedding_lookup", table, 2);
  const std::size_t rows = table.shape()[0];
  const std::size_t d = table.shape()[1];
  const auto tv = table.data();
  std::vector<double> out(indices.size() * d);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const int idx = indices[r];
    if (idx < 0 || static_cast<std::size_t>(idx) >= rows) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "embedding_lookup: row " + std::to_string(idx) + " of " +
                      std::to_string(rows));
    }
    std::copy_n(tv.data() + static_cast<std::size_t>(idx) * d, d, out.data() + r * d);
  }
  const std::size_t it = table.id();
  std::vector<int> idx(indices.begin(), indices.end());
  return table.tape().record({indices.size(), d}, std::move(out), {table},
                             [it, idx = std::move(idx), d](Tape& t, std::size_t self) {
    const auto g = node_of(t, self).grads();
    auto gt = node_of(t, it).grads();
    for (std::size_t r = 0; r < idx.size(); ++r) {
      double* dst = gt.data() + static_cast<std::size_t>(idx[r]) * d;
      const double* src = g.data() + r * d;
      for (std::size_t c = 0; c < d; ++c) dst[c] += src[c];
    }
  });
}

Tensor gather_rows(Tape& tape, Parameter& table, std::span<const int> indices,
                   bool trainable) {
  if (table.shape.size() != 2) shape_error("gather_rows", "table must be a matrix");
  const std::size_t rows = table.shape[0];
  const std::size_t d = table.shape[1];
  std::vector<double> out(indices.size() * d);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const int idx = indices[r];
    if (idx < 0 || static_cast<std::size_t>(idx) >= rows) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "gather_rows: row " + std::to_string(idx) + " of " + std::to_string(rows));
    }
    std::copy_n(table.value.data() + static_cast<std::size_t>(idx) * d, d, out.data() + r * d);
  }
  std::vector<int> idx(indices.begin(), indices.end());
  Parameter* p = &table;
  return tape.record_source({indices.size(), d}, std::move(out), trainable,
                            [p, idx = std::move(idx), d](Tape& t, std::size_t self) {
    const auto g = node_of(t, self).grads();
    for (std::size_t r = 0; r < idx.size(); ++r) {
      double* dst = p->grad.data() + static_cast<std::size_t>(idx[r]) * d;
      const double* src = g.data() + r * d;
      for (std::size_t c = 0; c < d; ++c) dst[c] += src[c];
    }
  });
}

Tensor pick(const Tensor& x, std::span<const std::size_t> flat_indices) {
  const auto in = x.data();
  std::vector<double> out(flat_indices.size());
  for (std::size_t k = 0; k < flat_indices.size(); ++k) {
    if (flat_indices[k] >= in.size()) {
      throw Error(ErrorCode::kIndexOutOfRange, "pick: index out of range");
    }
    out[k] = in[flat_indices[k]];
  }
  const std::size_t ix = x.id();
  std::vector<std::size_t> idx(flat_indices.begin(), flat_indices.end());
  return x.tape().record({idx.size()}, std::move(out), {x},
                         [ix, idx](Tape& t, std::size_t self) {
    const auto g = node_of(t, self).grads();
    auto gx = node_of(t, ix).grads();
    for (std::size_t k = 0; k < idx.size(); ++k) gx[idx[k]] += g[k];
  });
}

Tensor row(const Tensor& x, std::size_t r) {
  require_rank("row", x, 2);
  const std::size_t n = x.shape()[1];
  if (r >= x.shape()[0]) throw Error(ErrorCode::kIndexOutOfRange, "row out of range");
  const auto in = x.data();
  std::vector<double> out(in.begin() + static_cast<std::ptrdiff_t>(r * n),
                          in.begin() + static_cast<std::ptrdiff_t>((r + 1) * n));
  const std::size_t ix = x.id();
  return x.tape().record({n}, std::move(out), {x}, [ix, r, n](Tape& t, std::size_t self) {
    const auto g = node_of(t, self).grads();
    auto gx = node_of(t, ix).grads();
    for (std::size_t c = 0; c < n; ++c) gx[r * n + c] += g[c];
  });
}

Tensor slice(const Tensor& x, std::size_t axis, std::size_t begin, std::size_t end) {
  if (x.rank() == 0 || x.rank() > 2 || axis >= x.rank()) {
    shape_error("slice", "bad axis for shape " + shape_string(x.shape()));
  }
  if (begin > end || end > x.shape()[axis]) shape_error("slice", "range out of bounds");
  const std::size_t rows = x.rank() == 2 ? x.shape()[0] : 1;
  const std::size_t cols = x.rank() == 2 ? x.shape()[1] : x.shape()[0];
  const bool by_row = x.rank() == 2 && axis == 0;
  const std::size_t r0 = by_row ? begin : 0;
  const std::size_t r1 = by_row ? end : rows;
  const std::size_t c0 = by_row ? 0 : begin;
  const std::size_t c1 = by_row ? cols : end;
  const auto in = x.data();
  std::vector<double> out;
  out.reserve((r1 - r0) * (c1 - c0));
  for (std::size_t r = r0; r < r1; ++r) {
    for (std::size_t c = c0; c < c1; ++c) out.push_back(in[r * cols + c]);
  }
  Shape shape = x.shape();
  shape[axis] = end - begin;
  const std::size_t ix = x.id();
  return x.tape().record(std::move(shape), std::move(out), {x},
                         [ix, r0, r1, c0, c1, cols](Tape& t, std::size_t self) {
    const auto g = node_of(t, self).grads();
    auto gx = node_of(t, ix).grads();
    std::size_t k = 0;
    for (std::size_t r = r0; r < r1; ++r) {
      for (std::size_t c = c0; c < c1; ++c) gx[r * cols + c] += g[k++];
    }
  });
}

Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  const std::size_t ix = x.id();
  return x.tape().record({}, {s}, {x}, [ix](Tape& t, std::size_t self) {
    const double g = node_of(t, self).grads()[0];
    for (double& gx : node_of(t, ix).grads()) gx += g;
  });
}

Tensor transpose(const Tensor& x) {
  require_rank("transpose", x, 2);
  const std::size_t m = x.shape()[0];
  const std::size_t n = x.shape()[1];
  const auto in = x.data();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = in[i * n + j];
  }
  const std::size_t ix = x.id();
  return x.tape().record({n, m}, std::move(out), {x}, [ix, m, n](Tape& t, std::size_t self) {
    const auto g = node_of(t, self).grads();
    auto gx = node_of(t, ix).grads();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += g[j * m + i];
    }
  });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (numel(shape) != x.numel()) {
    shape_error("reshape", shape_string(x.shape()) + " -> " + shape_string(shape));
  }
  const auto in = x.data();
  const std::size_t ix = x.id();
  return x.tape().record(std::move(shape), std::vector<double>(in.begin(), in.end()), {x},
                         [ix](Tape& t, std::size_t self) {
    const auto g = node_of(t, self).grads();
    auto gx = node_of(t, ix).grads();
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
  });
}

Tensor dropout(const Tensor& x, double p, bool train, std::uint64_t seed,
               std::uint64_t step) {
  if (!train || p <= 0.0) return x;
  if (p >= 1.0) shape_error("dropout", "p must be below 1");
  const std::uint64_t node_id = x.tape().size();
  const std::uint64_t key = splitmix64(seed ^ splitmix64(step ^ splitmix64(node_id)));
  const double keep_scale = 1.0 / (1.0 - p);
  const auto in = x.data();
  std::vector<double> factor(in.size());
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double u = static_cast<double>(splitmix64(key + i) >> 11) * 0x1.0p-53;
    factor[i] = u < p ? 0.0 : keep_scale;
    out[i] = in[i] * factor[i];
  }
  const std::size_t ix = x.id();
  return x.tape().record(x.shape(), std::move(out), {x},
                         [ix, factor = std::move(factor)](Tape& t, std::size_t self) {
    const auto g = node_of(t, self).grads();
    auto gx = node_of(t, ix).grads();
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * factor[i];
  });
}

Tensor cross_entropy(const Tensor& logits, std::span<const int> targets,
                     Mask row_mask, Mask cell_mask, Reduction reduction) {
  require_rank("cross_entropy", logits, 2);
  const std::size_t rows = logits.shape()[0];
  const std::size_t classes = logits.shape()[1];
  if (targets.size() != rows) shape_error("cross_entropy", "one target per row required");
  require_mask("cross_entropy", row_mask, rows);
  require_mask("cross_entropy", cell_mask, rows * classes);
  const auto in = logits.data();
  std::vector<double> probs(rows * classes, 0.0);
  std::vector<std::size_t> used_rows;
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!active(row_mask, r)) continue;
    const int target = targets[r];
    const std::size_t base = r * classes;
    if (target < 0 || static_cast<std::size_t>(target) >= classes ||
        !active(cell_mask, base + static_cast<std::size_t>(target))) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "cross_entropy: target " + std::to_string(target) +
                      " outside the support of row " + std::to_string(r));
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < classes; ++c) {
      if (active(cell_mask, base + c)) mx = std::max(mx, in[base + c]);
    }
    double z = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      if (active(cell_mask, base + c)) z += (probs[base + c] = std::exp(in[base + c] - mx));
    }
    for (std::size_t c = 0; c < classes; ++c) probs[base + c] /= z;
    total += mx + std::log(z) - in[base + static_cast<std::size_t>(target)];
    used_rows.push_back(r);
  }
  const double denom = (reduction == Reduction::kMean && !used_rows.empty())
                           ? static_cast<double>(used_rows.size())
                           : 1.0;
  const std::size_t il = logits.id();
  std::vector<int> tgt(targets.begin(), targets.end());
  return logits.tape().record({}, {total / denom}, {logits},
                              [il, probs = std::move(probs), used_rows = std::move(used_rows),
                               tgt = std::move(tgt), classes, denom](Tape& t, std::size_t self) {
    const double g = node_of(t, self).grads()[0] / denom;
    auto gl = node_of(t, il).grads();
    for (std::size_t r : used_rows) {
      const std::size_t base = r * classes;
      for (std::size_t c = 0; c < classes; ++c) gl[base + c] += g * probs[base + c];
      gl[base + static_cast<std::size_t>(tgt[r])] -= g;
    }
  });
}

Tensor bce_with_logits(const Tensor& logits, std::span<const double> targets,
                       Mask mask, Reduction reduction) {
  const std::size_t n = logits.numel();
  if (targets.size() != n) shape_error("bce_with_logits", "one target per logit required");
  require_mask("bce_with_logits", mask, n);
  const auto in = logits.data();
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!active(mask, i)) continue;
    const double x = in[i];
    total += std::max(x, 0.0) - x * targets[i] + std::log1p(std::exp(-std::abs(x)));
    ++count;
  }
  const double denom = (reduction == Reduction::kMean && count > 0) ? static_cast<double>(count) : 1.0;
  const std::size_t il = logits.id();
  std::vector<double> tgt(targets.begin(), targets.end());
  std::vector<double> msk(mask.begin(), mask.end());
  return logits.tape().record({}, {total / denom}, {logits},
                              [il, tgt = std::move(tgt), msk = std::move(msk), denom](Tape& t, std::size_t self) {
    const double g = node_of(t, self).grads()[0] / denom;
    auto& nl = node_of(t, il);
    const auto x = nl.values();
    auto gl = nl.grads();
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!msk.empty() && msk[i] == 0.0) continue;
      const double s = x[i] >= 0 ? 1.0 / (1.0 + std::exp(-x[i]))
                                 : std::exp(x[i]) / (1.0 + std::exp(x[i]));
      gl[i] += g * (s - tgt[i]);
    }
  });
}

Tensor pair_sum(const Tensor& a, const Tensor& b) {
  require_rank("pair_sum", a, 2);
  require_same("pair_sum", a, b);
  const std::size_t n = a.shape()[0];
  const std::size_t m = a.shape()[1];
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<double> out(n * n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double* dst = out.data() + (i * n + j) * m;
      for (std::size_t c = 0; c < m; ++c) dst[c] = av[j * m + c] + bv[i * m + c];
    }
  }
  const std::size_t ia = a.id();
  const std::size_t ib = b.id();
  return a.tape().record({n * n, m}, std::move(out), {a, b},
                         [ia, ib, n, m](Tape& t, std::size_t self) {
    const auto g = node_of(t, self).grads();
    auto& na = node_of(t, ia);
    auto& nb = node_of(t, ib);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double* src = g.data() + (i * n + j) * m;
        if (na.requires_grad) {
          auto ga = na.grads();
          for (std::size_t c = 0; c < m; ++c) ga[j * m + c] += src[c];
        }
        if (nb.requires_grad) {
          auto gb = nb.grads();
          for (std::size_t c = 0; c < m; ++c) gb[i * m + c] += src[c];
        }
      }
    }
  });
}

Tensor segment_sum(const Tensor& x, std::span<const std::pair<int, int>> ranges) {
  require_rank("segment_sum", x, 2);
  const std::size_t rows = x.shape()[0];
  const std::size_t d = x.shape()[1];
  const auto in = x.data();
  std::vector<double> out(ranges.size() * d, 0.0);
  for (std::size_t r = 0; r < ranges.size(); ++r) {
    const auto [b, e] = ranges[r];
    if (b < 0 || e < b || static_cast<std::size_t>(e) >= rows) {
      throw Error(ErrorCode::kIndexOutOfRange, "segment_sum: bad range");
    }
    for (int k = b; k <= e; ++k) {
      for (std::size_t c = 0; c < d; ++c) out[r * d + c] += in[static_cast<std::size_t>(k) * d + c];
    }
  }
  const std::size_t ix = x.id();
  std::vector<std::pair<int, int>> rg(ranges.begin(), ranges.end());
  return x.tape().record({ranges.size(), d}, std::move(out), {x},
                         [ix, rg = std::move(rg), d](Tape& t, std::size_t self) {
    const auto g = node_of(t, self).grads();
    auto gx = node_of(t, ix).grads();
    for (std::size_t r = 0; r < rg.size(); ++r) {
      for (int k = rg[r].first; k <= rg[r].second; ++k) {
        for (std::size_t c = 0; c < d; ++c) gx[static_cast<std::size_t>(k) * d + c] += g[r * d + c];
      }
    }
  });
}

}  // namespace jmie::ad
