#include "pct/setnet/reference.h"

#include <cmath>

#include "pct/common/check.h"

namespace pct {
namespace {

using Vec = std::vector<double>;

// y = x W + b for W stored row-major (fan_in x fan_out).
Vec Affine(const Vec& x, const Params<double>& p, int w, int b) {
  const TensorSpec& ws = p.layout()[w];
  PCT_CHECK(static_cast<int>(x.size()) == ws.rows, "affine input width");
  const double* W = p.data().data() + ws.offset;
  const double* bias = b >= 0 ? p.data().data() + p.layout()[b].offset : nullptr;
  Vec y(ws.cols, 0.0);
  for (int o = 0; o < ws.cols; ++o) {
    double acc = bias != nullptr ? bias[o] : 0.0;
    for (int i = 0; i < ws.rows; ++i) acc += x[i] * W[i * ws.cols + o];
    y[o] = acc;
  }
  return y;
}

// Accumulates dW, db for y = x W + b and returns dx.
Vec AffineBack(const Vec& x, const Vec& dy, const Params<double>& p, int w, int b,
               Params<double>* grad) {
  const TensorSpec& ws = p.layout()[w];
  const double* W = p.data().data() + ws.offset;
  Vec dx(ws.rows, 0.0);
  for (int i = 0; i < ws.rows; ++i) {
    for (int o = 0; o < ws.cols; ++o) {
      dx[i] += dy[o] * W[i * ws.cols + o];
      if (grad != nullptr) grad->data()[ws.offset + i * ws.cols + o] += x[i] * dy[o];
    }
  }
  if (grad != nullptr && b >= 0) {
    const size_t off = p.layout()[b].offset;
    for (int o = 0; o < ws.cols; ++o) grad->data()[off + o] += dy[o];
  }
  return dx;
}

Vec Relu(Vec v) {
  for (double& x : v) x = x > 0 ? x : 0.0;
  return v;
}

Vec ReluBack(const Vec& out, Vec d) {
  for (size_t i = 0; i < d.size(); ++i) {
    if (!(out[i] > 0)) d[i] = 0.0;
  }
  return d;
}

Vec Concat(std::initializer_list<const Vec*> parts) {
  Vec out;
  for (const Vec* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

double Softplus(double z) { return z > 20 ? z : std::log1p(std::exp(z)); }

// Every intermediate of one sample.
struct Trace {
  std::vector<Vec> status_in, h1, h;
  Vec profile_in, g1, g;
  std::vector<Vec> dd;
  std::vector<Vec> raw;  // unprojected elements: 15 day rows, then clusters
  ElementSet set;
  std::vector<std::vector<Vec>> x, a, u;  // [block][element]
  std::vector<Vec> pooled;
  std::vector<std::vector<int>> argmax;
  std::vector<Vec> z1;
  Vec z, yhat;
};

void Embed(const SetInput& in, const Params<double>& p, Trace* t) {
  const SetNetConfig& c = p.config();
  t->status_in.assign(kWindowDays, Vec(kStatusFeatures));
  t->h1.resize(kWindowDays);
  t->h.resize(kWindowDays);
  t->dd.resize(kWindowDays);
  for (int k = 0; k < kWindowDays; ++k) {
    EncodeStatus(in.statuses[k], t->status_in[k].data());
    t->h1[k] = Relu(Affine(t->status_in[k], p, kStatusW1, kStatusB1));
    t->h[k] = Affine(t->h1[k], p, kStatusW2, kStatusB2);
    const double offset = -static_cast<double>(k) / kMaxLookbackDays;
    t->dd[k] = Affine(Vec{offset}, p, kDayW, kDayB);
  }
  t->profile_in.assign(kProfileFeatures, 0.0);
  EncodeProfile(in, t->profile_in.data());
  t->g1 = Relu(Affine(t->profile_in, p, kProfileW1, kProfileB1));
  t->g = Affine(t->g1, p, kProfileW2, kProfileB2);

  t->raw.clear();
  t->set = ElementSet{};
  for (int k = 0; k < kWindowDays; ++k) {
    t->raw.push_back(Concat({&t->h[k], &t->g, &t->dd[k]}));
    t->set.elements.push_back(Affine(t->raw.back(), p, kDayProjW, kDayProjB));
    t->set.day_index.push_back(k);
  }
  const TensorSpec& risk = p.layout()[kRiskEmbedding];
  for (const Cluster& cl : in.clusters) {
    PCT_CHECK(cl.day_offset >= 0 && cl.day_offset < kWindowDays, "cluster outside the window");
    Vec r(p.data().begin() + risk.offset + cl.risk_level * c.risk_dim,
          p.data().begin() + risk.offset + (cl.risk_level + 1) * c.risk_dim);
    Vec n(c.count_dim);
    EncodeCountInto(cl.count, c.count_dim, n.data());
    t->raw.push_back(Concat({&r, &n, &t->h[cl.day_offset], &t->dd[cl.day_offset]}));
    t->set.elements.push_back(Affine(t->raw.back(), p, kEncProjW, kEncProjB));
    t->set.day_index.push_back(-1);
  }
}

void RunSet(const ElementSet& set, const Params<double>& p, Trace* t) {
  const SetNetConfig& c = p.config();
  const size_t n = set.elements.size();
  t->x.assign(1, set.elements);
  t->a.clear();
  t->u.clear();
  t->pooled.clear();
  t->argmax.clear();
  for (int blk = 0; blk < c.num_blocks; ++blk) {
    std::vector<Vec> a(n), u(n), next(n);
    for (size_t e = 0; e < n; ++e) {
      a[e] = Relu(Affine(t->x[blk][e], p, BlockTensorId(blk, kBlockW1),
                         BlockTensorId(blk, kBlockB1)));
    }
    Vec pooled(c.width, -INFINITY);
    std::vector<int> arg(c.width, -1);
    for (size_t e = 0; e < n; ++e) {
      for (int j = 0; j < c.width; ++j) {
        if (a[e][j] > pooled[j]) {
          pooled[j] = a[e][j];
          arg[j] = static_cast<int>(e);
        }
      }
    }
    const Vec pooled_term = Affine(pooled, p, BlockTensorId(blk, kBlockW2p), -1);
    for (size_t e = 0; e < n; ++e) {
      Vec pre = Affine(a[e], p, BlockTensorId(blk, kBlockW2a), BlockTensorId(blk, kBlockB2));
      for (int j = 0; j < c.width; ++j) pre[j] += pooled_term[j];
      u[e] = Relu(pre);
      next[e] = t->x[blk][e];
      for (int j = 0; j < c.width; ++j) next[e][j] += u[e][j];
    }
    t->a.push_back(std::move(a));
    t->u.push_back(std::move(u));
    t->pooled.push_back(std::move(pooled));
    t->argmax.push_back(std::move(arg));
    t->x.push_back(std::move(next));
  }
  t->z1.assign(kWindowDays, Vec());
  t->z.assign(kWindowDays, 0.0);
  t->yhat.assign(kWindowDays, 0.0);
  for (size_t e = 0; e < n; ++e) {
    const int k = set.day_index[e];
    if (k < 0) continue;
    t->z1[k] = Relu(Affine(t->x.back()[e], p, kHeadW1, kHeadB1));
    t->z[k] = Affine(t->z1[k], p, kHeadW2, kHeadB2)[0];
    t->yhat[k] = Softplus(t->z[k]);
  }
}

}  // namespace

ElementSet BuildInputSet(const SetInput& input, const Params<double>& params) {
  Trace t;
  Embed(input, params, &t);
  return t.set;
}

History ReferenceForwardSet(const ElementSet& set, const Params<double>& params) {
  int days = 0;
  for (int k : set.day_index) days += k >= 0 ? 1 : 0;
  PCT_CHECK(days == kWindowDays, "the set must hold exactly one element per window day");
  Trace t;
  RunSet(set, params, &t);
  History out;
  for (int k = 0; k < kWindowDays; ++k) out[k] = t.yhat[k];
  return out;
}

History ReferenceForward(const SetInput& input, const Params<double>& params) {
  return ReferenceForwardSet(BuildInputSet(input, params), params);
}

double ReferenceLossAndGradient(const SetInput& input, const History& target,
                                const Params<double>& p, Params<double>* grad) {
  const SetNetConfig& c = p.config();
  Trace t;
  Embed(input, p, &t);
  RunSet(t.set, p, &t);
  double loss = 0.0;
  for (int k = 0; k < kWindowDays; ++k) {
    loss += (t.yhat[k] - target[k]) * (t.yhat[k] - target[k]);
  }
  loss /= kWindowDays;
  if (grad == nullptr) return loss;

  const size_t n = t.set.elements.size();
  std::vector<Vec> dx(n, Vec(c.width, 0.0));
  for (int k = 0; k < kWindowDays; ++k) {
    const double dy = 2.0 * (t.yhat[k] - target[k]) / kWindowDays;
    const double dz = dy / (1.0 + std::exp(-t.z[k]));
    Vec dz1 = AffineBack(t.z1[k], Vec{dz}, p, kHeadW2, kHeadB2, grad);
    dz1 = ReluBack(t.z1[k], dz1);
    dx[k] = AffineBack(t.x.back()[k], dz1, p, kHeadW1, kHeadB1, grad);
  }

  for (int blk = c.num_blocks - 1; blk >= 0; --blk) {
    Vec dpooled_term(c.width, 0.0);
    std::vector<Vec> da(n);
    for (size_t e = 0; e < n; ++e) {
      const Vec du = ReluBack(t.u[blk][e], dx[e]);
      for (int j = 0; j < c.width; ++j) dpooled_term[j] += du[j];
      da[e] = AffineBack(t.a[blk][e], du, p, BlockTensorId(blk, kBlockW2a),
                         BlockTensorId(blk, kBlockB2), grad);
    }
    const Vec dpooled = AffineBack(t.pooled[blk], dpooled_term, p,
                                   BlockTensorId(blk, kBlockW2p), -1, grad);
    for (int j = 0; j < c.width; ++j) da[t.argmax[blk][j]][j] += dpooled[j];
    for (size_t e = 0; e < n; ++e) {
      const Vec dpre = ReluBack(t.a[blk][e], da[e]);
      const Vec back = AffineBack(t.x[blk][e], dpre, p, BlockTensorId(blk, kBlockW1),
                                  BlockTensorId(blk, kBlockB1), grad);
      for (int j = 0; j < c.width; ++j) dx[e][j] += back[j];
    }
  }

  std::vector<Vec> dh(kWindowDays, Vec(c.status_out, 0.0));
  std::vector<Vec> ddd(kWindowDays, Vec(c.day_out, 0.0));
  Vec dg(c.profile_out, 0.0);
  const size_t risk_off = p.layout()[kRiskEmbedding].offset;
  size_t cluster = 0;
  for (size_t e = 0; e < n; ++e) {
    const int k = t.set.day_index[e];
    if (k >= 0) {
      const Vec draw = AffineBack(t.raw[e], dx[e], p, kDayProjW, kDayProjB, grad);
      for (int j = 0; j < c.status_out; ++j) dh[k][j] += draw[j];
      for (int j = 0; j < c.profile_out; ++j) dg[j] += draw[c.status_out + j];
      for (int j = 0; j < c.day_out; ++j) ddd[k][j] += draw[c.status_out + c.profile_out + j];
    } else {
      const Cluster& cl = input.clusters[cluster++];
      const Vec draw = AffineBack(t.raw[e], dx[e], p, kEncProjW, kEncProjB, grad);
      for (int j = 0; j < c.risk_dim; ++j) {
        grad->data()[risk_off + cl.risk_level * c.risk_dim + j] += draw[j];
      }
      const int h_at = c.risk_dim + c.count_dim;
      for (int j = 0; j < c.status_out; ++j) dh[cl.day_offset][j] += draw[h_at + j];
      for (int j = 0; j < c.day_out; ++j) {
        ddd[cl.day_offset][j] += draw[h_at + c.status_out + j];
      }
    }
  }
  for (int k = 0; k < kWindowDays; ++k) {
    const double offset = -static_cast<double>(k) / kMaxLookbackDays;
    AffineBack(Vec{offset}, ddd[k], p, kDayW, kDayB, grad);
    Vec dh1 = AffineBack(t.h1[k], dh[k], p, kStatusW2, kStatusB2, grad);
    dh1 = ReluBack(t.h1[k], dh1);
    AffineBack(t.status_in[k], dh1, p, kStatusW1, kStatusB1, grad);
  }
  Vec dg1 = AffineBack(t.g1, dg, p, kProfileW2, kProfileB2, grad);
  dg1 = ReluBack(t.g1, dg1);
  AffineBack(t.profile_in, dg1, p, kProfileW1, kProfileB1, grad);
  return loss;
}

}  // namespace pct
