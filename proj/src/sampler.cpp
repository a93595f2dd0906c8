#include "gbs/sampler.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "gbs/parallel.hpp"
#include "gbs/rng.hpp"

namespace gbs {

namespace {

constexpr int kMaxPhotonsMixed = 14;  // doubled reductions reach dimension 28
constexpr int kMaxPhotonsPure = 26;

double conj_s(double x) { return x; }
Complex conj_s(const Complex& x) { return std::conj(x); }
double abs2_s(double x) { return x * x; }
double abs2_s(const Complex& x) { return std::norm(x); }
double real_s(double x) { return x; }
double real_s(const Complex& x) { return x.real(); }

double factorial_product(const PhotonPattern& p) {
  double f = 1.0;
  for (int v : p.counts)
    for (int k = 2; k <= v; ++k) f *= k;
  return f;
}

void check_pattern(const GaussianState& s, const PhotonPattern& p, const char* who) {
  if (p.modes() != s.modes)
    throw validation_error(std::string(who) + ": pattern covers " +
                           std::to_string(p.modes()) + " modes, state has " +
                           std::to_string(s.modes));
  for (int v : p.counts)
    if (v < 0) throw validation_error(std::string(who) + ": negative count");
}

bool has_displacement(const GaussianState& s) {
  return s.mean.size() > 0 && s.mean.cwiseAbs().maxCoeff() > 1e-12;
}

// Cached pieces of the outcome-probability formula for one (possibly reduced)
// state.  Pure states use the single-block kernel bmat with amplitude-level
// couplings cvec; mixed states use the doubled A-matrix with the couplings
// gamma = conj(Q^{-1} mean).  factor is the pattern-independent prefactor,
// equal to the vacuum probability.
struct StateEval {
  bool displaced = false;
  bool pure = false;
  CMatrix amat;
  CMatrix bmat;
  CVector gamma;
  CVector cvec;
  double factor = 1.0;
};

StateEval make_eval(const GaussianState& s) {
  StateEval ev;
  ev.displaced = has_displacement(s);
  if (auto b = pure_block(s)) {
    ev.pure = true;
    ev.bmat = std::move(*b);
  } else {
    ev.amat = a_matrix(s);
  }
  double prefactor = 1.0;
  if (ev.displaced) {
    Eigen::LLT<CMatrix> llt(q_matrix(s));
    if (llt.info() != Eigen::Success)
      throw numeric_error("Husimi matrix is singular or not positive definite");
    CVector qinv_mean = llt.solve(s.mean);
    prefactor = std::exp(-0.5 * s.mean.dot(qinv_mean).real());
    if (ev.pure) {
      // bmat is the conjugate of the stellar kernel, so the amplitude-level
      // couplings enter conjugated as well; the modulus below absorbs this.
      CVector beta = s.mean.head(s.modes);
      ev.cvec = beta.conjugate() - ev.bmat * beta;
    } else {
      ev.gamma = qinv_mean.conjugate();
    }
  }
  ev.factor = prefactor / sqrt_det_q(s);
  return ev;
}

double eval_probability(const StateEval& ev, const PhotonPattern& p) {
  if (ev.pure) {
    // Amplitude route: the reduced kernel with the couplings on its diagonal
    // generates the Fock amplitude, so only half the doubled dimension enters.
    CMatrix sub = reduce_single(ev.bmat, p);
    Complex h;
    if (ev.displaced) {
      int pos = 0;
      for (int i = 0; i < int(ev.bmat.rows()); ++i)
        for (int rep = 0; rep < p.counts[i]; ++rep, ++pos)
          sub(pos, pos) = ev.cvec(i);
      h = loop_hafnian(sub);
    } else {
      h = hafnian(sub);
    }
    return ev.factor * std::norm(h) / factorial_product(p);
  }
  CMatrix sub = reduce_doubled(ev.amat, p);
  Complex h;
  if (ev.displaced) {
    // The loop couplings sit on the diagonal of the reduced matrix; entries
    // between repeated copies of a mode keep the original A-matrix values.
    const int m = int(ev.amat.rows()) / 2;
    int pos = 0;
    for (int half = 0; half < 2; ++half)
      for (int i = 0; i < m; ++i)
        for (int rep = 0; rep < p.counts[i]; ++rep, ++pos)
          sub(pos, pos) = ev.gamma(half * m + i);
    h = loop_hafnian(sub);
  } else {
    h = hafnian(sub);
  }
  return std::max(0.0, ev.factor * h.real() / factorial_product(p));
}

// Incrementally grown Cholesky factor over pair-indexed principal submatrices
// of a fixed Hermitian positive matrix laid out in interleaved (2i, 2i+1)
// order.  push appends one pair, pop removes the most recent one.
template <typename Scalar>
struct CholStack {
  const MatrixX<Scalar>* src = nullptr;
  MatrixX<Scalar> l;
  std::vector<int> blocks;
  int dim = 0;

  void init(const MatrixX<Scalar>* source, int max_pairs) {
    src = source;
    l.setZero(2 * max_pairs, 2 * max_pairs);
    blocks.clear();
    blocks.reserve(max_pairs);
    dim = 0;
  }

  int source_index(int t) const { return 2 * blocks[size_t(t) / 2] + (t & 1); }

  // Returns the product of the two appended pivots.
  double push(int blk) {
    blocks.push_back(blk);
    double pivots = 1.0;
    for (int a = 0; a < 2; ++a) {
      const int k = dim + a;
      const int row = 2 * blk + a;
      for (int t = 0; t < k; ++t) {
        Scalar v = (*src)(row, source_index(t));
        for (int u = 0; u < t; ++u) v -= l(k, u) * conj_s(l(t, u));
        l(k, t) = v / real_s(l(t, t));
      }
      double d = real_s((*src)(row, row));
      for (int u = 0; u < k; ++u) d -= abs2_s(l(k, u));
      d = std::max(d, 1e-300);
      l(k, k) = std::sqrt(d);
      pivots *= std::sqrt(d);
    }
    dim += 2;
    return pivots;
  }

  void pop() {
    dim -= 2;
    blocks.pop_back();
  }
};

// sum over subsets Y of {start..count-1} of sign * invroot / sqrt(det W_YY),
// sharing Cholesky prefixes along the subset tree.
template <typename Scalar>
void alternating_sum(CholStack<Scalar>& st, int count, int start, double sign,
                     double invroot, detail::Kahan<double>& acc) {
  acc.add(sign * invroot);
  for (int y = start; y < count; ++y) {
    const double p = st.push(y);
    alternating_sum(st, count, y + 1, -sign, invroot / p, acc);
    st.pop();
  }
}

// One threshold sample by genuine click conditionals.  v is the Husimi matrix
// in interleaved layout; the running factors track
//   T  = Pr(pattern so far),
//   T0 = Pr(pattern so far and the next mode dark)
//      = P0(Z') * sum over Y subset of C of (-1)^{|Y|} / sqrt(det W_YY),
// with W the Schur complement of the dark block inside Q restricted to the
// clicked modes.
template <typename Scalar>
PhotonPattern threshold_sample_one(const MatrixX<Scalar>& v, int m, RngStream rng) {
  CholStack<Scalar> dark;
  dark.init(&v, m);
  std::vector<int> clicked;
  PhotonPattern out;
  out.counts.assign(m, 0);
  double t = 1.0, invroot_dark = 1.0;
  MatrixX<Scalar> y, w;

  for (int j = 0; j < m; ++j) {
    const double pivots = dark.push(j);
    const double invroot_tent = invroot_dark / pivots;
    const int c = int(clicked.size());
    double alt = 1.0;
    if (c > 0) {
      const int zd = dark.dim;
      y.resize(zd, 2 * c);
      for (int q = 0; q < 2 * c; ++q) {
        const int cq = 2 * clicked[size_t(q) / 2] + (q & 1);
        for (int r = 0; r < zd; ++r) {
          Scalar val = v(dark.source_index(r), cq);
          for (int u = 0; u < r; ++u) val -= dark.l(r, u) * y(u, q);
          y(r, q) = val / real_s(dark.l(r, r));
        }
      }
      w.resize(2 * c, 2 * c);
      for (int qa = 0; qa < 2 * c; ++qa)
        for (int qb = 0; qb <= qa; ++qb) {
          Scalar val = v(2 * clicked[size_t(qa) / 2] + (qa & 1),
                         2 * clicked[size_t(qb) / 2] + (qb & 1));
          for (int u = 0; u < zd; ++u) val -= conj_s(y(u, qa)) * y(u, qb);
          w(qa, qb) = val;
          w(qb, qa) = conj_s(val);
        }
      CholStack<Scalar> ws;
      ws.init(&w, c);
      detail::Kahan<double> acc;
      alternating_sum(ws, c, 0, 1.0, 1.0, acc);
      alt = acc.sum;
    }
    double t0 = std::min(std::max(invroot_tent * alt, 0.0), t);
    if (rng.uniform() * t < t0) {
      invroot_dark = invroot_tent;
      t = std::max(t0, 1e-300);
    } else {
      dark.pop();
      clicked.push_back(j);
      out.counts[j] = 1;
      t = std::max(t - t0, 1e-300);
    }
  }
  return out;
}

}  // namespace

double probability(const GaussianState& s, const PhotonPattern& pattern) {
  check_pattern(s, pattern, "probability");
  StateEval ev = make_eval(s);
  const int total = pattern.total();
  const int guard = ev.pure ? kMaxPhotonsPure : kMaxPhotonsMixed;
  if (total > guard)
    throw resource_error("probability: " + std::to_string(total) +
                         " photons exceeds the guard (" + std::to_string(guard) +
                         ")");
  return eval_probability(ev, pattern);
}

double probability_threshold(const GaussianState& s, const PhotonPattern& clicks) {
  check_pattern(s, clicks, "probability_threshold");
  if (!clicks.is_binary())
    throw validation_error("probability_threshold: pattern must be binary");
  if (has_displacement(s))
    throw validation_error("probability_threshold: displaced states are not supported");

  std::vector<int> on;
  for (int i = 0; i < s.modes; ++i)
    if (clicks.counts[i] == 1) on.push_back(i);
  const int k = int(on.size());
  const int n2 = 2 * s.modes;

  Eigen::LLT<CMatrix> llt(q_matrix(s));
  if (llt.info() != Eigen::Success)
    throw numeric_error("Husimi matrix is singular or not positive definite");
  CMatrix o = CMatrix::Identity(n2, n2) - llt.solve(CMatrix::Identity(n2, n2));
  CMatrix sub(2 * k, 2 * k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) {
      sub(r, c) = o(on[r], on[c]);
      sub(r, k + c) = o(on[r], on[c] + s.modes);
      sub(k + r, c) = o(on[r] + s.modes, on[c]);
      sub(k + r, k + c) = o(on[r] + s.modes, on[c] + s.modes);
    }
  const double pr = torontonian(sub) / sqrt_det_q(s);
  return std::min(std::max(pr, 0.0), 1.0);
}

SampleBatch sample_pnr(const GaussianState& s, int count, uint64_t seed,
                       int threads, const PnrOptions& opt) {
  if (count < 0) throw validation_error("sample_pnr: negative sample count");
  if (s.modes < 1) throw validation_error("sample_pnr: state has no modes");
  if (opt.cutoff < 1 || opt.max_cutoff < opt.cutoff)
    throw validation_error("sample_pnr: invalid cutoff options");

  // Chain rule over modes: the conditional for mode j comes from joint
  // probabilities of the state reduced to the first j+1 modes.
  std::vector<StateEval> prefix;
  prefix.reserve(s.modes);
  std::vector<int> keep;
  for (int j = 0; j < s.modes; ++j) {
    keep.push_back(j);
    prefix.push_back(make_eval(j + 1 == s.modes ? s : reduce_state(s, keep)));
  }

  SampleBatch batch;
  batch.modes = s.modes;
  batch.threshold = false;
  batch.samples.assign(size_t(count), PhotonPattern{});

  parallel_for(count, threads, [&](int idx) {
    RngStream rng = RngStream::derive(seed, uint64_t(idx));
    PhotonPattern partial;
    double joint_prev = 1.0;
    std::vector<double> joint;
    for (int j = 0; j < s.modes; ++j) {
      const int total = partial.total();
      const double u = rng.uniform();
      const int cap = std::max(0, kMaxPhotonsMixed - total);
      const int soft = std::min(opt.cutoff, cap);
      partial.counts.push_back(0);
      joint.clear();
      double acc = 0;
      int pick = -1;
      // Joints are evaluated lazily: while the draw lands inside the window
      // the walk stops at the chosen count and the conditional is exact.
      for (int k = 0; k <= soft; ++k) {
        partial.counts.back() = k;
        joint.push_back(eval_probability(prefix[j], partial));
        acc += joint.back();
        if (u * joint_prev < acc) {
          pick = k;
          break;
        }
      }
      if (pick < 0) {
        // Tail draw: widen the window when the tail is heavy, then
        // renormalize over the truncated conditional.
        if (joint_prev - acc > opt.tail_tol * joint_prev) {
          const int wide = std::min(opt.max_cutoff, cap);
          for (int k = soft + 1; k <= wide; ++k) {
            partial.counts.back() = k;
            joint.push_back(eval_probability(prefix[j], partial));
          }
        }
        double mass = 0;
        for (double v : joint) mass += v;
        mass = std::max(mass, 1e-300);
        double walked = 0;
        pick = int(joint.size()) - 1;
        for (size_t k = 0; k < joint.size(); ++k) {
          walked += joint[k];
          if (u * mass < walked) {
            pick = int(k);
            break;
          }
        }
      }
      partial.counts.back() = pick;
      joint_prev = std::max(joint[size_t(pick)], 1e-300);
    }
    batch.samples[size_t(idx)] = partial;
  });
  return batch;
}

SampleBatch sample_threshold(const GaussianState& s, int count, uint64_t seed,
                             int threads) {
  if (count < 0) throw validation_error("sample_threshold: negative sample count");
  if (s.modes < 1) throw validation_error("sample_threshold: state has no modes");
  if (has_displacement(s))
    throw validation_error("sample_threshold: displaced states are not supported");

  const int m = s.modes;
  CMatrix q = q_matrix(s);
  CMatrix vc(2 * m, 2 * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          vc(2 * i + a, 2 * j + b) = q(i + a * m, j + b * m);

  const bool real_state = vc.imag().cwiseAbs().maxCoeff() < 1e-12;
  Matrix vr;
  if (real_state) vr = vc.real();

  SampleBatch batch;
  batch.modes = m;
  batch.threshold = true;
  batch.samples.assign(size_t(count), PhotonPattern{});
  parallel_for(count, threads, [&](int idx) {
    RngStream rng = RngStream::derive(seed, uint64_t(idx));
    batch.samples[size_t(idx)] = real_state ? threshold_sample_one(vr, m, rng)
                                            : threshold_sample_one(vc, m, rng);
  });
  return batch;
}

SampleBatch postselect(const SampleBatch& batch, int min_total, int max_total) {
  if (min_total < 0 || max_total < min_total)
    throw validation_error("postselect: need 0 <= min_total <= max_total");
  SampleBatch out;
  out.modes = batch.modes;
  out.threshold = batch.threshold;
  for (const PhotonPattern& p : batch.samples) {
    const int t = p.total();
    if (t >= min_total && t <= max_total) out.samples.push_back(p);
  }
  return out;
}

std::vector<std::vector<int>> to_subgraphs(const SampleBatch& batch) {
  std::vector<std::vector<int>> out;
  out.reserve(batch.samples.size());
  for (const PhotonPattern& p : batch.samples) {
    std::vector<int> nodes;
    for (int i = 0; i < p.modes(); ++i)
      if (p.counts[i] > 0) nodes.push_back(i);
    out.push_back(std::move(nodes));
  }
  return out;
}

PhotonPattern clipped(const PhotonPattern& p) {
  PhotonPattern out = p;
  for (int& v : out.counts) v = v > 0 ? 1 : 0;
  return out;
}

}  // namespace gbs
