#include "lcflow/manufactured.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "lcflow/parallel.hpp"

namespace lcflow::mms {

namespace {

// Forward-mode dual number; nesting two levels yields exact Hessians.
template <class T, int N>
struct Dual {
  T v{};
  std::array<T, N> d{};
};

template <class T, int N>
Dual<T, N> operator+(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r{a.v + b.v, {}};
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}
template <class T, int N>
Dual<T, N> operator-(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r{a.v - b.v, {}};
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}
template <class T, int N>
Dual<T, N> operator-(const Dual<T, N>& a) {
  Dual<T, N> r{-a.v, {}};
  for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
  return r;
}
template <class T, int N>
Dual<T, N> operator*(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r{a.v * b.v, {}};
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
template <class T, int N>
Dual<T, N> operator*(double s, const Dual<T, N>& a) {
  Dual<T, N> r{s * a.v, {}};
  for (int i = 0; i < N; ++i) r.d[i] = s * a.d[i];
  return r;
}
template <class T, int N>
Dual<T, N> operator+(double s, const Dual<T, N>& a) {
  Dual<T, N> r = a;
  r.v = s + a.v;
  return r;
}
template <class T, int N>
Dual<T, N> operator+(const Dual<T, N>& a, double s) {
  return s + a;
}

using std::cos;
using std::sin;

template <class T, int N>
Dual<T, N> sin(const Dual<T, N>& a) {
  const T c = cos(a.v);
  Dual<T, N> r{sin(a.v), {}};
  for (int i = 0; i < N; ++i) r.d[i] = c * a.d[i];
  return r;
}
template <class T, int N>
Dual<T, N> cos(const Dual<T, N>& a) {
  const T s = -sin(a.v);
  Dual<T, N> r{cos(a.v), {}};
  for (int i = 0; i < N; ++i) r.d[i] = s * a.d[i];
  return r;
}

using D1 = Dual<double, 3>;
using D2 = Dual<D1, 3>;

struct Params {
  double kx, ky, lz, c2 = 0.5;
};

Params params(const ChannelGrid& g) {
  return {2.0 * std::numbers::pi / g.lx, 2.0 * std::numbers::pi / g.ly, g.lz};
}

template <class S>
std::array<S, 3> velocity_shape(const S& x, const S& y, const S& z, const Params& q) {
  const double pi = std::numbers::pi;
  const S cz = cos((pi / q.lz) * z);
  const S sz = sin((pi / q.lz) * z);
  return {sin(q.kx * x) * cos(q.ky * y) * cz,
          q.c2 * (cos(q.kx * x) * cos((1.0 / q.lz) * (z + (-0.5 * q.lz)))),
          (-q.kx * q.lz / pi) * (cos(q.kx * x) * cos(q.ky * y) * sz)};
}

template <class S>
S pressure_shape(const S& x, const S& y, const S& z, const Params& q) {
  return 0.5 * (cos(q.kx * x) * sin(q.ky * y) * cos((std::numbers::pi / q.lz) * z));
}

template <class S>
std::array<S, 3> director_shape(const S& x, const S& y, const S& z, const Params& q) {
  const S beta = (0.4 + 0.2 * sin(q.kx * x)) * cos((std::numbers::pi / q.lz) * z);
  const S gamma = 0.5 * cos(q.ky * y);
  return {sin(beta) * cos(gamma), sin(beta) * sin(gamma), cos(beta)};
}

struct Jet {
  double v;
  std::array<double, 3> grad;
  double lap;
};

std::array<D2, 3> seed(double x, double y, double z) {
  std::array<double, 3> p{x, y, z};
  std::array<D2, 3> r{};
  for (int a = 0; a < 3; ++a) {
    r[a].v.v = p[a];
    r[a].v.d[a] = 1.0;
    r[a].d[a].v = 1.0;
  }
  return r;
}

Jet to_jet(const D2& f) {
  return {f.v.v, {f.d[0].v, f.d[1].v, f.d[2].v}, f.d[0].d[0] + f.d[1].d[1] + f.d[2].d[2]};
}

struct PointData {
  std::array<Jet, 3> u;
  std::array<Jet, 3> d;
  Jet p;
};

PointData evaluate(double x, double y, double z, const Params& q) {
  const auto s = seed(x, y, z);
  const auto U = velocity_shape(s[0], s[1], s[2], q);
  const auto Dv = director_shape(s[0], s[1], s[2], q);
  const auto P = pressure_shape(s[0], s[1], s[2], q);
  return {{to_jet(U[0]), to_jet(U[1]), to_jet(U[2])}, {to_jet(Dv[0]), to_jet(Dv[1]), to_jet(Dv[2])}, to_jet(P)};
}

struct MomentumTerms {
  double lin, quad, t, cst;
};

MomentumTerms momentum_terms(const PointData& pd, int c, double eps) {
  double adv = 0.0;
  for (int j = 0; j < 3; ++j) adv += pd.u[j].v * pd.u[c].grad[j];
  double stress = 0.0;
  for (int j = 0; j < 3; ++j) stress += pd.d[j].grad[c] * pd.d[j].lap;
  return {pd.u[c].v, adv, pd.p.grad[c] - eps * pd.u[c].lap, stress};
}

}  // namespace

SlipMatrixB required_slip(const ChannelGrid& g) { return {0.0, 0.0, std::tan(0.5) / g.lz}; }

double time_factor(double t) { return 1.0 + 0.5 * t; }

State exact_state(const ChannelGrid& g, double t) {
  const Params q = params(g);
  const double T = time_factor(t);
  State s{make_faces(g), make_scalar(g), make_vector(g), t, 0};
  par::for_each_cell(g.nx, g.ny, g.nz + 1, [&](int i, int j, int k) {
    if (k < g.nz) {
      s.u[0](i, j, k) = T * velocity_shape(g.xf(i), g.yc(j), g.zc(k), q)[0];
      s.u[1](i, j, k) = T * velocity_shape(g.xc(i), g.yf(j), g.zc(k), q)[1];
      s.p(i, j, k) = T * pressure_shape(g.xc(i), g.yc(j), g.zc(k), q);
      const auto dv = director_shape(g.xc(i), g.yc(j), g.zc(k), q);
      for (int c = 0; c < 3; ++c) s.d[c](i, j, k) = dv[c];
    }
    if (k > 0 && k < g.nz) s.u[2](i, j, k) = T * velocity_shape(g.xc(i), g.yc(j), g.zf(k), q)[2];
  });
  double mean = par::slab_sum(g.nx, g.ny, g.nz, [&](int i, int j, int k) { return s.p(i, j, k); });
  mean /= static_cast<double>(s.p.interior_size());
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) { s.p(i, j, k) -= mean; });
  s.d = renormalize_director(s.d);
  return s;
}

Forcing::Forcing(const ChannelGrid& g, double eps)
    : u_lin_(make_faces(g)),
      u_quad_(make_faces(g)),
      u_t_(make_faces(g)),
      u_const_(make_faces(g)),
      d_t_(make_vector(g)),
      d_const_(make_vector(g)) {
  const Params q = params(g);
  auto store = [&](int c, int i, int j, int k, double x, double y, double z) {
    const MomentumTerms m = momentum_terms(evaluate(x, y, z, q), c, eps);
    u_lin_[c](i, j, k) = m.lin;
    u_quad_[c](i, j, k) = m.quad;
    u_t_[c](i, j, k) = m.t;
    u_const_[c](i, j, k) = m.cst;
  };
  par::for_each_cell(g.nx, g.ny, g.nz + 1, [&](int i, int j, int k) {
    if (k < g.nz) {
      store(0, i, j, k, g.xf(i), g.yc(j), g.zc(k));
      store(1, i, j, k, g.xc(i), g.yf(j), g.zc(k));
      const PointData pd = evaluate(g.xc(i), g.yc(j), g.zc(k), q);
      double grad2 = 0.0;
      for (int c = 0; c < 3; ++c)
        for (int a = 0; a < 3; ++a) grad2 += pd.d[c].grad[a] * pd.d[c].grad[a];
      for (int c = 0; c < 3; ++c) {
        double adv = 0.0;
        for (int a = 0; a < 3; ++a) adv += pd.u[a].v * pd.d[c].grad[a];
        d_t_[c](i, j, k) = adv;
        d_const_[c](i, j, k) = -pd.d[c].lap - grad2 * pd.d[c].v;
      }
    }
    if (k > 0 && k < g.nz) store(2, i, j, k, g.xc(i), g.yc(j), g.zf(k));
  });
}

FaceField Forcing::velocity(double t) const {
  const double T = time_factor(t), dT = 0.5;
  FaceField out = u_lin_;
  for (int c = 0; c < 3; ++c) {
    auto o = out[c].storage();
    auto a = u_lin_[c].storage(), b = u_quad_[c].storage(), e = u_t_[c].storage(), f = u_const_[c].storage();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] = dT * a[n] + T * T * b[n] + T * e[n] + f[n];
  }
  return out;
}

VectorField Forcing::director(double t) const {
  const double T = time_factor(t);
  VectorField out = d_t_;
  for (int c = 0; c < 3; ++c) {
    auto o = out[c].storage();
    auto a = d_t_[c].storage(), b = d_const_[c].storage();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] = T * a[n] + b[n];
  }
  return out;
}

}  // namespace lcflow::mms
