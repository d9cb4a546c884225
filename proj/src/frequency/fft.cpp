#include "ccnls/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace ccnls {
namespace {

// FFTW planning is not thread safe; execution of an existing plan on new
// arrays is.  Plans are created once per shape under a lock and never freed.
struct PlanKey {
  std::vector<int> dims;
  int sign;
  bool operator<(const PlanKey& o) const {
    return dims != o.dims ? dims < o.dims : sign < o.sign;
  }
};

std::mutex g_plan_mutex;
std::map<PlanKey, fftw_plan> g_plans;

fftw_plan plan_for(const std::vector<int>& dims, int sign) {
  std::lock_guard lock(g_plan_mutex);
  PlanKey key{dims, sign};
  auto it = g_plans.find(key);
  if (it != g_plans.end()) return it->second;
  std::size_t n = 1;
  for (int v : dims) n *= static_cast<std::size_t>(v);
  std::vector<cplx> scratch(n);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), p, p, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  g_plans.emplace(key, plan);
  return plan;
}

void run(const std::vector<int>& dims, int sign, cvec& data) {
  std::size_t n = 1;
  for (int v : dims) n *= static_cast<std::size_t>(v);
  if (data.size() != n) throw std::logic_error("fft: array size does not match grid");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_for(dims, sign), p, p);
}

std::vector<int> spatial_dims(const Grid& g) { return std::vector<int>(g.d, g.M); }

std::vector<int> spacetime_dims(const Grid& g, int Q) {
  std::vector<int> dims{Q};
  for (int a = 0; a < g.d; ++a) dims.push_back(g.M);
  return dims;
}

void scale(cvec& data, double s) {
  for (auto& z : data) z *= s;
}

}  // namespace

void fft_forward(const Grid& g, cvec& data) { run(spatial_dims(g), FFTW_FORWARD, data); }

void fft_inverse(const Grid& g, cvec& data) {
  run(spatial_dims(g), FFTW_BACKWARD, data);
  scale(data, 1.0 / static_cast<double>(g.size()));
}

void fft_spacetime_forward(const Grid& g, int Q, cvec& data) {
  run(spacetime_dims(g, Q), FFTW_FORWARD, data);
}

void fft_spacetime_inverse(const Grid& g, int Q, cvec& data) {
  run(spacetime_dims(g, Q), FFTW_BACKWARD, data);
  scale(data, 1.0 / (static_cast<double>(g.size()) * Q));
}

double tau_of(int q, int Q, double dt) {
  int k = q < (Q + 1) / 2 ? q : q - Q;
  return 2.0 * kPi * k / (Q * dt);
}

}  // namespace ccnls
