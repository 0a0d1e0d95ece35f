// Copyright 2026 The QKFE Authors
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

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "qkfe/errors.hpp"
#include "qkfe/thei.hpp"

using namespace qkfe;

namespace {

constexpr double kPi = oracle::kPi;

// Undamped cosine series of the normalized density a e^{-a eps} / (1 - e^{-a})
// on [0, 1], coefficients in closed form.
SpectralSeries exponential_series(double a, int N) {
  std::vector<double> c(N);
  const double z = -std::expm1(-a) / a;
  for (int n = 0; n < N; ++n) {
    c[n] = n == 0 ? -std::expm1(-a) / a
                  : (a - a * (n % 2 ? -1.0 : 1.0) * std::exp(-a)) / (a * a + n * n * kPi * kPi);
    c[n] /= z;
  }
  return reconstruct(c, SpectralSeries::Kind::dos, false);
}

struct Chain {
  SparseOperator h;
  RescaledOperator rs;
  SpectrumDecomposition spec;
};

Chain chain(int L) {
  auto h = to_sparse(build_1d_xxz(L, -0.9));
  auto rs = rescale(h, std::nullopt);
  auto spec = eigendecompose(h);
  return {std::move(h), std::move(rs), std::move(spec)};
}

}  // namespace

TEST_SUITE("thei") {

TEST_CASE("canonical moments") {
  const auto c = chain(8);
  const auto r = c.rs.rescaling;
  const auto hot = canonical_moments(gibbs_ensemble(c.spec, 0.0, r), c.spec, r, 40);
  const auto dos = moments_exact(c.spec, r, 40);
  for (int n = 0; n < 40; ++n) CHECK(hot.values[n] == doctest::Approx(dos.values[n]).epsilon(1e-12));

  const auto cold = canonical_moments(gibbs_ensemble(c.spec, kInfiniteBeta, r), c.spec, r, 40);
  const double eg = r.to_rescaled(c.spec.eigenvalues(0));
  for (int n = 0; n < 40; ++n) CHECK(cold.values[n] == doctest::Approx(std::cos(n * kPi * eg)).epsilon(1e-9));
  CHECK(cold.eps_star == doctest::Approx(eg));

  const auto warm = canonical_moments(gibbs_ensemble(c.spec, 1.0, r), c.spec, r, 40);
  CHECK(warm.values[0] == 1.0);
  for (double v : warm.values) CHECK(std::abs(v) <= 1.0 + 1e-12);
}

TEST_CASE("thermal pure state moments match Gibbs moments") {
  const auto c = chain(8);
  const auto r = c.rs.rescaling;
  const int N = 16;
  const auto gibbs = canonical_moments(gibbs_ensemble(c.spec, 1.0, r), c.spec, r, N);
  // The spread of twenty independent 10-state batches estimates the sampling
  // error of a 200-state run.
  const int B = 20;
  std::vector<CanonicalMoments> batches;
  for (int b = 0; b < B; ++b) batches.push_back(canonical_moments_tpq(c.rs, 1.0, 10, 1000 + b, N));
  const auto all = canonical_moments_tpq(c.rs, 1.0, 200, 77, N);
  for (int n = 1; n < N; ++n) {
    double m = 0, m2 = 0;
    for (const auto& b : batches) {
      m += b.values[n];
      m2 += b.values[n] * b.values[n];
    }
    m /= B;
    const double batch_var = (m2 / B - m * m) * B / (B - 1);
    const double se = std::sqrt(batch_var / B);
    CHECK(std::abs(all.values[n] - gibbs.values[n]) <= 4 * se);
  }
  CHECK(all.eps_star == doctest::Approx(gibbs.eps_star).epsilon(0.01));
}

TEST_CASE("energy distribution") {
  const auto c = chain(8);
  const auto r = c.rs.rescaling;
  const auto hot = canonical_moments(gibbs_ensemble(c.spec, 0.0, r), c.spec, r, 100);
  const auto g0 = reconstruct_G(hot);
  const auto dos = reconstruct(moments_exact(c.spec, r, 100));
  for (double e : {0.1, 0.33, 0.5, 0.9}) CHECK(g0.evaluate(e) == doctest::Approx(dos.evaluate(e)).epsilon(1e-12));

  const Rescaling unit{0.0, 1.0, 1.0, 0.0, 2};
  const auto two = eigendecompose(SparseOperator(2, {0, 1, 2}, {0, 1}, {0.0, 1.0}));
  const auto g2 = reconstruct_G(canonical_moments(gibbs_ensemble(two, 1.0, unit), two, unit, 64));
  const double total = oracle::integrate([&](double e) { return g2.evaluate(e); }, 0.0, 1.0, 1e-13);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));

  const auto warm = canonical_moments(gibbs_ensemble(c.spec, 1.0, r), c.spec, r, 100);
  const auto g1 = reconstruct_G(warm);
  double best = 0, arg = 0;
  for (int i = 0; i < 2048; ++i) {
    const double e = (i + 0.5) / 2048;
    if (g1.evaluate(e) > best) {
      best = g1.evaluate(e);
      arg = e;
    }
  }
  CHECK(std::abs(arg - warm.eps_star) < warm.sigma_eps);
  CHECK_THROWS_AS(reconstruct_G(CanonicalMoments{{1.0}, 0.5, 0.1, "x"}), InvalidArgument);
}

TEST_CASE("overlap windows") {
  const auto w = overlap_window(0.5, 0.1, 0.45, 0.1);
  CHECK(w.lo == doctest::Approx(0.4));
  CHECK(w.hi == doctest::Approx(0.55));
  CHECK(w.grid().size() == 512);
  CHECK(w.grid().front() >= w.lo);
  CHECK(w.grid().back() <= w.hi);
  CHECK_THROWS_AS(overlap_window(0.2, 0.05, 0.8, 0.05), WindowError);
  const auto clipped = overlap_window(0.02, 0.1, 0.03, 0.1);
  CHECK(clipped.lo > 0.0);
}

TEST_CASE("manufactured step is recovered exactly") {
  const double width = 10.0;
  const double beta_prev = 0.2;
  const double dbeta = 0.05;
  const auto g_prev = exponential_series(beta_prev * width, 4000);
  const auto g_next = exponential_series((beta_prev + dbeta) * width, 4000);
  const auto step = infer_beta_step(g_prev, g_next, beta_prev, 0.4, 0.1, width);
  CHECK(step.beta == doctest::Approx(beta_prev + dbeta).epsilon(1e-6));
  CHECK(step.residual < 1e-10);

  const Window w{0.3, 0.5, 512};
  const double off = constancy_objective(g_prev, g_next, beta_prev, step.beta + 0.5 / width, w, width);
  CHECK(off > 10 * step.residual);
  CHECK(off > 1e-6);

  // G_next = G_prev e^{-dbeta W eps} zb / za, so the ratio is zb / za
  const double za = -std::expm1(-beta_prev * width) / (beta_prev * width);
  const double zb = -std::expm1(-(beta_prev + dbeta) * width) / ((beta_prev + dbeta) * width);
  CHECK(logz_ratio(g_prev, g_next, beta_prev, step.beta, w, width) ==
        doctest::Approx(std::log(zb / za)).epsilon(1e-6));
  CHECK(std::abs(logz_ratio(g_prev, g_prev, beta_prev, beta_prev, w, width)) < 1e-14);

  CHECK_THROWS_AS(infer_beta_step(g_prev, g_next, beta_prev, 0.4, 0.1, width, BetaBracket{0.0, 1e-6}),
                  BracketError);
}

TEST_CASE("window errors on non-positive distributions") {
  std::vector<double> c(20, 0.0);
  c[0] = 0.2;
  c[1] = 0.5;  // 0.2 + cos(pi eps) is negative above eps ~ 0.56
  const auto bad = reconstruct(c, SpectralSeries::Kind::dos, false);
  const auto good = exponential_series(1.0, 200);
  CHECK_THROWS_AS(infer_beta_step(good, bad, 0.0, 0.7, 0.05, 1.0), WindowError);
  CHECK_THROWS_AS(logz_ratio(good, bad, 0.0, 0.1, Window{0.6, 0.8, 64}, 1.0), WindowError);
}

TEST_CASE("one Gibbs step on the chain") {
  const auto c = chain(8);
  const auto r = c.rs.rescaling;
  const auto m0 = canonical_moments(gibbs_ensemble(c.spec, 0.0, r), c.spec, r, 100);
  const auto m1 = canonical_moments(gibbs_ensemble(c.spec, 0.1, r), c.spec, r, 100);
  const auto w = overlap_window(m0.eps_star, m0.sigma_eps, m1.eps_star, m1.sigma_eps);
  const auto step = infer_beta_step(reconstruct_G(m0), reconstruct_G(m1), 0.0,
                                    w.center(), w.half_width(), r.width());
  CHECK(step.beta == doctest::Approx(0.1).epsilon(0.02));
}

TEST_CASE("two-level partition ratio") {
  const double width = 1.0;
  const Rescaling unit{0.0, 1.0, 1.0, 0.0, 2};
  const auto two = eigendecompose(SparseOperator(2, {0, 1, 2}, {0, 1}, {0.0, 1.0}));
  const auto g0 = reconstruct_G(canonical_moments(gibbs_ensemble(two, 0.0, unit), two, unit, 128));
  const auto g1 = reconstruct_G(canonical_moments(gibbs_ensemble(two, 1.0, unit), two, unit, 128));
  // near the lower level the upper level's kernel tail is negligible
  const Window w{1e-4, 4e-3, 256};
  const double expected = std::log((1 + std::exp(-width)) / 2);
  CHECK(logz_ratio(g0, g1, 0.0, 1.0, w, width) == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("Gibbs-driven run") {
  const auto c = chain(8);
  const auto r = c.rs.rescaling;
  GibbsSource source(c.spec, r);
  TheiOptions opts;
  opts.beta_max = 1.0;
  const auto trace = thei_run(source, r, opts);
  REQUIRE(trace.complete);
  REQUIRE(trace.rows.size() >= 2);
  const auto& first = trace.rows.front();
  CHECK(first.beta == 0.0);
  CHECK(first.log_z == doctest::Approx(8 * std::log(2.0)));
  CHECK(first.entropy == doctest::Approx(8 * std::log(2.0)));
  CHECK(first.eps_star == doctest::Approx(r.to_rescaled(c.spec.eigenvalues.mean())));
  for (std::size_t i = 1; i < trace.rows.size(); ++i) {
    CHECK(trace.rows[i].beta > trace.rows[i - 1].beta);
    CHECK(trace.rows[i].residual >= 0.0);
  }
  const auto& last = trace.rows.back();
  CHECK(last.beta >= 1.0 * 0.98);
  const Eigen::VectorXd ev = c.spec.eigenvalues;
  CHECK(last.log_z == doctest::Approx(oracle::gibbs(ev, last.beta).log_z).epsilon(0.01));
  CHECK(last.free_energy <= last.energy);

  std::ostringstream out;
  trace.to_table().write_text(out, {});
  CHECK(out.str().find("step\teps_star\tbeta\tT\tlogZ\tE\tF\tS\tresidual\tsigma_eps\tkernel\tverified") !=
        std::string::npos);
}

TEST_CASE("thermal pure state run follows the Gibbs run") {
  const auto c = chain(6);
  const auto r = c.rs.rescaling;
  GibbsSource gibbs(c.spec, r);
  TpqSource tpq(c.rs, 60, 5);
  TheiOptions opts;
  opts.beta_max = 0.5;
  const auto tg = thei_run(gibbs, r, opts);
  const auto tt = thei_run(tpq, r, opts);
  REQUIRE(tt.complete);
  const auto& last = tt.rows.back();
  const auto exact = oracle::gibbs(c.spec.eigenvalues, last.beta);
  CHECK(last.log_z == doctest::Approx(exact.log_z).epsilon(0.03));
  CHECK(tg.rows.back().beta > 0.0);
}

TEST_CASE("non-Gibbs ensembles are flagged") {
  const auto c = chain(8);
  const auto r = c.rs.rescaling;
  MicrocanonicalSource shell(c.spec, r);
  TheiOptions opts;
  opts.beta_max = 1.0;
  opts.max_steps = 12;
  const auto trace = thei_run(shell, r, opts);
  double worst = 0.0;
  bool flagged = false;
  for (std::size_t i = 1; i < trace.rows.size(); ++i) {
    worst = std::max(worst, trace.rows[i].residual);
    flagged = flagged || !trace.rows[i].verified;
  }
  CHECK(worst > opts.residual_threshold);
  CHECK(flagged);
}

TEST_CASE("run options are validated") {
  const auto c = chain(4);
  GibbsSource source(c.spec, c.rs.rescaling);
  TheiOptions opts;
  CHECK_THROWS_AS(thei_run(source, c.rs.rescaling, opts), InvalidArgument);  // no target
  opts.beta_max = 1.0;
  opts.cutoff = 8;
  CHECK_THROWS_AS(thei_run(source, c.rs.rescaling, opts), InvalidArgument);
}

}  // TEST_SUITE
