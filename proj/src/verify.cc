// Copyright 2026 The revstack Authors.
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

#include "revstack/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "revstack/error.hpp"

namespace revstack {

namespace {

void check_announced(const GameProblem& problem, std::span<const AffineStrategy> announced,
                     int level) {
  if (level < 1 || level >= problem.levels()) {
    throw std::invalid_argument("oracle level must be a follower level of the game");
  }
  if (static_cast<int>(announced.size()) < level) {
    throw std::invalid_argument("announced strategies must cover every level above " +
                                std::to_string(problem.first_level + level + 1));
  }
  for (int i = 0; i < level; ++i) {
    if (announced[i].level != problem.first_level + i) {
      throw std::invalid_argument("announced strategies are not in level order");
    }
    announced[i].check(problem.dims, problem.first_level);
  }
}

struct Best {
  double value = std::numeric_limits<double>::infinity();
  long long index = -1;
  bool better_than(const Best& o) const {
    if (index < 0) return false;
    if (o.index < 0) return true;
    return value < o.value || (value == o.value && index < o.index);
  }
};

}  // namespace

DecisionPoint lift(const GameProblem& problem, std::span<const AffineStrategy> announced,
                   int level, const DecisionPoint& free) {
  check_announced(problem, announced, level);
  const int n = problem.levels();
  if (static_cast<int>(free.blocks.size()) != n - level) {
    throw DimensionError("free point must hold the blocks of levels " +
                         std::to_string(problem.first_level + level + 1) + " to " +
                         std::to_string(problem.first_level + n));
  }
  DecisionPoint x;
  x.blocks.resize(n);
  for (int j = level; j < n; ++j) x.blocks[j] = free.blocks[j - level];
  for (int i = level - 1; i >= 0; --i) {
    x.blocks[i] = announced[i].evaluate(std::span(x.blocks).subspan(i + 1));
  }
  x.check(problem.dims);
  return x;
}

OracleResult oracle_best_response(const GameProblem& problem,
                                  std::span<const AffineStrategy> announced, int level,
                                  const GridSpec& grid) {
  problem.check();
  check_announced(problem, announced, level);
  const Dims free_dims = problem.dims.tail(level);
  const int nf = free_dims.total();

  std::vector<double> lo(nf), hi(nf);
  if (!grid.bounds.empty()) {
    if (static_cast<int>(grid.bounds.size()) != nf) {
      throw DimensionError("grid bounds must list " + std::to_string(nf) + " coordinates");
    }
    for (int i = 0; i < nf; ++i) std::tie(lo[i], hi[i]) = grid.bounds[i];
  } else {
    const AffineStrategy& top = announced[0];
    DecisionPoint anchor(std::vector<Vector>(top.lower_anchor.begin() + (level - 1),
                                             top.lower_anchor.end()));
    const Vector a = anchor.flatten();
    for (int i = 0; i < nf; ++i) {
      lo[i] = a[i] - grid.radius;
      hi[i] = a[i] + grid.radius;
    }
  }
  for (int i = 0; i < nf; ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] < hi[i])) {
      throw std::invalid_argument("grid bounds must be finite with lower < upper");
    }
  }
  if (grid.points < 2) throw std::invalid_argument("grid needs at least two points per axis");

  int p = grid.points;
  const auto count = [&](int per_axis) {
    long double c = 1.0L;
    for (int i = 0; i < nf; ++i) c *= per_axis;
    return c;
  };
  while (p > 3 && count(p) > static_cast<long double>(grid.max_evaluations)) p -= 2;
  const long long total = static_cast<long long>(count(p));

  // The composition is affine in the free variables: x = base + map * y.
  const DecisionPoint zero = DecisionPoint::zeros(free_dims);
  const Vector base = lift(problem, announced, level, zero).flatten();
  Matrix map(problem.dims.total(), nf);
  for (int i = 0; i < nf; ++i) {
    Vector e = Vector::Zero(nf);
    e[i] = 1.0;
    map.col(i) = lift(problem, announced, level, DecisionPoint::from_flat(free_dims, e)).flatten() -
                 base;
  }
  const Objective& objective = problem.objectives.at(level);
  std::vector<double> spacing(nf);
  for (int i = 0; i < nf; ++i) spacing[i] = (hi[i] - lo[i]) / (p - 1);

  const auto scan = [&](long long begin, long long end) {
    ObjectiveEvaluator f(objective);
    Vector y(nf), x(problem.dims.total());
    Best best;
    for (long long idx = begin; idx < end; ++idx) {
      long long rest = idx;
      for (int i = nf - 1; i >= 0; --i) {
        const long long k = rest % p;
        rest /= p;
        y[i] = lo[i] + spacing[i] * static_cast<double>(k);
      }
      x.noalias() = base + map * y;
      const double v = f(x);
      if (std::isnan(v)) continue;
      if (best.index < 0 || v < best.value) best = {v, idx};
    }
    return best;
  };

  Best best;
  const int threads = static_cast<int>(std::max<long long>(1, std::min<long long>(grid.threads, total)));
  if (threads == 1) {
    best = scan(0, total);
  } else {
    std::vector<Best> parts(threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      const long long b = total * t / threads, e = total * (t + 1) / threads;
      pool.emplace_back([&, t, b, e] { parts[t] = scan(b, e); });
    }
    for (auto& th : pool) th.join();
    for (const Best& b : parts) {
      if (b.better_than(best)) best = b;
    }
  }

  Vector y(nf);
  {
    long long rest = std::max(best.index, 0LL);
    for (int i = nf - 1; i >= 0; --i) {
      y[i] = lo[i] + spacing[i] * static_cast<double>(rest % p);
      rest /= p;
    }
  }
  OracleResult out;
  out.points_per_axis = p;
  out.evaluations = total;
  out.grid_point = DecisionPoint::from_flat(free_dims, y);

  ObjectiveEvaluator f(objective);
  const auto eval = [&](const Vector& v) {
    const double r = f(Vector(base + map * v));
    return std::isnan(r) ? std::numeric_limits<double>::infinity() : r;
  };
  Vector x = y;
  double fx = eval(x);
  if (grid.refine) {
    std::vector<double> step = spacing;
    for (int it = 0; it < grid.refine_iterations; ++it) {
      for (int sweep = 0; sweep < 10000; ++sweep) {
        bool improved = false;
        for (int i = 0; i < nf; ++i) {
          for (const double sign : {1.0, -1.0}) {
            Vector trial = x;
            trial[i] += sign * step[i];
            const double ft = eval(trial);
            ++out.evaluations;
            if (ft < fx) {
              x = std::move(trial);
              fx = ft;
              improved = true;
              break;
            }
          }
        }
        if (!improved) break;
      }
      for (double& s : step) s *= grid.refine_factor;
    }
  }
  for (int i = 0; i < nf; ++i) {
    out.refinement_shift = std::max(out.refinement_shift, std::abs(x[i] - y[i]) / spacing[i]);
  }
  out.low_confidence = out.refinement_shift > 2.0;
  out.point = DecisionPoint::from_flat(free_dims, x);
  out.value = fx;
  return out;
}

SublevelStats sublevel_inequality_check(const SublevelProbe& probe,
                                        const AffineStrategy& strategy,
                                        const BallSampler& sampler, double tol) {
  if (sampler.count < 1) throw std::invalid_argument("sampler count must be at least 1");
  const Dims& dims = probe.objective.dims();
  probe.anchor.check(dims);
  const Dims lower_dims = dims.tail(1);
  const Vector center = probe.anchor.tail(1).flatten();
  ObjectiveEvaluator f(probe.objective);
  BallStream stream(center, sampler.radius, sampler.seed, sampler.law);

  SublevelStats out;
  out.threshold = probe.threshold;
  out.min_value = std::numeric_limits<double>::infinity();
  Vector x(dims.total());
  const int m0 = dims.size(0);
  for (int i = 0; i < sampler.count; ++i) {
    const Vector y = stream.next();
    const DecisionPoint yb = DecisionPoint::from_flat(lower_dims, y);
    x.head(m0) = strategy.evaluate(yb.blocks);
    x.tail(lower_dims.total()) = y;
    const double v = f(x);
    ++out.samples;
    if (v < probe.threshold - tol) ++out.violations;
    if (v < out.min_value) {
      out.min_value = v;
      out.min_point = y;
    }
  }
  return out;
}

VerificationReport verify_full(const GameProblem& problem,
                               std::span<const AffineStrategy> strategies, double tol,
                               const GridSpec& grid, const SamplingOptions& sampling) {
  problem.check();
  const int n = problem.levels();
  if (static_cast<int>(strategies.size()) != n - 1) {
    throw std::invalid_argument("verification needs one strategy for each of the " +
                                std::to_string(n - 1) + " leader levels");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("verification tolerance must be positive");
  for (int i = 0; i < n - 1; ++i) {
    if (strategies[i].level != problem.first_level + i) {
      throw std::invalid_argument("strategies are not in level order");
    }
    strategies[i].check(problem.dims, problem.first_level);
  }

  VerificationReport rep;
  rep.tol = tol;
  rep.desired.blocks.push_back(strategies[0].anchor);
  for (const Vector& b : strategies[0].lower_anchor) rep.desired.blocks.push_back(b);
  for (int i = 1; i < n - 1; ++i) {
    bool same = strategies[i].anchor == rep.desired.blocks[i];
    for (int k = 0; k < strategies[i].lower_levels(); ++k) {
      same = same && strategies[i].lower_anchor[k] == rep.desired.blocks[i + 1 + k];
    }
    if (!same) throw std::invalid_argument("strategies disagree on the desired point");
  }
  const auto fail = [&](const std::string& why) { rep.reasons.push_back(why); };
  const auto lname = [&](int rel) { return "u" + std::to_string(problem.first_level + rel + 1); };

  rep.levels.resize(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    rep.levels[i].level = strategies[i].level;
  }

  // Realization.
  for (int i = 0; i < n - 1; ++i) {
    LevelReport& lr = rep.levels[i];
    lr.realization_residual = strategies[i].realization_residual();
    lr.realization_ok = lr.realization_residual <= 1e-9 * (1.0 + strategies[i].anchor.norm());
    if (!lr.realization_ok) fail("realization residual too large for " + lname(i));
  }

  // Hyperplane membership along the reduction chain.
  {
    GameProblem stage = problem;
    for (int i = 0; i < n - 1; ++i) {
      const DecisionPoint ds = rep.desired.tail(i);
      LevelReport& lr = rep.levels[i];
      try {
        lr.existence = leader_existence_check(stage, ds);
      } catch (const Error& e) {
        lr.existence_error = e.what();
      }
      lr.hyperplane = hyperplane_membership(stage, strategies[i], ds, sampling.hyperplane_samples,
                                            sampling.seed + static_cast<std::uint64_t>(i));
      if (!lr.hyperplane.passed) fail("strategy graph of " + lname(i) + " leaves the hyperplane");
      const double thr_scale = 1e-9;
      BallSampler sampler = sampling.sublevel;
      sampler.seed = sampling.sublevel.seed + static_cast<std::uint64_t>(i);
      const SublevelProbe probe = make_probe(stage.objectives[1], ds);
      lr.sublevel = sublevel_inequality_check(probe, strategies[i], sampler,
                                              thr_scale * (1.0 + std::abs(probe.threshold)));
      if (i + 1 < n - 1) stage = reduce_problem(stage, strategies[i]);
    }
  }

  // Oracle argmin and the chain back to the desired blocks.
  for (int i = 0; i < n - 1; ++i) {
    LevelReport& lr = rep.levels[i];
    const int follower = i + 1;
    lr.oracle = oracle_best_response(problem, strategies, follower, grid);
    lr.argmin_distance = (lr.oracle.point.flatten() - rep.desired.tail(follower).flatten()).norm();
    lr.argmin_ok = lr.argmin_distance <= tol;
    if (!lr.argmin_ok) {
      std::ostringstream os;
      os << "oracle argmin for " << lname(follower) << " is " << lr.argmin_distance
         << " away from the desired point";
      fail(os.str());
    }
    const Vector back = strategies[i].evaluate(lr.oracle.point.blocks);
    lr.chain_residual = (back - strategies[i].anchor).norm();
    lr.chain_ok = lr.chain_residual <= tol * (1.0 + strategies[i].coeff_norm());
    if (!lr.chain_ok) fail("strategy of " + lname(i) + " at the oracle argmin misses its block");
  }

  for (int i = 0; i < n - 1; ++i) {
    if (rep.levels[i].sublevel.violations > 0) {
      fail(std::to_string(rep.levels[i].sublevel.violations) +
           " sampled points on the strategy graph of " + lname(i) +
           " undercut the follower's desired cost");
    }
  }
  rep.verified = rep.reasons.empty();
  return rep;
}

}  // namespace revstack
