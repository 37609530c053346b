// Copyright 2026 The pecsim Authors
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

#include "pecsim/postproc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "parallel.hpp"
#include "pecsim/errors.hpp"
#include "pecsim/rng.hpp"

namespace pecsim {
namespace {

bool on_simplex(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) {
    if (!(v >= 0.0)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                    static_cast<double>(x.size());
}

RealVector clipped(std::span<const double> p) {
  RealVector out(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) out(static_cast<Eigen::Index>(i)) = std::max(p[i], 0.0);
  return out;
}

BootstrapResult summarize_replicates(std::vector<double> point,
                                     const std::vector<std::vector<double>>& reps) {
  BootstrapResult r;
  r.replicates = reps.size();
  const std::size_t outputs = point.size();
  r.stddev.assign(outputs, 0.0);
  r.err_lo.assign(outputs, 0.0);
  r.err_hi.assign(outputs, 0.0);
  for (std::size_t k = 0; k < outputs; ++k) {
    double mean = 0.0;
    for (const auto& rep : reps) mean += rep[k];
    mean /= static_cast<double>(reps.size());
    double ss = 0.0, ss_hi = 0.0, ss_lo = 0.0;
    std::size_t n_hi = 0, n_lo = 0;
    for (const auto& rep : reps) {
      ss += (rep[k] - mean) * (rep[k] - mean);
      const double d = rep[k] - point[k];
      if (d > 0.0) {
        ss_hi += d * d;
        ++n_hi;
      } else if (d < 0.0) {
        ss_lo += d * d;
        ++n_lo;
      }
    }
    r.stddev[k] = reps.size() > 1 ? std::sqrt(ss / static_cast<double>(reps.size() - 1)) : 0.0;
    r.err_hi[k] = n_hi > 0 ? std::sqrt(ss_hi / static_cast<double>(n_hi)) : 0.0;
    r.err_lo[k] = n_lo > 0 ? std::sqrt(ss_lo / static_cast<double>(n_lo)) : 0.0;
  }
  r.point = std::move(point);
  return r;
}

void check_replicates(int replicates) {
  if (replicates < kMinBootstrapReplicates) {
    throw Error(ErrorCode::kInsufficientData,
                "bootstrap needs at least " + std::to_string(kMinBootstrapReplicates) +
                    " replicates");
  }
}

}  // namespace

std::string stage_name(Stage stage) {
  switch (stage) {
    case Stage::kIdeal: return "ideal";
    case Stage::kNoisy: return "noisy";
    case Stage::kRaw: return "raw";
    case Stage::kPec: return "pec";
    case Stage::kMle: return "mle";
    case Stage::kPs: return "ps";
  }
  return "raw";
}

Stage parse_stage(std::string_view name) {
  for (Stage s : {Stage::kIdeal, Stage::kNoisy, Stage::kRaw, Stage::kPec, Stage::kMle, Stage::kPs}) {
    if (stage_name(s) == name) return s;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown stage '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// SymmetrySector

SymmetrySector SymmetrySector::from_labels(std::span<const std::string> labels) {
  if (labels.empty()) throw Error(ErrorCode::kInvalidArgument, "empty symmetry sector");
  SymmetrySector s;
  s.qubit_count = static_cast<int>(labels[0].size());
  for (const auto& l : labels) {
    if (static_cast<int>(l.size()) != s.qubit_count) {
      throw Error(ErrorCode::kInvalidArgument, "sector labels of different width");
    }
    s.allowed.push_back(basis_index(l));
  }
  std::sort(s.allowed.begin(), s.allowed.end());
  s.allowed.erase(std::unique(s.allowed.begin(), s.allowed.end()), s.allowed.end());
  s.description = "explicit";
  return s;
}

SymmetrySector SymmetrySector::matching(int qubit_count, std::span<const std::size_t> support,
                                        bool spin_resolved) {
  if (support.empty()) throw Error(ErrorCode::kInvalidArgument, "empty state support");
  if (spin_resolved && qubit_count % 2 != 0) {
    throw Error(ErrorCode::kBadLayout, "spin-resolved sector needs an even qubit count");
  }
  const std::size_t dim = ipow(2, qubit_count);
  const int half = qubit_count / 2;
  const std::size_t down_mask = (std::size_t{1} << half) - 1;
  auto quantum_numbers = [&](std::size_t x) -> std::pair<int, int> {
    if (!spin_resolved) return {std::popcount(x), 0};
    return {std::popcount(x >> half), std::popcount(x & down_mask)};
  };
  std::vector<std::pair<int, int>> wanted;
  for (std::size_t x : support) wanted.push_back(quantum_numbers(x));

  SymmetrySector s;
  s.qubit_count = qubit_count;
  for (std::size_t x = 0; x < dim; ++x) {
    if (std::find(wanted.begin(), wanted.end(), quantum_numbers(x)) != wanted.end()) {
      s.allowed.push_back(x);
    }
  }
  s.description = spin_resolved ? "fixed up and down fermion numbers" : "fixed fermion number";
  return s;
}

bool SymmetrySector::contains(std::size_t index) const {
  return std::binary_search(allowed.begin(), allowed.end(), index);
}

std::vector<std::string> SymmetrySector::labels() const {
  std::vector<std::string> out;
  for (std::size_t x : allowed) out.push_back(basis_label(x, qubit_count));
  return out;
}

// ---------------------------------------------------------------------------

RealVector mle_project(std::span<const double> raw) {
  if (raw.empty()) throw Error(ErrorCode::kInvalidArgument, "empty population vector");
  for (double v : raw) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite population");
  }
  const auto n = static_cast<Eigen::Index>(raw.size());
  if (on_simplex(raw)) return Eigen::Map<const RealVector>(raw.data(), n);

  std::vector<double> sorted(raw.begin(), raw.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    prefix += sorted[k];
    const double candidate = (prefix - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  RealVector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = std::max(raw[static_cast<std::size_t>(i)] - theta, 0.0);
  return x;
}

PostSelection post_select(std::span<const double> p, const SymmetrySector& sector) {
  if (p.size() != ipow(2, sector.qubit_count)) {
    throw Error(ErrorCode::kDimensionMismatch, "population vector does not match sector width");
  }
  PostSelection out;
  out.values = RealVector::Zero(static_cast<Eigen::Index>(p.size()));
  double kept = 0.0;
  double total = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    total += p[x];
    if (sector.contains(x)) {
      out.values(static_cast<Eigen::Index>(x)) = p[x];
      kept += p[x];
    }
  }
  if (kept < 1e-9) throw Error(ErrorCode::kEmptySector, "no population inside the sector");
  out.values /= kept;
  out.leakage = total - kept;
  return out;
}

double population_fidelity(std::span<const double> p, std::span<const double> ideal,
                           FidelityMode mode) {
  if (p.size() != ideal.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "fidelity of vectors of different length");
  }
  RealVector a = clipped(p);
  RealVector b = clipped(ideal);
  if (mode == FidelityMode::kNormalized) {
    if (b.sum() <= 0.0) throw Error(ErrorCode::kInvalidArgument, "ideal vector has no mass");
    // A pseudo-distribution with no positive entry shares no support with anything.
    if (a.sum() <= 0.0) return 0.0;
    a /= a.sum();
    b /= b.sum();
  }
  double overlap = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) overlap += std::sqrt(a(i) * b(i));
  return overlap * overlap;
}

FidelityFit fit_fidelity_per_gate(std::span<const double> steps, std::span<const double> fidelities,
                                  int gates_per_step) {
  const std::size_t n = steps.size();
  if (n != fidelities.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "steps and fidelities differ in length");
  }
  if (n < 3) throw Error(ErrorCode::kFitDegenerate, "fit needs at least 3 steps");
  if (gates_per_step < 1) throw Error(ErrorCode::kInvalidArgument, "gates_per_step must be >= 1");
  if (*std::max_element(steps.begin(), steps.end()) == *std::min_element(steps.begin(), steps.end())) {
    throw Error(ErrorCode::kFitDegenerate, "all fidelities recorded at the same step");
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = gates_per_step * steps[i];

  // Log-linear start, then Levenberg-Marquardt on (A, f).
  double amp = *std::max_element(fidelities.begin(), fidelities.end());
  double f = 0.99;
  if (std::all_of(fidelities.begin(), fidelities.end(), [](double v) { return v > 0.0; })) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = std::log(fidelities[i]);
      sx += x[i];
      sy += y;
      sxx += x[i] * x[i];
      sxy += x[i] * y;
    }
    const double dn = static_cast<double>(n);
    const double slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
    f = std::exp(slope);
    amp = std::exp((sy - slope * sx) / dn);
  }
  if (!(amp > 0.0)) throw Error(ErrorCode::kFitDegenerate, "no positive fidelity to fit");

  auto rss_of = [&](double a, double ff) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = a * std::pow(ff, x[i]) - fidelities[i];
      s += r * r;
    }
    return s;
  };
  auto normal_equations = [&](double a, double ff, Eigen::Matrix2d& jtj, Eigen::Vector2d& jtr) {
    jtj.setZero();
    jtr.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      const double fx = std::pow(ff, x[i]);
      const Eigen::Vector2d jac(fx, x[i] == 0.0 ? 0.0 : a * x[i] * std::pow(ff, x[i] - 1.0));
      const double r = a * fx - fidelities[i];
      jtj += jac * jac.transpose();
      jtr += jac * r;
    }
  };

  double rss = rss_of(amp, f);
  double damping = 1e-3;
  for (int iter = 0; iter < 500 && rss > 0.0; ++iter) {
    Eigen::Matrix2d jtj;
    Eigen::Vector2d jtr;
    normal_equations(amp, f, jtj, jtr);
    Eigen::Matrix2d lhs = jtj;
    lhs.diagonal() *= 1.0 + damping;
    const Eigen::Vector2d delta = lhs.ldlt().solve(-jtr);
    const double a_new = amp + delta(0);
    const double f_new = f + delta(1);
    const double rss_new = f_new > 0.0 ? rss_of(a_new, f_new) : INFINITY;
    if (rss_new < rss) {
      const double improvement = rss - rss_new;
      amp = a_new;
      f = f_new;
      rss = rss_new;
      damping = std::max(damping / 10.0, 1e-12);
      if (improvement < 1e-30 || delta.norm() < 1e-15) break;
    } else {
      damping *= 10.0;
      if (damping > 1e12) break;
    }
  }

  Eigen::Matrix2d jtj;
  Eigen::Vector2d jtr;
  normal_equations(amp, f, jtj, jtr);
  if (std::abs(jtj.determinant()) < 1e-300) {
    throw Error(ErrorCode::kFitDegenerate, "fit Jacobian is singular");
  }
  const double sigma2 = rss / static_cast<double>(n - 2);
  const Eigen::Matrix2d cov = sigma2 * jtj.inverse();

  FidelityFit fit;
  fit.per_gate = f;
  fit.amplitude = amp;
  fit.standard_error = std::sqrt(std::max(cov(1, 1), 0.0));
  return fit;
}

SpinLayout SpinLayout::chain(int sites) {
  SpinLayout l;
  for (int s = 0; s < sites; ++s) {
    l.up.push_back(s);
    l.down.push_back(sites + s);
  }
  return l;
}

SpinCharge spin_charge(std::span<const double> p, const SpinLayout& layout, int site) {
  if (layout.up.size() != layout.down.size() || site < 0 ||
      static_cast<std::size_t>(site) >= layout.up.size()) {
    throw Error(ErrorCode::kBadLayout, "site " + std::to_string(site) + " not in layout");
  }
  std::size_t dim = 1;
  int n = 0;
  while (dim < p.size()) {
    dim *= 2;
    ++n;
  }
  if (dim != p.size() || n < 1) throw Error(ErrorCode::kBadLayout, "population size is not 2^n");
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (const auto* half : {&layout.up, &layout.down}) {
    for (int q : *half) {
      if (q < 0 || q >= n || used[static_cast<std::size_t>(q)]) {
        throw Error(ErrorCode::kBadLayout, "layout qubits out of range or repeated");
      }
      used[static_cast<std::size_t>(q)] = true;
    }
  }
  const int up = layout.up[static_cast<std::size_t>(site)];
  const int down = layout.down[static_cast<std::size_t>(site)];
  double n_up = 0.0, n_down = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if ((x >> (n - 1 - up)) & 1U) n_up += p[x];
    if ((x >> (n - 1 - down)) & 1U) n_down += p[x];
  }
  return {n_up - n_down, n_up + n_down};
}

BootstrapResult bootstrap_records(std::size_t record_count, const RecordPipeline& pipeline,
                                  int replicates, std::uint64_t seed) {
  check_replicates(replicates);
  if (record_count == 0) throw Error(ErrorCode::kInsufficientData, "no records to resample");
  std::vector<std::size_t> identity(record_count);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  std::vector<double> point = pipeline(identity);

  std::vector<std::vector<double>> reps(static_cast<std::size_t>(replicates));
  detail::parallel_for(reps.size(), [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    std::vector<std::size_t> idx(record_count);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(record_count));
    reps[r] = pipeline(idx);
    if (reps[r].size() != point.size()) {
      throw Error(ErrorCode::kInvalidArgument, "pipeline output size changed between replicates");
    }
  });
  return summarize_replicates(std::move(point), reps);
}

BootstrapResult bootstrap_shots(const ShotCounts& counts, const CountsPipeline& pipeline,
                                int replicates, std::uint64_t seed) {
  check_replicates(replicates);
  if (counts.shots <= 0) throw Error(ErrorCode::kInsufficientData, "no shots to resample");
  std::vector<double> cdf(counts.counts.size());
  double running = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    running += static_cast<double>(counts.counts[i]);
    cdf[i] = running;
  }
  std::vector<double> point = pipeline(counts);
  std::vector<std::vector<double>> reps(static_cast<std::size_t>(replicates));
  detail::parallel_for(reps.size(), [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    ShotCounts resampled = counts;
    resampled.clipped = false;
    std::fill(resampled.counts.begin(), resampled.counts.end(), 0);
    for (std::int64_t s = 0; s < counts.shots; ++s) ++resampled.counts[rng.categorical(cdf)];
    reps[r] = pipeline(resampled);
  });
  return summarize_replicates(std::move(point), reps);
}

}  // namespace pecsim
