#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cbswri/acquisition.hpp"
#include "cbswri/dense_reference.hpp"
#include "cbswri/sketch.hpp"
#include "cbswri/wri.hpp"

namespace cbswri {

/// Multiscale sweep plan: one or more frequency paths, each expanded into
/// overlapping batches walked from low to high frequency.
struct FrequencySchedule {
  std::vector<std::pair<double, double>> paths;  ///< (f_start, f_end) [Hz]
  double df = 0.25;                              ///< frequency interval [Hz]
  int batch_size = 2;
  int overlap = 1;
  int iters_per_batch = 10;

  void validate() const {
    if (paths.empty()) throw std::invalid_argument("schedule: no paths");
    for (auto [a, b] : paths)
      if (!(a > 0.0) || a > b)
        throw std::invalid_argument("schedule: need 0 < f_start <= f_end");
    if (!(df > 0.0)) throw std::invalid_argument("schedule: df > 0");
    if (batch_size < 1) throw std::invalid_argument("schedule: batch_size >= 1");
    if (overlap < 0 || overlap >= batch_size)
      throw std::invalid_argument("schedule: need 0 <= overlap < batch_size");
    if (iters_per_batch < 0)
      throw std::invalid_argument("schedule: iters_per_batch >= 0");
  }
};

struct ScheduleBatch {
  int path = 0;
  std::vector<double> freqs;
};

/// Integer key for frequency lookups (micro-hertz), immune to float noise.
inline long long freq_key(double f_hz) {
  return static_cast<long long>(std::llround(f_hz * 1e6));
}

/// Arithmetic frequency list of one path, inclusive of both ends.
inline std::vector<double> path_frequencies(double f_start, double f_end,
                                            double df) {
  const int n = static_cast<int>(std::lround((f_end - f_start) / df)) + 1;
  std::vector<double> f(std::max(n, 1));
  for (int i = 0; i < static_cast<int>(f.size()); ++i) f[i] = f_start + i * df;
  return f;
}

/// Sliding windows of batch_size frequencies with the configured overlap,
/// paths concatenated in order. A path shorter than one window becomes a
/// single batch.
inline std::vector<ScheduleBatch> expand_schedule(const FrequencySchedule& s) {
  s.validate();
  std::vector<ScheduleBatch> out;
  const int stride = s.batch_size - s.overlap;
  for (int p = 0; p < static_cast<int>(s.paths.size()); ++p) {
    const std::vector<double> f =
        path_frequencies(s.paths[p].first, s.paths[p].second, s.df);
    if (static_cast<int>(f.size()) <= s.batch_size) {
      out.push_back({p, f});
      continue;
    }
    for (int start = 0; start + s.batch_size <= static_cast<int>(f.size());
         start += stride) {
      ScheduleBatch b{p, {f.begin() + start, f.begin() + start + s.batch_size}};
      out.push_back(std::move(b));
    }
  }
  return out;
}

/// Sketch sizing: a per-frequency receiver count (piecewise-linear between
/// breakpoints) and a fixed source count. Zero means no sketching on that
/// side.
struct SketchPlan {
  std::vector<std::pair<double, int>> receiver_schedule;  ///< (f_hz, count)
  int sources = 0;

  bool receivers_active() const { return !receiver_schedule.empty(); }
  bool sources_active() const { return sources > 0; }

  int receivers_at(double f_hz, int nr) const {
    if (receiver_schedule.empty()) return nr;
    const auto& rs = receiver_schedule;
    double v;
    if (f_hz <= rs.front().first) {
      v = rs.front().second;
    } else if (f_hz >= rs.back().first) {
      v = rs.back().second;
    } else {
      v = rs.back().second;
      for (std::size_t i = 1; i < rs.size(); ++i) {
        if (f_hz <= rs[i].first) {
          const double t =
              (f_hz - rs[i - 1].first) / (rs[i].first - rs[i - 1].first);
          v = rs[i - 1].second + t * (rs[i].second - rs[i - 1].second);
          break;
        }
      }
    }
    return std::clamp(static_cast<int>(std::lround(v)), 1, nr);
  }

  int sources_at(int ns) const {
    return sources_active() ? std::min(sources, ns) : ns;
  }
};

struct SolveBudget {
  long forward = 0;
  long backward = 0;
  long total() const { return forward + backward; }
};

/// Exact solve counts of a run: each ADMM iteration advances one frequency
/// of its batch (cycling through the batch) and spends one adjoint solve per
/// (sketched) receiver plus one forward solve per (sketched) source.
inline SolveBudget predict_budget(const FrequencySchedule& schedule, int ns,
                                  int nr, const SketchPlan& plan = {}) {
  SolveBudget budget;
  for (const ScheduleBatch& batch : expand_schedule(schedule)) {
    const int nf = static_cast<int>(batch.freqs.size());
    for (int it = 0; it < schedule.iters_per_batch; ++it) {
      const double f = batch.freqs[it % nf];
      budget.backward += plan.receivers_at(f, nr);
      budget.forward += plan.sources_at(ns);
    }
  }
  return budget;
}

struct InversionLogRow {
  int batch = 0;
  int iteration = 0;  ///< global iteration counter across the run
  double freq_hz = 0.0;
  double data_residual = 0.0;
  double wave_residual_mean = 0.0;
  double model_rel_error = -1.0;  ///< -1 when no truth model was supplied
  long forward_solves = 0;        ///< cumulative
  long backward_solves = 0;       ///< cumulative
  double lam_ratio = 0.0;
};

struct InversionResult {
  std::optional<SquaredSlownessModel> model;
  std::vector<InversionLogRow> log;
  std::vector<SquaredSlownessModel> batch_snapshots;
  long forward_solves = 0;
  long backward_solves = 0;
  long aux_solves = 0;  ///< eigenvalue-estimation solves, outside the budget
  std::vector<std::pair<std::string, std::uint64_t>> sketch_seeds;
};

inline double model_relative_error(const SquaredSlownessModel& m,
                                   const SquaredSlownessModel& truth) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < m.values().size(); ++i) {
    const double d = m.values()[i] - truth.values()[i];
    num += d * d;
    den += truth.values()[i] * truth.values()[i];
  }
  return std::sqrt(num / den);
}

/// Runs the full frequency-continuation inversion. Multipliers reset to
/// (b, d) at each batch; lam0/lam1 is pinned per frequency, when it first
/// enters a batch, as lam0_fraction times the largest data-normal
/// eigenvalue at the batch-entry model. Sketches are regenerated every
/// iteration from the master seed. Actual solve tallies equal
/// predict_budget by construction.
template <HelmholtzSolverLike Solver>
InversionResult run_inversion(
    const SquaredSlownessModel& initial_model,
    const std::map<long long, DataMatrix>& data,
    const AcquisitionGeometry& geometry, const FrequencySchedule& schedule,
    const WriConfig& base_cfg, const SketchPlan& plan, const Solver& solver,
    std::uint64_t master_seed,
    const SquaredSlownessModel* truth_model = nullptr,
    std::size_t dense_cap = kDenseCap) {
  const std::vector<ScheduleBatch> batches = expand_schedule(schedule);
  for (const auto& batch : batches)
    for (double f : batch.freqs)
      if (!data.count(freq_key(f)))
        throw std::invalid_argument("run_inversion: no data for " +
                                    std::to_string(f) + " Hz");

  const Grid2D& grid = initial_model.grid();
  const ObservationOperator P(grid, geometry);
  const int ns = geometry.ns(), nr = geometry.nr();
  std::vector<ComplexWavefield> b_phys;
  b_phys.reserve(ns);
  for (const auto& pos : geometry.sources) {
    auto [ix, iz] = snap_to_node(grid, pos);
    b_phys.push_back(ComplexWavefield::point_source(grid, ix, iz));
  }

  InversionResult result;
  SquaredSlownessModel model = initial_model;
  long global_iter = 0;

  for (int bi = 0; bi < static_cast<int>(batches.size()); ++bi) {
    const ScheduleBatch& batch = batches[bi];
    const int nf = static_cast<int>(batch.freqs.size());
    std::map<long long, WriState> states;
    std::map<long long, WriConfig> cfgs;

    for (int it = 0; it < schedule.iters_per_batch; ++it) {
      const double f = batch.freqs[it % nf];
      const double omega = 2.0 * M_PI * f;
      const long long key = freq_key(f);
      const DataMatrix& d = data.at(key);

      std::optional<SketchOperator> X, Y;
      if (plan.receivers_active()) {
        const std::uint64_t seed = derive_seed(master_seed, global_iter, 0);
        X.emplace(make_sketch(nr, plan.receivers_at(f, nr), seed));
        result.sketch_seeds.emplace_back(
            "X[" + std::to_string(global_iter) + "]", seed);
      }
      if (plan.sources_active()) {
        const std::uint64_t seed = derive_seed(master_seed, global_iter, 1);
        Y.emplace(make_sketch(ns, plan.sources_at(ns), seed));
        result.sketch_seeds.emplace_back(
            "Y[" + std::to_string(global_iter) + "]", seed);
      }

      if (!cfgs.count(key)) {
        WriConfig cfg = base_cfg;
        double eig;
        if (grid.padded_count() <= dense_cap) {
          eig = largest_eig_data_normal_dense(model, omega, P, dense_cap);
        } else {
          int used = 0;
          CbsConfig eig_cfg = base_cfg.solver;
          eig_cfg.eta = std::max(eig_cfg.eta, 1e-5);
          CbsHelmholtzSolver eig_solver{eig_cfg};
          eig = largest_eig_data_normal(model, omega, P, eig_solver, 1e-3, 200,
                                        &used);
          result.aux_solves += 2L * used;
        }
        cfg.lam0 = cfg.lam0_fraction * eig;
        cfg.lam1 = 1.0;
        cfgs.emplace(key, cfg);
      }
      const WriConfig& cfg = cfgs.at(key);

      if (!states.count(key)) {
        std::vector<ComplexWavefield> b0 =
            Y ? sketch_fields(b_phys, *Y) : b_phys;
        DataMatrix d0 = Y ? sketch_columns(d, *Y) : d;
        states.emplace(key, make_wri_state(model, b0, d0));
      }
      WriState& state = states.at(key);
      state.model = model;

      const WriIterationReport rep =
          wri_iterate(state, solver, d, b_phys, omega, P, cfg,
                      X ? &*X : nullptr, Y ? &*Y : nullptr);
      model = state.model;
      ++global_iter;

      InversionLogRow row;
      row.batch = bi;
      row.iteration = static_cast<int>(global_iter);
      row.freq_hz = f;
      row.data_residual = rep.data_residual;
      row.wave_residual_mean = rep.wave_residual_mean;
      row.lam_ratio = rep.lam_ratio;
      if (truth_model) row.model_rel_error = model_relative_error(model, *truth_model);
      long fwd = 0, bwd = 0;
      for (auto& [k, st] : states) {
        fwd += st.forward_solves;
        bwd += st.backward_solves;
      }
      row.forward_solves = result.forward_solves + fwd;
      row.backward_solves = result.backward_solves + bwd;
      result.log.push_back(row);
    }

    for (auto& [k, st] : states) {
      result.forward_solves += st.forward_solves;
      result.backward_solves += st.backward_solves;
    }
    result.batch_snapshots.push_back(model);
  }

  result.model = model;
  return result;
}

}  // namespace cbswri
