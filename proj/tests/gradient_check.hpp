#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "accex/cleanex.hpp"
#include "accex/rng.hpp"

namespace accex::test {

// Central-difference check of the analytic parameter gradients.
//
// All output-side parameters (b2, w3, b3) are checked exhaustively; the wide
// layers are spot-checked on `n_w1` / `n_w2` seeded random coordinates, which
// keeps the check well under the time budget while still touching every
// gradient code path. Coordinates whose analytic and numeric gradients are
// both below `measurable` are skipped: the difference quotient carries
// ~1e-12 of roundoff, so relative error there is meaningless (they must
// still agree absolutely to 1e-9).
struct GradCheckResult {
  double max_rel_err = 0.0;
  int checked = 0;
  int skipped_tiny = 0;
  bool tiny_ok = true;
};

inline GradCheckResult check_gradients(const CleanexModel& start,
                                       const Eigen::MatrixXd& rows,
                                       const AccuracyCurve& observed,
                                       std::uint64_t sample_seed,
                                       int n_w1 = 200, int n_w2 = 400,
                                       double step = 1e-5,
                                       double measurable = 1e-7) {
  CleanexModel model = start;
  const CleanexGradients analytic = loss_gradients(model, rows, observed);

  auto loss_at = [&]() {
    const Eigen::VectorXd chat = forward(model, rows);
    return loss(std::span<const double>(chat.data(),
                                        static_cast<std::size_t>(chat.size())),
                observed);
  };

  GradCheckResult result;
  auto check_coord = [&](double& param, double analytic_g) {
    const double saved = param;
    param = saved + step;
    const double up = loss_at();
    param = saved - step;
    const double down = loss_at();
    param = saved;
    const double numeric_g = (up - down) / (2.0 * step);
    const double mag = std::max(std::abs(analytic_g), std::abs(numeric_g));
    if (mag < measurable) {
      ++result.skipped_tiny;
      if (std::abs(analytic_g - numeric_g) > 1e-9) result.tiny_ok = false;
      return;
    }
    result.max_rel_err =
        std::max(result.max_rel_err, std::abs(analytic_g - numeric_g) / mag);
    ++result.checked;
  };

  auto rng = SplitMix64::substream(sample_seed, {0x47434b00ULL});  // "GCK"
  for (int i = 0; i < n_w1; ++i) {
    const auto total = model.w1.size() + model.b1.size();
    const auto idx = static_cast<Eigen::Index>(rng.below(total));
    if (idx < model.w1.size())
      check_coord(model.w1.data()[idx], analytic.w1.data()[idx]);
    else
      check_coord(model.b1[idx - model.w1.size()],
                  analytic.b1[idx - model.w1.size()]);
  }
  for (int i = 0; i < n_w2; ++i) {
    const auto idx = static_cast<Eigen::Index>(rng.below(model.w2.size()));
    check_coord(model.w2.data()[idx], analytic.w2.data()[idx]);
  }
  for (Eigen::Index i = 0; i < model.b2.size(); ++i)
    check_coord(model.b2[i], analytic.b2[i]);
  for (Eigen::Index i = 0; i < model.w3.size(); ++i)
    check_coord(model.w3[i], analytic.w3[i]);
  check_coord(model.b3, analytic.b3);
  return result;
}

}  // namespace accex::test
