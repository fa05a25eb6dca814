#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace sarv::train {

/// floor + amplitude * e^(-step / period); defaults give 0.0031 at step 0 decaying to 0.0001.
struct ExpDecay {
  double floor = 0.0001;
  double amplitude = 0.003;
  double period = 2000.0;

  double operator()(std::size_t step) const {
    return floor + amplitude * std::exp(-static_cast<double>(step) / period);
  }
};

inline double lr_exp_decay(std::size_t step) { return ExpDecay{}(step); }

/// Multiplies the rate by `factor` once eval accuracy has not improved for
/// `patience` consecutive epochs, then restarts the count.
///
/// With `start_epoch` set, the alternative reading applies instead: no decay
/// before that epoch, then decay after every epoch without improvement.
class PlateauSchedule {
 public:
  PlateauSchedule(double lr, double factor = 0.9, std::size_t patience = 27,
                  std::optional<std::size_t> start_epoch = std::nullopt);

  /// Feed one epoch's eval accuracy; returns the rate for the next epoch.
  double observe(double eval_accuracy);

  double lr() const noexcept { return lr_; }
  std::size_t epochs_since_best() const noexcept { return stale_; }

 private:
  double lr_;
  double factor_;
  std::size_t patience_;
  std::optional<std::size_t> start_epoch_;
  std::optional<double> best_;
  std::size_t stale_ = 0;
  std::size_t epoch_ = 0;
};

/// Stateless form: replays `history` from `initial_lr`.
double lr_plateau(const std::vector<double>& history, double initial_lr, double factor = 0.9,
                  std::size_t patience = 27);

}  // namespace sarv::train
