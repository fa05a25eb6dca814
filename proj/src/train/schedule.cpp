#include "sarv/train/schedule.hpp"

#include "sarv/errors.hpp"

namespace sarv::train {

PlateauSchedule::PlateauSchedule(double lr, double factor, std::size_t patience, std::optional<std::size_t> start_epoch)
    : lr_(lr), factor_(factor), patience_(patience), start_epoch_(start_epoch) {
  if (!(factor > 0.0 && factor < 1.0)) throw ConfigError("plateau factor must be in (0, 1)");
  if (patience == 0 && !start_epoch) throw ConfigError("plateau patience must be >= 1");
}

double PlateauSchedule::observe(double eval_accuracy) {
  ++epoch_;
  if (!best_ || eval_accuracy > *best_) {
    best_ = eval_accuracy;
    stale_ = 0;
    return lr_;
  }
  ++stale_;
  if (start_epoch_) {
    if (epoch_ >= *start_epoch_) lr_ *= factor_;
    return lr_;
  }
  if (stale_ >= patience_) {
    lr_ *= factor_;
    stale_ = 0;
  }
  return lr_;
}

double lr_plateau(const std::vector<double>& history, double initial_lr, double factor, std::size_t patience) {
  PlateauSchedule s(initial_lr, factor, patience);
  for (double acc : history) s.observe(acc);
  return s.lr();
}

}  // namespace sarv::train
