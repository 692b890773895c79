#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace crtrack {

using ParamVector = Eigen::VectorXd;
using EvalFn = std::function<double(const ParamVector&)>;

// Which branch of the update rule fired in an epoch.
enum class AnuAction : std::uint8_t {
  none = 0,
  teacher_improved = 1,
  student_promoted = 2,
  both = 3,
};

struct AnuEpochRecord {
  int epoch = 0;
  double teacher_eval = 0.0;
  double student_eval = 0.0;
  double best_eval = 0.0;
  AnuAction action = AnuAction::none;
};

struct AnuState {
  ParamVector teacher;
  ParamVector best_params;
  double best_eval = 0.0;
  std::vector<AnuEpochRecord> history;
};

// teacher' = m * teacher + (1 - m) * student. Throws on dimension mismatch or
// m outside [0, 1].
ParamVector ema_update(const ParamVector& teacher, const ParamVector& student, double m);

AnuState anu_init(const ParamVector& teacher, const EvalFn& eval_fn);

// One asymmetric update epoch: EMA the teacher, evaluate both nets, keep the
// best checkpoint, and overwrite the teacher with the student whenever the
// student alone beats the incumbent best.
AnuState anu_epoch(AnuState state, const ParamVector& student, const EvalFn& eval_fn,
                   double m);

AnuState anu_run(const ParamVector& initial_teacher,
                 const std::vector<ParamVector>& students, const EvalFn& eval_fn,
                 double m);

}  // namespace crtrack
