#include "crtrack/anu.hpp"

#include <cmath>
#include <stdexcept>

namespace crtrack {

namespace {

double eval_checked(const EvalFn& eval_fn, const ParamVector& p) {
  if (!eval_fn) throw std::invalid_argument("anu: empty eval function");
  const double v = eval_fn(p);
  if (!std::isfinite(v)) throw std::invalid_argument("anu: non-finite eval value");
  return v;
}

}  // namespace

ParamVector ema_update(const ParamVector& teacher, const ParamVector& student, double m) {
  if (teacher.size() != student.size() || teacher.size() == 0)
    throw std::invalid_argument("ema_update: dimension mismatch");
  if (!(m >= 0.0 && m <= 1.0))
    throw std::invalid_argument("ema_update: keep rate must be in [0, 1]");
  return m * teacher + (1.0 - m) * student;
}

AnuState anu_init(const ParamVector& teacher, const EvalFn& eval_fn) {
  if (teacher.size() == 0) throw std::invalid_argument("anu_init: empty parameters");
  AnuState s;
  s.teacher = teacher;
  s.best_params = teacher;
  s.best_eval = eval_checked(eval_fn, teacher);
  return s;
}

AnuState anu_epoch(AnuState state, const ParamVector& student, const EvalFn& eval_fn,
                   double m) {
  state.teacher = ema_update(state.teacher, student, m);
  const double teacher_eval = eval_checked(eval_fn, state.teacher);
  const double student_eval = eval_checked(eval_fn, student);

  auto action = AnuAction::none;
  if (teacher_eval > state.best_eval) {
    state.best_params = state.teacher;
    state.best_eval = teacher_eval;
    action = AnuAction::teacher_improved;
  }
  if (student_eval > state.best_eval) {
    state.best_params = student;
    state.best_eval = student_eval;
    state.teacher = student;
    action = action == AnuAction::teacher_improved ? AnuAction::both
                                                   : AnuAction::student_promoted;
  }

  state.history.push_back({static_cast<int>(state.history.size()) + 1, teacher_eval,
                           student_eval, state.best_eval, action});
  return state;
}

AnuState anu_run(const ParamVector& initial_teacher,
                 const std::vector<ParamVector>& students, const EvalFn& eval_fn,
                 double m) {
  AnuState s = anu_init(initial_teacher, eval_fn);
  for (const auto& student : students) s = anu_epoch(std::move(s), student, eval_fn, m);
  return s;
}

}  // namespace crtrack
