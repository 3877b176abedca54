#pragma once

#include <string>
#include <vector>

#include "transona/events.hpp"
#include "transona/ingest.hpp"
#include "transona/rng.hpp"

namespace transona::test {

inline Event ev(Millis t, EventSource src, std::optional<StudentId> student,
                std::initializer_list<Code::Builtin> codes, std::string day = "2022-07-11",
                int period = 1) {
  Event e;
  e.timestamp = t;
  e.source = src;
  e.student = student;
  e.day = std::move(day);
  e.period = period;
  for (auto c : codes) e.codes.insert(Code(c));
  return e;
}

inline TutorTransactionRow txn(Millis t, StudentId s, TutorTransactionRow::Action action,
                               TutorTransactionRow::Outcome outcome, bool first,
                               std::string problem = "P1", std::string step = "S1",
                               std::string kc = "kc1") {
  TutorTransactionRow r;
  r.timestamp = t;
  r.student = s;
  r.day = "2022-07-11";
  r.period = 1;
  r.action = action;
  r.outcome = outcome;
  r.is_first_attempt = first;
  r.problem = std::move(problem);
  r.step = std::move(step);
  r.kc = std::move(kc);
  return r;
}

inline TutorTransactionRow attempt(Millis t, StudentId s, bool correct, bool first = true,
                                   std::string problem = "P1", std::string step = "S1",
                                   std::string kc = "kc1") {
  return txn(t, s, TutorTransactionRow::Action::ATTEMPT,
             correct ? TutorTransactionRow::Outcome::CORRECT
                     : TutorTransactionRow::Outcome::INCORRECT,
             first, std::move(problem), std::move(step), std::move(kc));
}

inline TutorTransactionRow hint(Millis t, StudentId s, std::string problem = "P1",
                                std::string step = "S1", std::string kc = "kc1") {
  return txn(t, s, TutorTransactionRow::Action::HINT_REQUEST,
             TutorTransactionRow::Outcome::HINT, false, std::move(problem), std::move(step),
             std::move(kc));
}

}  // namespace transona::test
