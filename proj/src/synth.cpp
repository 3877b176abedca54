#include "transona/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "transona/error.hpp"
#include "transona/ingest.hpp"
#include "transona/rng.hpp"

namespace transona {

namespace {

constexpr Millis kDayMs = 86400000;

struct AttentionEpisode {
  Millis time = 0;  // talk timestamp
  StudentId student = 0;
};

const char* kKcs[3] = {"combine-terms", "divide-both-sides", "subtract-both-sides"};

const char* kNotePool[6] = {
    "teacher walks over and points at the screen",
    "what are you going to do next?",
    "remember to do the same on both sides",
    "you can just type the result",
    "teacher reminds student about hints",
    "brief check-in; how are you doing",
};

std::string day_string(int d) {
  std::ostringstream os;
  os << "2022-07-" << (11 + d);
  return os.str();
}

double logistic(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

}  // namespace

void SynthParams::validate() const {
  if (students < 0 || days <= 0 || session_s <= 0 || attention_period_s <= 0)
    throw ConfigError("synth: counts and durations must be positive");
  for (double p : {low_hint_after_attention, high_correct_after_attention})
    if (p < 0 || p > 1) throw ConfigError("synth: probabilities must lie in [0,1]");
}

std::string SynthOutput::truth_csv() const {
  std::ostringstream os;
  os << "student_id,group\n";
  for (const auto& [id, g] : truth) os << id << ',' << to_string(g) << '\n';
  return os.str();
}

SynthOutput synth_generate(const SynthParams& params) {
  params.validate();
  Rng rng(mix_seed(params.seed, 0x5EED));

  SynthOutput out;

  // layout: 5-column grid, screens just behind the seats
  ClassLayout layout;
  const int cols = 5;
  const int rows = params.students == 0 ? 1 : (params.students + cols - 1) / cols;
  layout.room_min = {0, 0};
  layout.room_max = {10400, 1200 + rows * 1400.0 + 2500};
  for (int i = 0; i < params.students; ++i) {
    StudentPlacement p;
    p.id = i + 1;
    p.seat = {1200.0 + (i % cols) * 1700.0, 1200.0 + (i / cols) * 1400.0};
    p.screen = {p.seat.x, p.seat.y + 450.0};
    layout.students.push_back(p);
    out.truth[p.id] = (p.id % 2 == 1) ? LearningGroup::LOW : LearningGroup::HIGH;
  }
  out.layout_json = layout_to_json(layout);

  std::ostringstream tutor, positions, observations;
  tutor << "timestamp_ms,student_id,day,period,action,outcome,is_first_attempt,problem,step,kc\n";
  positions << "timestamp_ms,x_mm,y_mm,tag_id\n";
  observations << "timestamp_ms,label,student_id,note\n";

  struct TutorRow {
    Millis t;
    StudentId s;
    int day;
    std::string action, outcome;
    bool first;
    std::string problem, step, kc;
  };
  std::vector<TutorRow> tutor_rows;
  struct ObsRow {
    Millis t;
    std::string label;
    std::optional<StudentId> s;
    std::string note;
  };
  std::vector<ObsRow> obs_rows;

  std::map<std::pair<StudentId, std::string>, int> opportunities;  // (student, kc) -> T

  for (int d = 0; d < params.days; ++d) {
    const Millis epoch = static_cast<Millis>(d) * kDayMs;
    const Millis session_end = epoch + static_cast<Millis>(params.session_s * 1000.0);

    // teacher attention schedule: shuffled round-robin over students
    std::vector<AttentionEpisode> episodes;
    if (params.students > 0) {
      std::vector<StudentId> order;
      for (const auto& s : layout.students) order.push_back(s.id);
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.below(i)]);
      Millis t = epoch + 30000;
      std::size_t idx = 0;
      while (t < session_end - 30000) {
        episodes.push_back({t, order[idx % order.size()]});
        ++idx;
        t += static_cast<Millis>(params.attention_period_s * 1000.0) +
             static_cast<Millis>(rng.below(6000));
      }
    }

    // teacher trace: approach each attended student, dwell 12 s, walk on
    Point cursor{5200, layout.room_max.y - 800};
    Millis cursor_t = epoch + 10000;
    auto emit_pos = [&](Millis t, double x, double y) {
      positions << t << ',' << static_cast<long long>(x) << ','
                << static_cast<long long>(y) << ",teacher\n";
    };
    emit_pos(cursor_t, cursor.x, cursor.y);
    for (const auto& ep : episodes) {
      const auto* pl = layout.find(ep.student);
      // close enough that this seat, not the one in front, is the nearest
      const Point stand{pl->seat.x, pl->seat.y - 500};
      const Point far{pl->seat.x, pl->seat.y - 3300};
      // walk from the cursor to the approach point
      const Millis walk_start = ep.time - 8000;
      const int walk_steps = 4;
      for (int i = 1; i <= walk_steps; ++i) {
        const double f = static_cast<double>(i) / walk_steps;
        emit_pos(walk_start + i * 1000, cursor.x + (far.x - cursor.x) * f,
                 cursor.y + (far.y - cursor.y) * f);
      }
      // straight approach toward the screen: heading locks onto the student
      emit_pos(ep.time - 3000, far.x, far.y + 800);
      emit_pos(ep.time - 2000, far.x, far.y + 1600);
      emit_pos(ep.time - 1000, stand.x, stand.y);
      for (int i = 0; i <= 12; ++i) {
        const double jx = static_cast<double>(rng.below(21)) - 10.0;
        const double jy = static_cast<double>(rng.below(21)) - 10.0;
        emit_pos(ep.time + i * 1000, stand.x + jx, stand.y + jy);
      }
      cursor = stand;
      cursor_t = ep.time + 12000;

      obs_rows.push_back({ep.time, "talking", ep.student, ""});
      if (rng.chance(0.5))
        obs_rows.push_back({ep.time + 2000, "note", ep.student,
                            kNotePool[rng.below(6)]});
    }

    // per-student attention windows for this day
    std::map<StudentId, std::vector<Millis>> attention;
    for (const auto& ep : episodes) attention[ep.student].push_back(ep.time);

    for (const auto& pl : layout.students) {
      const StudentId sid = pl.id;
      const bool low = out.truth[sid] == LearningGroup::LOW;
      const double base = low ? params.low_base_logit : params.high_base_logit;
      const double rate = low ? params.low_learn_rate : params.high_learn_rate;
      const auto& att = attention[sid];
      std::size_t att_idx = 0;

      int problem_no = d * 20 + 1;
      int step_no = 1;
      Millis t = epoch + 5000 + static_cast<Millis>(rng.below(8000));
      while (t < session_end) {
        bool attended = false;
        if (att_idx < att.size() && att[att_idx] <= t) {
          // respond shortly after the teacher's attention
          t = att[att_idx] + 3000 + static_cast<Millis>(rng.below(4000));
          ++att_idx;
          attended = true;
        }
        std::ostringstream prob, step;
        prob << "P" << problem_no;
        step << "S" << step_no;
        const std::string kc = kKcs[(problem_no + step_no) % 3];
        auto& opp = opportunities[{sid, kc}];

        if (attended && low && rng.chance(params.low_hint_after_attention)) {
          // hint burst, spaced beyond the misuse gap on purpose
          tutor_rows.push_back({t, sid, d, "HINT_REQUEST", "HINT", false, prob.str(),
                                step.str(), kc});
          ++opp;  // first encounter of the step was a hint
          t += 4000 + static_cast<Millis>(rng.below(2000));
          tutor_rows.push_back({t, sid, d, "HINT_REQUEST", "HINT", false, prob.str(),
                                step.str(), kc});
          t += 5000 + static_cast<Millis>(rng.below(2000));
          tutor_rows.push_back({t, sid, d, "ATTEMPT", "CORRECT", false, prob.str(),
                                step.str(), kc});
        } else if (attended && !low && rng.chance(params.high_correct_after_attention)) {
          tutor_rows.push_back({t, sid, d, "ATTEMPT", "CORRECT", true, prob.str(),
                                step.str(), kc});
          ++opp;
          // a second quick correct step while the teacher is still present
          if (++step_no > 4) {
            step_no = 1;
            ++problem_no;
          }
          std::ostringstream prob2, step2;
          prob2 << "P" << problem_no;
          step2 << "S" << step_no;
          const std::string kc2 = kKcs[(problem_no + step_no) % 3];
          t += 5000 + static_cast<Millis>(rng.below(3000));
          tutor_rows.push_back({t, sid, d, "ATTEMPT", "CORRECT", true, prob2.str(),
                                step2.str(), kc2});
          ++opportunities[{sid, kc2}];
        } else {
          const double p_correct = logistic(base + rate * opp);
          if (rng.chance(p_correct)) {
            tutor_rows.push_back({t, sid, d, "ATTEMPT", "CORRECT", true, prob.str(),
                                  step.str(), kc});
          } else {
            tutor_rows.push_back({t, sid, d, "ATTEMPT", "INCORRECT", true, prob.str(),
                                  step.str(), kc});
            t += 5000 + static_cast<Millis>(rng.below(5000));
            if (rng.chance(0.4))
              tutor_rows.push_back({t, sid, d, "HINT_REQUEST", "HINT", false, prob.str(),
                                    step.str(), kc});
            else
              tutor_rows.push_back({t, sid, d, "ATTEMPT", "INCORRECT", false, prob.str(),
                                    step.str(), kc});
            t += 5000 + static_cast<Millis>(rng.below(5000));
            tutor_rows.push_back({t, sid, d, "ATTEMPT", "CORRECT", false, prob.str(),
                                  step.str(), kc});
          }
          ++opp;
        }
        if (++step_no > 4) {
          step_no = 1;
          ++problem_no;
        }
        t += 20000 + static_cast<Millis>(rng.below(12000));
      }
      if (rng.chance(0.3))
        obs_rows.push_back({epoch + 60000 + static_cast<Millis>(rng.below(600000)),
                            "raising hand", sid, ""});
    }
  }

  std::stable_sort(tutor_rows.begin(), tutor_rows.end(),
                   [](const TutorRow& a, const TutorRow& b) { return a.t < b.t; });
  std::stable_sort(obs_rows.begin(), obs_rows.end(),
                   [](const ObsRow& a, const ObsRow& b) { return a.t < b.t; });

  for (const auto& r : tutor_rows) {
    tutor << r.t << ',' << r.s << ',' << day_string(r.day) << ",1," << r.action << ','
          << r.outcome << ',' << (r.first ? 1 : 0) << ',' << r.problem << ',' << r.step
          << ',' << r.kc << '\n';
  }
  for (const auto& r : obs_rows) {
    observations << r.t << ',' << r.label << ',';
    if (r.s) observations << *r.s;
    observations << ',' << r.note << '\n';
  }

  out.tutor_csv = tutor.str();
  out.positions_csv = positions.str();
  out.observations_csv = observations.str();
  return out;
}

}  // namespace transona
