#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "transona/error.hpp"
#include "transona/ingest.hpp"

using namespace transona;

namespace {

const char* kTutorHeader =
    "timestamp_ms,student_id,day,period,action,outcome,is_first_attempt,problem,step,kc";

std::string tutor_csv(const std::string& body) { return std::string(kTutorHeader) + "\n" + body; }

}  // namespace

TEST_CASE("tutor rows parse and map to coded events") {
  auto rows = parse_tutor_rows(tutor_csv(
      "1000,7,2022-07-11,1,ATTEMPT,CORRECT,1,P1,S1,combine-terms\n"
      "2000,7,2022-07-11,1,ATTEMPT,CORRECT,0,P1,S2,combine-terms\n"
      "3000,7,2022-07-11,1,ATTEMPT,INCORRECT,1,P1,S3,combine-terms\n"
      "4000,7,2022-07-11,1,HINT_REQUEST,HINT,0,P1,S3,combine-terms\n"));
  REQUIRE(rows.size() == 4);
  auto events = tutor_rows_to_events(rows);
  CHECK(events[0].codes ==
        std::set<Code>{Code(Code::CORRECT_ATTEMPT), Code(Code::CORRECT_FIRST_ATTEMPT)});
  CHECK(events[1].codes == std::set<Code>{Code(Code::CORRECT_ATTEMPT)});
  CHECK(events[2].codes == std::set<Code>{Code(Code::INCORRECT_ATTEMPT)});
  CHECK(events[3].codes == std::set<Code>{Code(Code::HINT_REQUEST)});
  CHECK(events[0].payload.at("kc") == "combine-terms");
  CHECK(events[0].payload.at("first") == "1");
  CHECK(events[3].payload.count("first") == 0);  // hints have no attempt flag
}

TEST_CASE("tutor parser names the offending line") {
  try {
    parse_tutor_rows(tutor_csv("1000,7,2022-07-11,1,GUESS,CORRECT,1,P1,S1,kc\n"));
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("GUESS") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_tutor_rows(tutor_csv("abc,7,d,1,ATTEMPT,CORRECT,1,P1,S1,kc\n")),
                  DataError);
  CHECK_THROWS_AS(parse_tutor_rows("wrong,header\n"), DataError);
  CHECK_THROWS_AS(parse_tutor_rows(""), DataError);
}

TEST_CASE("positions: per-tag ordering, duplicate timestamps collapse to last row") {
  auto samples = parse_positions(
      "timestamp_ms,x_mm,y_mm,tag_id\n"
      "2000,5,6,teacher\n"
      "1000,1,2,teacher\n"
      "1000,3,4,teacher\n"  // duplicate timestamp, wins
      "500,9,9,helper\n");
  REQUIRE(samples.size() == 3);
  CHECK(samples[0].timestamp == 1000);
  CHECK(samples[0].x == 3);
  CHECK(samples[1].timestamp == 2000);
  CHECK(samples[2].tag == "helper");
}

TEST_CASE("observations: talking is untargeted, raising hand belongs to the student") {
  auto parsed = parse_observations(
      "timestamp_ms,label,student_id,note\n"
      "1000,talking,4,checks in\n"
      "2000,raising hand,5,\n"
      "3000,off task,6,looking around, chatting\n");
  REQUIRE(parsed.events.size() == 2);
  CHECK(parsed.events[0].codes == std::set<Code>{Code(Code::TALKING)});
  CHECK_FALSE(parsed.events[0].student.has_value());
  CHECK(parsed.events[0].payload.at("target") == "4");
  CHECK(parsed.events[1].codes == std::set<Code>{Code(Code::RAISING_HAND)});
  CHECK(parsed.events[1].student == 5);
  // unrecognized label kept for replay, commas in the note intact
  REQUIRE(parsed.notes.size() == 1);
  CHECK(parsed.notes[0].label == "off task");
  CHECK(parsed.notes[0].note == "looking around, chatting");
}

TEST_CASE("layout json round trip and validation") {
  ClassLayout layout;
  layout.room_min = {0, 0};
  layout.room_max = {5000, 4000};
  layout.students.push_back({1, {1000, 1000}, {1000, 1450}});
  layout.students.push_back({2, {2700, 1000}, {2700, 1450}});
  auto back = parse_layout(layout_to_json(layout));
  REQUIRE(back.students.size() == 2);
  CHECK(back.students[1].screen.y == 1450);
  CHECK(back.find(2)->seat.x == 2700);
  CHECK(back.find(99) == nullptr);

  CHECK_THROWS_AS(parse_layout("{not json"), DataError);
  CHECK_THROWS_AS(parse_layout(R"({"students": []})"), DataError);
  CHECK_THROWS_AS(parse_layout(R"({"room": [[0,0],[10,10]],
    "students": [{"id": 1, "seat": [5,5], "screen": [5,6]},
                 {"id": 1, "seat": [7,7], "screen": [7,8]}]})"),
                  DataError);
  CHECK_THROWS_AS(parse_layout(R"({"room": [[0,0],[10,10]],
    "students": [{"id": 1, "seat": [50,5], "screen": [5,6]}]})"),
                  DataError);
}

TEST_CASE("clock offsets select by source") {
  ClockOffsets o{10, 20, 30, 40};
  CHECK(o.for_source(EventSource::TUTOR_LOG) == 10);
  CHECK(o.for_source(EventSource::DETECTOR) == 20);
  CHECK(o.for_source(EventSource::OBSERVATION) == 30);
  CHECK(o.for_source(EventSource::SPATIAL) == 40);
}
