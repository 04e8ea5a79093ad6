#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "liftsim/log.hpp"
#include "liftsim/service/wire.hpp"

namespace liftsim::service {
namespace {

using nlohmann::json;

std::string pilot_json(const std::string& data, std::uint64_t seq = 1) {
  return R"({"type":"pilot_input","seq":)" + std::to_string(seq) + R"(,"data":)" + data + "}";
}

const std::string kExample =
    R"({"theta_H":0.1,"h_H":0.9,"phi1":1.2,"phi2":0.3,"p_H":0.02,"grasp":true,"comp":false})";

std::string expect_error_field(const std::string& text) {
  try {
    decode_client(text);
  } catch (const WireError& e) {
    return e.field();
  }
  ADD_FAILURE() << "accepted: " << text;
  return "<accepted>";
}

TEST(DecodeClient, PilotInputExampleAccepted) {
  const auto m = decode_client(pilot_json(kExample, 7));
  EXPECT_EQ(m.seq, 7u);
  const auto& p = std::get<PilotInput>(m.payload);
  EXPECT_EQ(p.theta_H, 0.1);
  EXPECT_EQ(p.h_H, 0.9);
  EXPECT_EQ(p.phi1, 1.2);
  EXPECT_EQ(p.phi2, 0.3);
  EXPECT_EQ(p.p_H, 0.02);
  EXPECT_TRUE(p.grasp);
  EXPECT_FALSE(p.comp);
  EXPECT_FALSE(p.thetadot_H.has_value());
}

TEST(DecodeClient, NonFiniteRejected) {
  // JSON has no NaN literal and the parser refuses overflowing numbers, so
  // both fail before field validation.
  EXPECT_EQ(expect_error_field(pilot_json(
                R"({"theta_H":NaN,"h_H":0.9,"phi1":1.2,"phi2":0.3,"p_H":0.02,"grasp":true,"comp":false})")),
            "");
  EXPECT_EQ(expect_error_field(pilot_json(
                R"({"theta_H":0.1,"h_H":0.9,"phi1":1e999,"phi2":0.3,"p_H":0.02,"grasp":true,"comp":false})")),
            "");
}

TEST(DecodeClient, SchemaErrorsCarryFieldPath) {
  EXPECT_EQ(expect_error_field(pilot_json(
                R"({"h_H":0.9,"phi1":1.2,"phi2":0.3,"p_H":0.02,"grasp":true,"comp":false})")),
            "data.theta_H");
  EXPECT_EQ(expect_error_field(pilot_json(
                R"({"theta_H":"0.1","h_H":0.9,"phi1":1.2,"phi2":0.3,"p_H":0.02,"grasp":true,"comp":false})")),
            "data.theta_H");
  EXPECT_EQ(expect_error_field(pilot_json(
                R"({"theta_H":0.1,"h_H":0.9,"phi1":1.2,"phi2":0.3,"p_H":0.02,"grasp":1,"comp":false})")),
            "data.grasp");
  EXPECT_EQ(expect_error_field(pilot_json(
                R"({"theta_H":0.1,"h_H":0.9,"phi1":1.2,"phi2":0.3,"p_H":0.02,"grasp":true,"comp":false,"x":1})")),
            "data.x");
  EXPECT_EQ(expect_error_field(pilot_json(
                R"({"theta_H":0.1,"h_H":0,"phi1":1.2,"phi2":0.3,"p_H":0.02,"grasp":true,"comp":false})")),
            "data.h_H");
  EXPECT_EQ(expect_error_field(R"({"type":"warp","seq":1,"data":{}})"), "type");
  EXPECT_EQ(expect_error_field(R"({"type":"set_gain","data":{"K_fb":0.5}})"), "seq");
  EXPECT_EQ(expect_error_field(R"({"type":"set_gain","seq":-1,"data":{"K_fb":0.5}})"), "seq");
  EXPECT_EQ(expect_error_field(R"({"type":"set_gain","seq":1,"data":{"K_fb":1.5}})"), "data.K_fb");
  EXPECT_EQ(expect_error_field(R"({"type":"set_mode","seq":1,"data":{"mode":"Fast"}})"),
            "data.mode");
  EXPECT_EQ(expect_error_field(R"({"type":"sim_control","seq":1,"data":{"command":"jump"}})"),
            "data.command");
  EXPECT_EQ(
      expect_error_field(R"({"type":"sim_control","seq":1,"data":{"command":"step","ticks":0}})"),
      "data.ticks");
  EXPECT_EQ(expect_error_field(R"({"type":"load_scenario","seq":1,"data":{"name":"../etc"}})"),
            "data.name");
  EXPECT_EQ(expect_error_field(R"({"type":"set_gain","seq":1,"data":[]})"), "data");
  EXPECT_EQ(expect_error_field("{not json"), "");
  EXPECT_EQ(expect_error_field(R"({"type":"set_gain","seq":1,"data":{"K_fb":0.5},"extra":0})"),
            "extra");
}

TEST(Encode, ClientMessagesRoundTrip) {
  const std::vector<ClientMessage> messages = {
      {1, PilotInput{0.1, 0.9, 1.2, 0.3, 0.02, true, false, std::nullopt}},
      {2, PilotInput{-0.1, 1.1, 0.0, 0.0, 0.0, false, true, 0.25}},
      {3, SetMode{retarget::ControlMode::VelocityAuto}},
      {4, SetGain{0.35}},
      {5, SimControl{SimCommand::Step, 12}},
      {6, SimControl{SimCommand::Reset, 1}},
      {7, LoadScenario{"lift_auto"}},
  };
  for (const auto& m : messages) EXPECT_EQ(decode_client(encode(m)), m) << encode(m);
}

TEST(Encode, ServerMessagesRoundTrip) {
  LogRecord r;
  r.t = 1.234;
  r.theta_R = -0.1538;
  r.F_fb = 61.96;
  r.mode = retarget::ControlMode::DcmManual;
  r.payload_attached = true;
  const std::vector<ServerMessage> messages = {
      {1, StateSnapshot{1234, r, false, false}},
      {2, EventNotice{{1.05, EventKind::PayloadAttached, ""}}},
      {3, ErrorNotice{"bad", "data.theta_H", 17}},
      {4, ErrorNotice{"malformed JSON", "", std::nullopt}},
      {5, Ack{9, "set_gain"}},
  };
  for (const auto& m : messages) EXPECT_EQ(decode_server(encode(m)), m) << encode(m);
}

TEST(Encode, StateCarriesEveryLogColumn) {
  const json j = json::parse(encode(ServerMessage{1, StateSnapshot{}}));
  EXPECT_EQ(j.at("type"), "state");
  for (std::string_view column : kLogColumns) {
    EXPECT_TRUE(j.at("data").contains(std::string(column))) << column;
  }
  EXPECT_TRUE(j.at("data").contains("tick"));
  EXPECT_TRUE(j.at("data").contains("paused"));
  EXPECT_TRUE(j.at("data").contains("fallen"));
}

TEST(PeekSeq, RecoversSequenceFromInvalidMessages) {
  EXPECT_EQ(peek_seq(R"({"type":"warp","seq":5,"data":{}})"), 5u);
  EXPECT_FALSE(peek_seq("{oops").has_value());
  EXPECT_FALSE(peek_seq(R"({"seq":"5"})").has_value());
}

}  // namespace
}  // namespace liftsim::service
