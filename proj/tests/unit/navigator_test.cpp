#include <gtest/gtest.h>

#include "infogent/navigator_api.hpp"
#include "infogent/navigator_visual.hpp"

namespace infogent {
namespace {

// ---------------------------------------------------------------- api mode

TEST(ToolCall, Parsing) {
  auto r = parse_tool_call(R"j(```json
{"thought": "t", "tool": " Search ", "argument": " fubo ipo "}
```)j");
  const auto& c = std::get<ToolCall>(r);
  EXPECT_EQ(c.tool, "search");
  EXPECT_EQ(c.argument, "fubo ipo");
  EXPECT_EQ(c.thought, "t");

  EXPECT_EQ(std::get<FinalMessage>(parse_tool_call("  Aggregation is done.  ")).text, "Aggregation is done.");
  EXPECT_EQ(std::get<ToolCall>(parse_tool_call(R"j({"tool": "terminate"})j")).argument, "");
  EXPECT_EQ(std::get<ToolCall>(parse_tool_call(R"j({"tool": "aggregate", "argument": "https://a.example/x"})j")).tool,
            "aggregate");
}

TEST(ToolCall, Failures) {
  for (const char* s : {"", "{", R"j({"argument": "x"})j", R"j({"tool": "browse", "argument": "x"})j",
                        R"j({"tool": "search", "argument": ""})j", R"j({"tool": "search"})j",
                        R"j({"tool": "aggregate", "argument": "wiki.example/x"})j",
                        R"j({"tool": "search", "argument": 3})j", R"j({"tool": 1})j"}) {
    EXPECT_THROW(parse_tool_call(s), NavigationParseFailure) << s;
  }
}

TEST(ApiAction, Spelling) {
  EXPECT_EQ(ApiNavAction::search("fubo ipo year").to_string(), "search(\"fubo ipo year\")");
  EXPECT_EQ(ApiNavAction::aggregate("https://a/").name(), "AGGREGATE");
  EXPECT_EQ(ApiNavAction::terminate("done", "th").to_json(),
            (json{{"action", "TERMINATE"}, {"argument", "done"}, {"thought", "th"}}));
}

const std::vector<SearchResult> kResults = {{"https://a.example/1", "One", "first"},
                                            {"https://b.example/2", "Two", "second"}};

TEST(ApiState, ObservationsUpdateStateAsDocumented) {
  ApiNavState s = initial_api_state(make_task("t", "q", AccessMode::api), 4);
  EXPECT_EQ(s.feedback, Feedback::initial(4));
  s = observe_search(s, ApiNavAction::search("q"), kResults);
  EXPECT_EQ(s.history.back().digest, "2 results:\nhttps://a.example/1 — first\nhttps://b.example/2 — second");
  s = observe_search(s, ApiNavAction::search("q again"), kResults);
  EXPECT_TRUE(s.history.back().digest.starts_with("same results as the previous search"));
  s = observe_aggregate(s, ApiNavAction::aggregate(kResults[0].url), Feedback{"next: b", 3, false});
  EXPECT_EQ(s.last_results, kResults);
  EXPECT_TRUE(s.visited.contains(kResults[0].url));
  EXPECT_EQ(s.feedback.text, "next: b");
  EXPECT_EQ(s.history.back().digest, "aggregator feedback: next: b");
  s = observe_search(s, ApiNavAction::search("nothing"), {});
  EXPECT_EQ(s.history.back().digest, "no results; revise the query");
  EXPECT_TRUE(s.last_results.empty());
  s = observe_search_failure(s, ApiNavAction::search("x"), "HTTP 500");
  EXPECT_NE(s.history.back().digest.find("HTTP 500"), std::string::npos);
}

TEST(ApiPrompt, HistoryTruncationKeepsNewest) {
  ApiNavState s = initial_api_state(make_task("t", "q", AccessMode::api), 4);
  for (int i = 0; i < 40; ++i) s = observe_search(s, ApiNavAction::search("query " + std::to_string(i)), kResults);
  std::size_t omitted = 0;
  const std::string full = render_api_navigator_prompt(s, 1000000, {}, &omitted);
  EXPECT_EQ(omitted, 0u);
  const std::string cut = render_api_navigator_prompt(s, 2000, {}, &omitted);
  EXPECT_GT(omitted, 0u);
  EXPECT_LT(cut.size(), full.size());
  EXPECT_NE(cut.find("query 39"), std::string::npos);
  EXPECT_EQ(cut.find("\"query 0\""), std::string::npos);
  EXPECT_NE(cut.find("(" + std::to_string(omitted) + " earlier steps omitted)"), std::string::npos);
}

struct ApiFixture {
  ScriptedModel model;
  TraceRecorder trace;
  ApiNavigatorContext ctx{model, "nav", trace, 3, 24000};
  ApiNavState state = [] {
    ApiNavState s = initial_api_state(make_task("t", "q", AccessMode::api), 4);
    s = observe_search(s, ApiNavAction::search("q"), kResults);
    return observe_aggregate(s, ApiNavAction::aggregate(kResults[0].url), Feedback{"fb", 3, false});
  }();

  std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    for (const auto& e : trace.events()) out.push_back(e.payload.value("reason", ""));
    return out;
  }
};

TEST(NextAction, ValidAggregate) {
  ApiFixture f;
  f.model.push(R"j({"thought": "b has it", "tool": "aggregate", "argument": "https://b.example/2"})j");
  EXPECT_EQ(next_action(f.state, f.ctx), ApiNavAction::aggregate("https://b.example/2", "b has it"));
  EXPECT_TRUE(f.trace.events().empty());
  EXPECT_EQ(f.model.calls().at(0).mode, ResponseMode::free_text);
}

TEST(NextAction, EachViolationGetsOneReask) {
  ApiFixture f;
  f.model.push("{broken");
  f.model.push(R"j({"tool": "aggregate", "argument": "https://a.example/1"})j");
  f.model.push(R"j({"tool": "aggregate", "argument": "https://z.example/"})j");
  f.model.push(R"j({"tool": "search", "argument": "new query"})j");
  EXPECT_EQ(next_action(f.state, f.ctx), ApiNavAction::search("new query"));
  EXPECT_EQ(f.warnings(), (std::vector<std::string>{"parse_failure", "already_visited", "not_in_results"}));
  const auto calls = f.model.calls();
  ASSERT_EQ(calls.size(), 4u);
  EXPECT_NE(calls[1].prompt.text().find("could not be parsed"), std::string::npos);
  EXPECT_NE(calls[2].prompt.text().find("was already visited"), std::string::npos);
  EXPECT_NE(calls[3].prompt.text().find("not among the latest search results"), std::string::npos);
}

TEST(NextAction, RepeatedViolationTerminates) {
  ApiFixture f;
  f.model.push(R"j({"tool": "aggregate", "argument": "https://a.example/1"})j");
  f.model.push(R"j({"tool": "aggregate", "argument": "https://a.example/1"})j");
  const ApiNavAction a = next_action(f.state, f.ctx);
  EXPECT_EQ(a.kind, ApiNavAction::Kind::terminate);
  EXPECT_EQ(a.argument, "already_visited");

  ApiFixture g;
  g.model.push("{");
  g.model.push("{\"tool\": 7}");
  EXPECT_EQ(next_action(g.state, g.ctx).argument, "parse failure");
}

TEST(NextAction, PlainTextIsFinalMessage) {
  ApiFixture f;
  f.model.push("All the information has been aggregated.");
  EXPECT_EQ(next_action(f.state, f.ctx), ApiNavAction::terminate("All the information has been aggregated."));
}

TEST(NextAction, FeedbackReachesThePrompt) {
  ApiFixture f;
  f.state.feedback = Feedback{"Founder found; now search for her birthplace in Orvale records.", 2, false};
  f.model.push(R"j({"tool": "terminate", "argument": "done"})j");
  next_action(f.state, f.ctx);
  EXPECT_NE(f.model.calls().at(0).prompt.text().find(
                "Aggregator feedback: Founder found; now search for her birthplace in Orvale records.\n"
                "Extract iterations left: 2"),
            std::string::npos);
}

// ------------------------------------------------------------- visual mode

VisualObservation obs() {
  VisualObservation o;
  o.url = "https://wiki.example/A";
  o.screenshot.image = {1, 2, 3};
  o.candidates = {{0, ElementRole::input, "Search", true},
                  {1, ElementRole::select, "Collection", true},
                  {2, ElementRole::link, "Next", false}};
  return o;
}

TEST(Loop, Detection) {
  using A = VisualNavAction;
  EXPECT_FALSE(detect_loop(std::vector<A>{A::click(1), A::click(1)}));
  EXPECT_TRUE(detect_loop(std::vector<A>{A::go_back(), A::click(1), A::click(1), A::click(1)}));
  EXPECT_FALSE(detect_loop(std::vector<A>{A::click(1), A::click(2), A::click(1)}));
  EXPECT_TRUE(detect_loop(std::vector<A>{A::click(1), A::click(1)}, 2));
  std::vector<VisualHistoryEntry> h = {{"d", A::click(1), "ok"}, {"d", std::nullopt, "x"}, {"d", A::click(1), "ok"}};
  EXPECT_FALSE(detect_loop(h));
  h.push_back({"d", A::click(1), "ok"});
  EXPECT_FALSE(detect_loop(h));
  h.push_back({"d", A::click(1), "ok"});
  EXPECT_TRUE(detect_loop(h));
}

TEST(DirectAction, LastLineDecides) {
  EXPECT_EQ(direct_action("The page has the founder.\n\nAGGREGATE INFORMATION\n"), VisualNavAction::aggregate());
  EXPECT_EQ(direct_action("Done.\nAction: TERMINATE."), VisualNavAction::terminate());
  EXPECT_EQ(direct_action("Wrong page.\n**Go Back**"), VisualNavAction::go_back());
  EXPECT_FALSE(direct_action("I should aggregate soon.\nClick the link.").has_value());
  EXPECT_FALSE(direct_action("AGGREGATE\nthen click").has_value());
  EXPECT_FALSE(direct_action("").has_value());
}

TEST(Grounding, Parsing) {
  const auto o = obs();
  EXPECT_EQ(parse_grounding("ELEMENT: [0]\nACTION: TYPE\nVALUE: Kestrel Observatory", o),
            VisualNavAction::type(0, "Kestrel Observatory"));
  EXPECT_EQ(parse_grounding("element: 1\naction: select\nvalue: Astronomy", o), VisualNavAction::select(1, "Astronomy"));
  EXPECT_EQ(parse_grounding("ELEMENT: 1\nACTION: SELECT\nVALUE: None", o), VisualNavAction::select(1, std::nullopt));
  EXPECT_EQ(parse_grounding("ELEMENT: None\nACTION: PRESS ENTER\nVALUE: None", o), VisualNavAction::press_enter());
  EXPECT_EQ(parse_grounding("ACTION: GO BACK", o), VisualNavAction::go_back());
  EXPECT_EQ(parse_grounding("ELEMENT: 2\nACTION: CLICK\nVALUE: None\nELEMENT: 0\nACTION: TYPE\nVALUE: x", o),
            VisualNavAction::click(2));
}

TEST(Grounding, Failures) {
  const auto o = obs();
  for (const char* s : {"", "ELEMENT: 0", "ELEMENT: 0\nACTION: SCROLL DOWN", "ELEMENT: 0\nACTION: HOVER",
                        "ACTION: CLICK", "ELEMENT: 9\nACTION: CLICK", "ELEMENT: zero\nACTION: CLICK",
                        "ELEMENT: 0\nACTION: TYPE\nVALUE: None", "ELEMENT: 0\nACTION: TYPE"}) {
    EXPECT_THROW(parse_grounding(s, o), GroundingFailure) << s;
  }
}

struct VisualFixture {
  ScriptedModel model;
  TraceRecorder trace;
  VisualNavigatorContext ctx{model, "nav", trace, 5};
  Task task = make_task("t", "Which collection lists the observatory?", AccessMode::visual);
};

TEST(GroundAction, OneCorrectiveRetry) {
  VisualFixture f;
  f.model.push("ACTION: SCROLL");
  f.model.push("ELEMENT: 2\nACTION: CLICK\nVALUE: None");
  EXPECT_EQ(ground_action("Click Next.", obs(), f.task, f.ctx), VisualNavAction::click(2));
  EXPECT_EQ(f.trace.events().at(0).payload.at("reason"), "grounding_retry");
  EXPECT_EQ(f.model.calls().size(), 2u);

  VisualFixture g;
  g.model.push("nonsense");
  g.model.push("still nonsense");
  EXPECT_THROW(ground_action("Click Next.", obs(), g.task, g.ctx), GroundingFailure);
}

TEST(Generation, PromptCarriesFeedbackImageAndLoopNotice) {
  VisualFixture f;
  const Feedback fb{"Select the Astronomy collection next.", 2, false};
  std::vector<VisualHistoryEntry> h(3, VisualHistoryEntry{"Click Next.", VisualNavAction::click(2), "ok"});
  f.model.push("Something else.");
  EXPECT_EQ(generate_action_description(obs(), f.task, fb, h, f.ctx), "Something else.");
  const auto call = f.model.calls().at(0);
  EXPECT_EQ(call.prompt.image_count(), 1u);
  EXPECT_EQ(call.model, "nav");
  const std::string text = call.prompt.text();
  EXPECT_NE(text.find("Aggregator feedback: Select the Astronomy collection next.\nAggregate iterations left: 2"),
            std::string::npos);
  EXPECT_NE(text.find("Replanning notice"), std::string::npos);
  EXPECT_EQ(f.trace.events().at(0).payload.at("reason"), "loop_detected");
}

}  // namespace
}  // namespace infogent
