#include "element_view.hpp"

namespace rsl::detail {

namespace {

using Json = nlohmann::ordered_json;

Json opt(const std::optional<std::string>& v) { return v ? Json(*v) : Json(nullptr); }

Json priority(Priority p) { return p == Priority::Unset ? Json(nullptr) : Json(literal(p)); }

Json strings(const std::vector<std::string>& v) {
  Json arr = Json::array();
  for (const auto& s : v) arr.push_back(s);
  return arr;
}

}  // namespace

nlohmann::ordered_json element_view(const Element& e) {
  Json j;
  j["element_kind"] = std::string(to_string(e.kind()));
  j["id"] = e.id;
  j["name"] = opt(e.name);
  j["description"] = opt(e.description);
  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, Actor>) {
          j["kind"] = literal(body.kind);
        } else if constexpr (std::is_same_v<T, DataEntity>) {
          j["kind"] = literal(body.kind);
          Json attrs = Json::array();
          for (const auto& a : body.attributes) {
            Json cs = Json::array();
            for (auto c : a.constraints.members()) cs.push_back(literal(c));
            attrs.push_back(Json{{"name", a.name},
                                 {"datatype", literal(a.datatype)},
                                 {"constraints", std::move(cs)},
                                 {"references", opt(a.references)}});
          }
          j["attributes"] = std::move(attrs);
        } else if constexpr (std::is_same_v<T, UseCase>) {
          j["kind"] = literal(body.kind);
          j["primary_actor"] = body.primary_actor;
          j["data_entities"] = strings(body.data_entities);
          Json scs = Json::array();
          for (const auto& sc : body.scenarios) {
            Json steps = Json::array();
            for (const auto& st : sc.steps) {
              steps.push_back(Json{{"order", st.order}, {"performer", literal(st.performer)}, {"action", st.action}});
            }
            scs.push_back(Json{{"id", sc.id}, {"kind", literal(sc.kind)}, {"steps", std::move(steps)}});
          }
          j["scenarios"] = std::move(scs);
        } else if constexpr (std::is_same_v<T, UserStory>) {
          j["as_a"] = body.as_a;
          j["i_want"] = body.i_want;
          j["so_that"] = opt(body.so_that);
          j["priority"] = priority(body.priority);
        } else if constexpr (std::is_same_v<T, Goal>) {
          j["parent"] = opt(body.parent);
          j["priority"] = priority(body.priority);
        } else if constexpr (std::is_same_v<T, QualityRequirement>) {
          j["kind"] = literal(body.kind);
          j["metric"] = opt(body.metric);
          j["target_value"] = opt(body.target_value);
        } else if constexpr (std::is_same_v<T, TestCase>) {
          j["traces_to"] = body.traces_to;
          j["scenario_ref"] = opt(body.scenario);
          j["given"] = strings(body.given);
          j["when"] = strings(body.when);
          j["then"] = strings(body.then);
        } else if constexpr (std::is_same_v<T, GlossaryTerm>) {
          j["term"] = body.term;
          j["part_of_speech"] = literal(body.part_of_speech);
          j["definition"] = opt(body.definition);
          j["synonyms"] = strings(body.synonyms);
          j["preferred"] = body.preferred;
        }
      },
      e.body);
  return j;
}

}  // namespace rsl::detail
