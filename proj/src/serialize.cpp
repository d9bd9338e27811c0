// SPDX-License-Identifier: Apache-2.0
#include "ndf/serialize.hpp"

#include <json.hpp>

namespace ndf {

using json = nlohmann::json;

namespace {

json pattern_to_json(const ConnectionPattern& p) {
  json rows = json::array();
  for (int o = 0; o < p.rows(); ++o) {
    json row = json::array();
    for (int i = 0; i < p.cols(); ++i) row.push_back(p.at(o, i) ? 1 : 0);
    rows.push_back(std::move(row));
  }
  return json{{"rows", p.rows()}, {"cols", p.cols()}, {"matrix", std::move(rows)}};
}

ConnectionPattern pattern_from_json(const json& j) {
  ConnectionPattern p(j.at("rows").get<int>(), j.at("cols").get<int>());
  const json& m = j.at("matrix");
  if (static_cast<int>(m.size()) != p.rows()) throw GraphFormatError("pattern matrix row count mismatch");
  for (int o = 0; o < p.rows(); ++o) {
    if (static_cast<int>(m[o].size()) != p.cols())
      throw GraphFormatError("pattern matrix column count mismatch");
    for (int i = 0; i < p.cols(); ++i) p.set(o, i, m[o][i].get<int>() != 0);
  }
  return p;
}

const char* cmp_name(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "<";
}

CmpOp cmp_from_name(const std::string& s) {
  if (s == "<") return CmpOp::Lt;
  if (s == "<=") return CmpOp::Le;
  if (s == ">") return CmpOp::Gt;
  if (s == ">=") return CmpOp::Ge;
  throw GraphFormatError("unknown comparison op '" + s + "'");
}

json when_to_json(const WhenConfig& w) {
  json weights = json::array();
  for (int i = 0; i < w.n_inputs; ++i) {
    json row = json::array();
    for (int d = 0; d < w.k; ++d) row.push_back(w.weight(i, d));
    weights.push_back(std::move(row));
  }
  json f;
  switch (w.f.type) {
    case Nonlinearity::Type::Identity: f = json{{"type", "identity"}}; break;
    case Nonlinearity::Type::Leak: f = json{{"type", "leak"}, {"lambda", w.f.leak}}; break;
    case Nonlinearity::Type::Clamp: f = json{{"type", "clamp"}, {"lo", w.f.lo}, {"hi", w.f.hi}}; break;
  }
  json regions = json::array();
  for (const auto& r : w.regions) {
    json tests = json::array();
    for (const auto& t : r.tests)
      tests.push_back(json{{"coef", t.coef}, {"op", cmp_name(t.op)}, {"c", t.c}});
    json reg{{"tests", std::move(tests)}, {"pattern_id", r.pattern_id}};
    if (!r.anchor.empty()) reg["anchor"] = r.anchor;
    regions.push_back(std::move(reg));
  }
  const char* reset = w.reset == ResetRule::ToZero ? "to_zero"
                      : w.reset == ResetRule::SubtractAnchor ? "subtract_anchor"
                                                             : "none";
  json out{{"k", w.k},      {"n_inputs", w.n_inputs}, {"weights", std::move(weights)},
           {"f", std::move(f)}, {"regions", std::move(regions)}, {"reset", reset}};
  if (!w.v_init.empty()) out["v_init"] = w.v_init;
  return out;
}

WhenConfig when_from_json(const json& j) {
  WhenConfig w;
  w.k = j.at("k").get<int>();
  w.n_inputs = j.at("n_inputs").get<int>();
  const json& weights = j.at("weights");
  for (const auto& row : weights)
    for (const auto& v : row) w.weights.push_back(v.get<double>());
  const json& f = j.at("f");
  std::string ft = f.at("type").get<std::string>();
  if (ft == "identity")
    w.f = Nonlinearity::identity();
  else if (ft == "leak")
    w.f = Nonlinearity::leak_of(f.at("lambda").get<double>());
  else if (ft == "clamp")
    w.f = Nonlinearity::clamp_of(f.at("lo").get<double>(), f.at("hi").get<double>());
  else
    throw GraphFormatError("unknown nonlinearity '" + ft + "'");
  for (const auto& rj : j.at("regions")) {
    Region r;
    for (const auto& tj : rj.at("tests")) {
      HalfSpace t;
      t.coef = tj.at("coef").get<std::vector<double>>();
      t.op = cmp_from_name(tj.at("op").get<std::string>());
      t.c = tj.at("c").get<double>();
      r.tests.push_back(std::move(t));
    }
    r.pattern_id = rj.at("pattern_id").get<int>();
    if (rj.contains("anchor")) r.anchor = rj.at("anchor").get<std::vector<double>>();
    w.regions.push_back(std::move(r));
  }
  std::string reset = j.at("reset").get<std::string>();
  if (reset == "to_zero")
    w.reset = ResetRule::ToZero;
  else if (reset == "subtract_anchor")
    w.reset = ResetRule::SubtractAnchor;
  else if (reset == "none")
    w.reset = ResetRule::None;
  else
    throw GraphFormatError("unknown reset rule '" + reset + "'");
  if (j.contains("v_init")) w.v_init = j.at("v_init").get<std::vector<double>>();
  return w;
}

json token_to_json(const Token& t) {
  switch (t.kind) {
    case ArcKind::Data: return json{{"kind", "data"}, {"value", t.value}};
    case ArcKind::Control: return json{{"kind", "control"}, {"flag", t.flag}};
    case ArcKind::Switch: return json{{"kind", "switch"}, {"pattern_id", t.pattern_id}};
  }
  return {};
}

Token token_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "data") return Token::data(j.at("value").get<double>());
  if (kind == "control") return Token::control(j.at("flag").get<bool>());
  if (kind == "switch") return Token::pattern(j.at("pattern_id").get<int>());
  throw GraphFormatError("unknown token kind '" + kind + "'");
}

ArcKind arc_kind_from_name(const std::string& s) {
  if (s == "data") return ArcKind::Data;
  if (s == "control") return ArcKind::Control;
  if (s == "switch") return ArcKind::Switch;
  throw GraphFormatError("unknown arc kind '" + s + "'");
}

json actor_to_json(const Actor& a) {
  json params = json::object();
  switch (a.kind()) {
    case ActorKind::Operator: {
      const auto& p = a.as<OperatorParams>();
      params["fn"] = p.fn;
      params["arity"] = p.arity;
      if (a.is_copy()) {
        params["outputs"] = p.outputs;
        params["copy_kind"] = to_string(p.copy_kind);
      }
      break;
    }
    case ActorKind::Decider: {
      const auto& p = a.as<DeciderParams>();
      params["fn"] = p.fn;
      params["arity"] = p.arity;
      break;
    }
    case ActorKind::TrueGate:
    case ActorKind::FalseGate:
    case ActorKind::Merge:
      break;
    case ActorKind::StaticWhere:
      params["pattern"] = pattern_to_json(a.as<StaticWhereParams>().pattern);
      break;
    case ActorKind::DynamicWhere: {
      json ps = json::array();
      for (const auto& p : a.as<DynamicWhereParams>().patterns) ps.push_back(pattern_to_json(p));
      params["patterns"] = std::move(ps);
      break;
    }
    case ActorKind::When:
      params["config"] = when_to_json(a.as<WhenParams>().config);
      break;
    case ActorKind::Source:
      params["var"] = a.as<SourceParams>().var;
      break;
    case ActorKind::Sink:
      params["var"] = a.as<SinkParams>().var;
      break;
    case ActorKind::Const:
      params["value"] = a.as<ConstParams>().value;
      break;
  }
  return json{{"id", a.id}, {"kind", to_string(a.kind())}, {"params", std::move(params)}};
}

Actor actor_from_json(const json& j) {
  Actor a;
  a.id = j.at("id").get<std::string>();
  std::string kind = j.at("kind").get<std::string>();
  const json& p = j.at("params");
  if (kind == "operator") {
    OperatorParams op;
    op.fn = p.at("fn").get<std::string>();
    op.arity = p.at("arity").get<int>();
    if (p.contains("outputs")) op.outputs = p.at("outputs").get<int>();
    if (p.contains("copy_kind")) op.copy_kind = arc_kind_from_name(p.at("copy_kind").get<std::string>());
    a.params = std::move(op);
  } else if (kind == "decider") {
    a.params = DeciderParams{p.at("fn").get<std::string>(), p.at("arity").get<int>()};
  } else if (kind == "true_gate") {
    a.params = TrueGateParams{};
  } else if (kind == "false_gate") {
    a.params = FalseGateParams{};
  } else if (kind == "merge") {
    a.params = MergeParams{};
  } else if (kind == "static_where") {
    a.params = StaticWhereParams{pattern_from_json(p.at("pattern"))};
  } else if (kind == "dynamic_where") {
    DynamicWhereParams dw;
    for (const auto& pj : p.at("patterns")) dw.patterns.push_back(pattern_from_json(pj));
    a.params = std::move(dw);
  } else if (kind == "when") {
    a.params = WhenParams{when_from_json(p.at("config"))};
  } else if (kind == "source") {
    a.params = SourceParams{p.at("var").get<std::string>()};
  } else if (kind == "sink") {
    a.params = SinkParams{p.at("var").get<std::string>()};
  } else if (kind == "const") {
    a.params = ConstParams{p.at("value").get<double>()};
  } else {
    throw GraphFormatError("unknown actor kind '" + kind + "'");
  }
  return a;
}

// 1-based line/column of a byte offset.
std::pair<int, int> line_col(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::string serialize(const DataflowGraph& g) {
  json actors = json::array();
  for (const auto& a : g.actors) actors.push_back(actor_to_json(a));
  json arcs = json::array();
  for (const auto& arc : g.arcs)
    arcs.push_back(json{{"src", arc.src},
                        {"src_port", arc.src_port},
                        {"dst", arc.dst},
                        {"dst_port", arc.dst_port},
                        {"kind", to_string(arc.kind)}});
  json init = json::array();
  for (const auto& it : g.initial_tokens)
    init.push_back(json{{"arc_index", it.arc_index}, {"token", token_to_json(it.token)}});
  json root{{"actors", std::move(actors)}, {"arcs", std::move(arcs)},
            {"initial_tokens", std::move(init)}};
  return root.dump(2) + "\n";
}

DataflowGraph deserialize(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw GraphFormatError("parse error at line " + std::to_string(line) + ", column " +
                               std::to_string(col) + ": " + e.what(),
                           line, col);
  }
  DataflowGraph g;
  try {
    for (const auto& aj : root.at("actors")) g.actors.push_back(actor_from_json(aj));
    for (const auto& arcj : root.at("arcs")) {
      Arc arc;
      arc.src = arcj.at("src").get<std::string>();
      arc.src_port = arcj.at("src_port").get<int>();
      arc.dst = arcj.at("dst").get<std::string>();
      arc.dst_port = arcj.at("dst_port").get<int>();
      arc.kind = arc_kind_from_name(arcj.at("kind").get<std::string>());
      if (!g.find(arc.src)) throw GraphFormatError("arc references unknown actor '" + arc.src + "'");
      if (!g.find(arc.dst)) throw GraphFormatError("arc references unknown actor '" + arc.dst + "'");
      g.arcs.push_back(std::move(arc));
    }
    for (const auto& ij : root.at("initial_tokens")) {
      InitialToken it;
      it.arc_index = ij.at("arc_index").get<int>();
      it.token = token_from_json(ij.at("token"));
      if (it.arc_index < 0 || it.arc_index >= static_cast<int>(g.arcs.size()))
        throw GraphFormatError("initial token references arc " + std::to_string(it.arc_index) +
                               " which does not exist");
      g.initial_tokens.push_back(std::move(it));
    }
  } catch (const json::exception& e) {
    throw GraphFormatError(std::string("malformed graph: ") + e.what());
  }
  return g;
}

}  // namespace ndf
