// SPDX-License-Identifier: Apache-2.0
#include "ndf/dot.hpp"

#include <algorithm>
#include <sstream>

namespace ndf {

namespace {

std::string format_double(double v);  // token.cpp

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string node_label(const Actor& a) {
  std::ostringstream os;
  os << a.id << "\\n";
  switch (a.kind()) {
    case ActorKind::Operator:
      os << (a.is_copy() ? "copy" : "op: " + escape(a.as<OperatorParams>().fn));
      break;
    case ActorKind::Decider:
      os << "decider: " << escape(a.as<DeciderParams>().fn);
      break;
    case ActorKind::StaticWhere: {
      const auto& p = a.as<StaticWhereParams>().pattern;
      os << "static where " << p.cols() << "->" << p.rows();
      break;
    }
    case ActorKind::DynamicWhere: {
      const auto& ps = a.as<DynamicWhereParams>().patterns;
      os << "dynamic where " << (ps.empty() ? 0 : ps.front().cols()) << "->"
         << (ps.empty() ? 0 : ps.front().rows()) << " (" << ps.size() << " patterns)";
      break;
    }
    case ActorKind::When: {
      const auto& w = a.as<WhenParams>().config;
      os << "when k=" << w.k << " regions=" << w.regions.size();
      break;
    }
    case ActorKind::Source:
      os << "source " << escape(a.as<SourceParams>().var);
      break;
    case ActorKind::Sink: {
      const auto& v = a.as<SinkParams>().var;
      os << (v.empty() ? "drop" : "sink " + escape(v));
      break;
    }
    case ActorKind::Const: {
      std::ostringstream v;
      v << a.as<ConstParams>().value;
      os << "const " << v.str();
      break;
    }
    default:
      os << to_string(a.kind());
      break;
  }
  return os.str();
}

const char* node_shape(ActorKind k) {
  switch (k) {
    case ActorKind::Decider:
    case ActorKind::When:
      return "diamond";
    case ActorKind::TrueGate:
    case ActorKind::FalseGate:
      return "invtrapezium";
    case ActorKind::Merge:
      return "trapezium";
    case ActorKind::StaticWhere:
    case ActorKind::DynamicWhere:
      return "box3d";
    case ActorKind::Source:
    case ActorKind::Sink:
      return "ellipse";
    case ActorKind::Const:
      return "plaintext";
    default:
      return "box";
  }
}

const char* edge_style(ArcKind k) {
  switch (k) {
    case ArcKind::Data: return "solid";
    case ArcKind::Control: return "dashed";
    case ArcKind::Switch: return "bold";
  }
  return "solid";
}

}  // namespace

std::string export_dot(const DataflowGraph& g) {
  std::vector<const Actor*> actors;
  for (const auto& a : g.actors) actors.push_back(&a);
  std::sort(actors.begin(), actors.end(),
            [](const Actor* a, const Actor* b) { return a->id < b->id; });
  std::vector<Arc> arcs = g.arcs;
  std::sort(arcs.begin(), arcs.end());

  std::ostringstream os;
  os << "digraph ndf {\n";
  for (const Actor* a : actors)
    os << "  \"" << escape(a->id) << "\" [label=\"" << node_label(*a) << "\" shape="
       << node_shape(a->kind()) << "];\n";
  for (const Arc& arc : arcs)
    os << "  \"" << escape(arc.src) << "\" -> \"" << escape(arc.dst) << "\" [style="
       << edge_style(arc.kind) << " taillabel=\"" << arc.src_port << "\" headlabel=\""
       << arc.dst_port << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace ndf
