#pragma once

#include <string>
#include <string_view>

#include "ftaq/model.hpp"

namespace ftaq {

struct ModelSource {
  std::string text;
  std::string origin = "<inline>";
};

/// Parses the `.ftat` model format:
///
///   model <id>
///   //! <annotation>
///   toplevel <id>;
///   <id> = and(<id>, ...);   <id> = or(<id>, ...);
///   be <id> [prob=<float>];
///   bas <id> [prob=<float>] [cost=<float>] [time=<float>] [skill=<float>];
///   attach <be-id> -> <target-id>;
///
/// `//` starts a comment. Everything reachable from an attachment target is
/// the attack side; everything else reachable from the toplevel is the fault
/// side. The result has passed validate_model.
TreeModel parse_model(const ModelSource& src);

TreeModel parse_model_file(const std::string& path);

/// Parses without the final validation pass; used to report violation lists
/// instead of failing outright.
TreeModel parse_model_unvalidated(const ModelSource& src);

/// Canonical serialization: model line, annotations, toplevel, gates in
/// topological order (id-smallest first among ready gates), leaves by id,
/// attachments by source id. parse(serialize(m)) is structurally equal to m
/// and the output is byte-stable.
std::string serialize_model(const TreeModel& model);

/// Shortest round-trip decimal rendering used by all serializers.
std::string format_double(double value);

}  // namespace ftaq
