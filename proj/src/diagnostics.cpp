#include "permflow/diagnostics.hpp"

#include <sstream>

namespace permflow {

std::string SourceSpan::to_string() const {
  if (!valid()) {
    return "<unknown>";
  }
  return std::to_string(line) + ":" + std::to_string(column);
}

const char* to_string(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::SyntaxError: return "SyntaxError";
    case DiagnosticKind::DuplicateName: return "DuplicateName";
    case DiagnosticKind::UnknownReference: return "UnknownReference";
    case DiagnosticKind::RecursiveCall: return "RecursiveCall";
    case DiagnosticKind::OpenFunction: return "OpenFunction";
    case DiagnosticKind::RepeatedPermissionTest: return "RepeatedPermissionTest";
    case DiagnosticKind::ArityMismatch: return "ArityMismatch";
    case DiagnosticKind::LetVarSelfReference: return "LetVarSelfReference";
    case DiagnosticKind::AssignToConstant: return "AssignToConstant";
    case DiagnosticKind::BadTypeLiteral: return "BadTypeLiteral";
    case DiagnosticKind::NotALattice: return "NotALattice";
    case DiagnosticKind::CycleInOrder: return "CycleInOrder";
    case DiagnosticKind::UnknownLevelName: return "UnknownLevelName";
    case DiagnosticKind::UnknownPermission: return "UnknownPermission";
    case DiagnosticKind::UniverseTooLarge: return "UniverseTooLarge";
    case DiagnosticKind::MissingAnnotation: return "MissingAnnotation";
  }
  return "Unknown";
}

std::string Diagnostic::to_string() const {
  std::ostringstream out;
  if (span.valid()) {
    out << span.to_string() << ": ";
  }
  out << permflow::to_string(kind) << ": " << message;
  return out.str();
}

namespace {

std::string summarize(const std::vector<Diagnostic>& diagnostics) {
  if (diagnostics.empty()) {
    return "input error";
  }
  std::string text = diagnostics.front().to_string();
  if (diagnostics.size() > 1) {
    text += " (and " + std::to_string(diagnostics.size() - 1) + " more)";
  }
  return text;
}

}  // namespace

InputError::InputError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(summarize(diagnostics)),
      diagnostics_(std::move(diagnostics)) {
  if (diagnostics_.empty()) {
    diagnostics_.push_back({DiagnosticKind::SyntaxError, {}, "input error"});
  }
}

InputError::InputError(DiagnosticKind kind, SourceSpan span, std::string message)
    : InputError(std::vector<Diagnostic>{{kind, span, std::move(message)}}) {}

}  // namespace permflow
