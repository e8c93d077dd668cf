#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace permflow {

struct SourceSpan {
  std::uint32_t line = 0;
  std::uint32_t column = 0;

  bool valid() const { return line != 0; }
  std::string to_string() const;
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class DiagnosticKind {
  SyntaxError,
  DuplicateName,
  UnknownReference,
  RecursiveCall,
  OpenFunction,
  RepeatedPermissionTest,
  ArityMismatch,
  LetVarSelfReference,
  AssignToConstant,
  BadTypeLiteral,
  NotALattice,
  CycleInOrder,
  UnknownLevelName,
  UnknownPermission,
  UniverseTooLarge,
  MissingAnnotation,
};

const char* to_string(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind;
  SourceSpan span;
  std::string message;

  std::string to_string() const;
};

/// Raised by loading, parsing and validation. Carries every diagnostic that
/// was collected before giving up.
class InputError : public std::runtime_error {
 public:
  explicit InputError(std::vector<Diagnostic> diagnostics);
  InputError(DiagnosticKind kind, SourceSpan span, std::string message);

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }
  DiagnosticKind kind() const { return diagnostics_.front().kind; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Misuse of the algebra (mismatched universes, inconsistent traces, ...).
class AlgebraError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace permflow
