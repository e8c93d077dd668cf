#pragma once

#include <string>

#include <json.hpp>

#include "permflow/infer.hpp"
#include "permflow/ni.hpp"
#include "permflow/typecheck.hpp"

namespace permflow {

using Json = nlohmann::ordered_json;

Json diagnostics_json(const InputError& err);
/// Literal text plus the full table, one entry per permission set.
Json type_json(const BaseType& t, const System& sys);
Json function_type_json(const FunctionType& ft, const System& sys);
Json type_error_json(const TypeError& err, const System& sys);
Json check_json(const CheckReport& report, const System& sys);
Json infer_json(const InferReport& report, const System& sys);
Json ni_json(const NIReport& report, const System& sys);

std::string check_text(const CheckReport& report, const System& sys);
std::string infer_text(const InferReport& report, const System& sys);
std::string ni_text(const NIReport& report, const System& sys);

}  // namespace permflow
