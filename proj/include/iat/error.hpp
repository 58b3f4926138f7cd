#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iat {

enum class ErrorCode {
  invalid_argument,
  no_layers,
  empty_network,
  undefined_self_score,
  oracle_limit,
  rank_mismatch,
  malformed_json,
  unknown_layer_type,
  duplicate_path,
  validation,
  invalid_name,
  unsupported_version,
  bad_magic,
  truncated,
  alignment,
  offset_overlap,
  shape_mismatch,
  unsupported_dtype,
  io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace iat
