#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace crcx {

enum class errc {
  division_near_zero,
  order_mismatch,
  base_point_mismatch,
  order_exhausted,
  branch_violation,
  syntax_error,
  unknown_identifier,
  not_pseudoconvex,
  degenerate_frame,
  contact_violation,
  non_real_gauge,
  undefined_on_bidegree,
  wrong_dimension,
  prerequisite_failed,
  non_symmetric,
  unknown_model,
  domain_out_of_chart,
  config_error,
  chart_parse_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::division_near_zero: return "DivisionNearZero";
    case errc::order_mismatch: return "OrderMismatch";
    case errc::base_point_mismatch: return "BasePointMismatch";
    case errc::order_exhausted: return "OrderExhausted";
    case errc::branch_violation: return "BranchViolation";
    case errc::syntax_error: return "SyntaxError";
    case errc::unknown_identifier: return "UnknownIdentifier";
    case errc::not_pseudoconvex: return "NotPseudoconvex";
    case errc::degenerate_frame: return "DegenerateFrame";
    case errc::contact_violation: return "ContactViolation";
    case errc::non_real_gauge: return "NonRealGauge";
    case errc::undefined_on_bidegree: return "UndefinedOnBidegree";
    case errc::wrong_dimension: return "WrongDimension";
    case errc::prerequisite_failed: return "PrerequisiteFailed";
    case errc::non_symmetric: return "NonSymmetric";
    case errc::unknown_model: return "UnknownModel";
    case errc::domain_out_of_chart: return "DomainOutOfChart";
    case errc::config_error: return "ConfigError";
    case errc::chart_parse_error: return "ChartParseError";
  }
  return "Error";
}

class CalcError : public std::runtime_error {
 public:
  CalcError(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

// Parse failure with byte offset and the token set that would have been accepted.
class ParseError : public CalcError {
 public:
  ParseError(errc code, const std::string& msg, std::size_t offset,
             std::vector<std::string> expected = {})
      : CalcError(code, msg + " at offset " + std::to_string(offset)),
        offset_(offset),
        expected_(std::move(expected)) {}
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

}  // namespace crcx
