#ifndef APBW_ERROR_HPP
#define APBW_ERROR_HPP

#include <stdexcept>
#include <string>

namespace apbw {

// Error taxonomy mirrors the CLI exit-code contract:
//   Structural  -> malformed input (exit 3)
//   Contract    -> precondition violated by the caller (exit 3)
//   Internal    -> a verified identity failed; indicates a solver bug (exit 5)
//   Resource    -> configured budget exceeded (exit 4)
//   Truncation  -> an operation exceeded its truncation level (exit 3)
enum class ErrorKind { Structural, Contract, Internal, Resource, Truncation };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_structural(const std::string& msg) {
  throw Error(ErrorKind::Structural, msg);
}
[[noreturn]] inline void fail_contract(const std::string& msg) {
  throw Error(ErrorKind::Contract, msg);
}
[[noreturn]] inline void fail_internal(const std::string& msg) {
  throw Error(ErrorKind::Internal, msg);
}
[[noreturn]] inline void fail_resource(const std::string& msg) {
  throw Error(ErrorKind::Resource, msg);
}

} // namespace apbw

#endif
