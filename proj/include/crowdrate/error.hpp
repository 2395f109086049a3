#pragma once

#include <stdexcept>
#include <string>

namespace crowdrate {

// Every failure carries a short machine-readable category ("dimension",
// "grid", "parameter", "maxiter", ...) alongside the human message. The CLI
// maps categories onto exit codes.
class Error : public std::runtime_error {
public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

private:
  std::string category_;
};

[[noreturn]] inline void fail(const std::string& category, const std::string& message) {
  throw Error(category, message);
}

}  // namespace crowdrate
