#pragma once

#include <stdexcept>
#include <string>

namespace cssrs {

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorKind { Usage = 2, Data = 3, Train = 4, Internal = 5 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& msg) { return Error(ErrorKind::Usage, msg); }
inline Error data_error(const std::string& msg) { return Error(ErrorKind::Data, msg); }
inline Error train_error(const std::string& msg) { return Error(ErrorKind::Train, msg); }
inline Error internal_error(const std::string& msg) { return Error(ErrorKind::Internal, msg); }

}  // namespace cssrs
