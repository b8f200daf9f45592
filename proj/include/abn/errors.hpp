#pragma once

#include <stdexcept>
#include <string>

namespace abn {

enum class Errc {
  syntax,
  cycle,
  row_sum,
  weight_sum,
  subset_union,
  dangling_reference,
  unknown_variable,
  unknown_state,
  size_limit,
  impossible_evidence,
  boundary_weights,
  not_chordal,
  bad_argument,
  internal,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

}  // namespace abn
