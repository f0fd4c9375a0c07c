#pragma once

#include <stdexcept>
#include <string>

namespace disting {

// Exit-code categories used by the CLI.
enum class Errc {
    config = 2,
    infeasible = 3,
    search_failure = 4,
    cap_exceeded = 5,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

} // namespace disting
