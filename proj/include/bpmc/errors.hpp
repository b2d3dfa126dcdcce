#pragma once

#include <stdexcept>
#include <string>

namespace bpmc {

// All library failures derive from Error and carry a stable machine
// readable code next to the human readable message.
struct Error : std::runtime_error {
    std::string code;

    Error(std::string c, const std::string& msg)
        : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

struct ParseError : Error {
    int line = 0;
    int col = 0;

    ParseError(const std::string& msg, int ln, int cl)
        : Error("ParseError",
                msg + " (line " + std::to_string(ln) + ", col " + std::to_string(cl) + ")"),
          line(ln), col(cl) {}
};

struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& msg) : Error("BudgetExceeded", msg) {}
};

inline Error make_error(const std::string& code, const std::string& msg) {
    return Error(code, msg);
}

}  // namespace bpmc
