#pragma once

#include <stdexcept>
#include <string>

namespace grushin {

class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}
    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

#define GRUSHIN_DEFINE_ERROR(Name)                                             \
    class Name : public Error {                                                \
    public:                                                                    \
        using Error::Error;                                                    \
    }

GRUSHIN_DEFINE_ERROR(DomainError);
GRUSHIN_DEFINE_ERROR(PrecisionLoss);
GRUSHIN_DEFINE_ERROR(ConvergenceError);
GRUSHIN_DEFINE_ERROR(BracketError);
GRUSHIN_DEFINE_ERROR(RegimeError);
GRUSHIN_DEFINE_ERROR(HypothesisError);
GRUSHIN_DEFINE_ERROR(DegenerateWindow);

#undef GRUSHIN_DEFINE_ERROR

}  // namespace grushin
