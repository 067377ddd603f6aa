#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace conelength {

namespace detail {
inline std::string join(const std::vector<std::string>& v, const char* sep) {
    std::string out;
    for (const auto& s : v) {
        if (!out.empty()) out += sep;
        out += s;
    }
    return out;
}
} // namespace detail

enum class ErrorCategory { validation, solver };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string kind, const std::string& what)
        : std::runtime_error(what), category_(category), kind_(std::move(kind)) {}

    ErrorCategory category() const noexcept { return category_; }
    const std::string& kind() const noexcept { return kind_; }

private:
    ErrorCategory category_;
    std::string kind_;
};

#define CONELENGTH_ERROR(Name, Category)                                      \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& what)                                \
            : Error(ErrorCategory::Category, #Name, what) {}                  \
    };

CONELENGTH_ERROR(DomainError, validation)
CONELENGTH_ERROR(DegenerateConfiguration, validation)
CONELENGTH_ERROR(ExceptionalSurface, validation)
CONELENGTH_ERROR(TopologyMismatch, validation)
CONELENGTH_ERROR(ParseError, validation)
CONELENGTH_ERROR(InconsistentSpectrum, solver)
CONELENGTH_ERROR(DegenerateInput, solver)
CONELENGTH_ERROR(SingularSystem, solver)

#undef CONELENGTH_ERROR

class SchemaError : public Error {
public:
    explicit SchemaError(std::vector<std::string> violations)
        : Error(ErrorCategory::validation, "SchemaError", detail::join(violations, "; ")),
          violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

class MissingCurves : public Error {
public:
    explicit MissingCurves(std::vector<std::string> ids)
        : Error(ErrorCategory::validation, "MissingCurves", "missing curves: " + detail::join(ids, ", ")),
          ids_(std::move(ids)) {}

    const std::vector<std::string>& curves() const noexcept { return ids_; }

private:
    std::vector<std::string> ids_;
};

// Candidates are reported as "(a, b)" strings so the exception stays precision-agnostic.
class AmbiguousRecovery : public Error {
public:
    explicit AmbiguousRecovery(std::vector<std::string> candidates)
        : Error(ErrorCategory::solver, "AmbiguousRecovery", "ambiguous recovery: " + detail::join(candidates, " | ")),
          candidates_(std::move(candidates)) {}

    const std::vector<std::string>& candidates() const noexcept { return candidates_; }

private:
    std::vector<std::string> candidates_;
};

} // namespace conelength
