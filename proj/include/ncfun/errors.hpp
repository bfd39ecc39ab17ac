#pragma once

#include <stdexcept>
#include <string>

namespace ncfun {

/// Base class for all library errors. `kind()` is a stable machine-readable
/// tag; the what() string carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Malformed or schema-violating input (CLI exit code 2).
struct SchemaError : Error {
    explicit SchemaError(const std::string& msg) : Error("SchemaError", msg) {}
};

/// Domain errors raised by library operations (CLI exit code 3).
struct DomainError : Error {
    using Error::Error;
};

#define NCFUN_DOMAIN_ERROR(Name)                                              \
    struct Name : DomainError {                                               \
        explicit Name(const std::string& msg) : DomainError(#Name, msg) {}    \
    }

NCFUN_DOMAIN_ERROR(LetterCountMismatch);
NCFUN_DOMAIN_ERROR(ComponentCountMismatch);
NCFUN_DOMAIN_ERROR(ShapeMismatch);
NCFUN_DOMAIN_ERROR(SizeMismatch);
NCFUN_DOMAIN_ERROR(SingularSimilarity);
NCFUN_DOMAIN_ERROR(NonScalarCenter);
NCFUN_DOMAIN_ERROR(NotNilpotent);
NCFUN_DOMAIN_ERROR(NotSquare);
NCFUN_DOMAIN_ERROR(SingularDifferential);
NCFUN_DOMAIN_ERROR(CenterResidualNonzero);
NCFUN_DOMAIN_ERROR(IterationBudgetExceeded);
NCFUN_DOMAIN_ERROR(NotNilpotentOperator);
NCFUN_DOMAIN_ERROR(MaxIterationsExceeded);
NCFUN_DOMAIN_ERROR(DomainEscape);
NCFUN_DOMAIN_ERROR(NoContractionFound);
NCFUN_DOMAIN_ERROR(BlowupDetected);
NCFUN_DOMAIN_ERROR(SingularKktJacobian);
NCFUN_DOMAIN_ERROR(UnknownSuite);

#undef NCFUN_DOMAIN_ERROR

} // namespace ncfun
