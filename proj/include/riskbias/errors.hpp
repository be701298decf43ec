#pragma once

#include <stdexcept>
#include <string>

namespace riskbias {

// Base for all library failures so callers can catch one type.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Operation not defined for the requested law / risk combination.
struct UnsupportedError : Error {
    explicit UnsupportedError(const std::string& msg) : Error(msg) {}
};

// Sample cannot identify the parameters (e.g. zero variance).
struct DegenerateSampleError : Error {
    explicit DegenerateSampleError(const std::string& msg) : Error(msg) {}
};

// Moment-matching produced parameters outside the admissible region.
struct IllPosedFitError : Error {
    explicit IllPosedFitError(const std::string& msg) : Error(msg) {}
};

// Iterative fit did not converge within its iteration budget.
struct FitFailureError : Error {
    explicit FitFailureError(const std::string& msg) : Error(msg) {}
};

// Requested risk functional diverges for the given parameters.
struct InfiniteRiskError : Error {
    explicit InfiniteRiskError(const std::string& msg) : Error(msg) {}
};

// Required moment does not exist for the given parameters.
struct InfiniteMomentError : Error {
    explicit InfiniteMomentError(const std::string& msg) : Error(msg) {}
};

// Empirical tail set came out empty.
struct EmptyTailError : Error {
    explicit EmptyTailError(const std::string& msg) : Error(msg) {}
};

// Root bracketing failed in a numerical search.
struct BracketFailureError : Error {
    explicit BracketFailureError(const std::string& msg) : Error(msg) {}
};

// Too many bootstrap replicates were dropped to trust the bias estimate.
struct UnreliableBiasError : Error {
    explicit UnreliableBiasError(const std::string& msg) : Error(msg) {}
};

// Inconsistent or unusable configuration.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace riskbias
