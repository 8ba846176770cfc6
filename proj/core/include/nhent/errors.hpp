#pragma once

#include "nhent/types.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace nhent {

// Numerical or domain failure raised by the library. The CLI maps these to exit status 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid user input (bad parameters, malformed config). Exit status 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

class SizeError : public ValidationError { public: using ValidationError::ValidationError; };
class ConfigError : public ValidationError { public: using ValidationError::ValidationError; };
class PartitionError : public ValidationError { public: using ValidationError::ValidationError; };
class OrderingError : public ValidationError { public: using ValidationError::ValidationError; };
class UnsupportedError : public ValidationError { public: using ValidationError::ValidationError; };

class SingularPotentialError : public Error { public: using Error::Error; };
class NormalizationError : public Error { public: using Error::Error; };
class BranchError : public Error { public: using Error::Error; };
class ConsistencyError : public Error { public: using Error::Error; };
class InsufficientDataError : public Error { public: using Error::Error; };
class DegeneracyError : public Error { public: using Error::Error; };

class DefectiveError : public Error {
public:
    DefectiveError(const std::string& what, double condition, std::vector<cplx> cluster)
        : Error(what), condition_(condition), cluster_(std::move(cluster)) {}
    double condition() const { return condition_; }
    const std::vector<cplx>& clustered_eigenvalues() const { return cluster_; }

private:
    double condition_;
    std::vector<cplx> cluster_;
};

class PartialSpectrumError : public Error {
public:
    PartialSpectrumError(const std::string& what, std::vector<int> excluded)
        : Error(what), excluded_(std::move(excluded)) {}
    const std::vector<int>& excluded_modes() const { return excluded_; }

private:
    std::vector<int> excluded_;
};

class CollapseError : public Error {
public:
    CollapseError(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

} // namespace nhent
