#pragma once

#include <stdexcept>
#include <string>

namespace wreathlab {

struct MixedOwnersError : std::invalid_argument {
    explicit MixedOwnersError(const std::string& what) : std::invalid_argument(what) {}
};

struct CapExceededError : std::runtime_error {
    explicit CapExceededError(const std::string& what) : std::runtime_error(what) {}
};

struct NonAbelianBaseError : std::invalid_argument {
    explicit NonAbelianBaseError(const std::string& what) : std::invalid_argument(what) {}
};

struct NotFiniteError : std::invalid_argument {
    explicit NotFiniteError(const std::string& what) : std::invalid_argument(what) {}
};

struct UnsupportedDescriptorError : std::invalid_argument {
    explicit UnsupportedDescriptorError(const std::string& what) : std::invalid_argument(what) {}
};

struct UnsupportedActingGroupError : std::invalid_argument {
    explicit UnsupportedActingGroupError(const std::string& what) : std::invalid_argument(what) {}
};

struct ArgumentsConjugateError : std::invalid_argument {
    explicit ArgumentsConjugateError(const std::string& what) : std::invalid_argument(what) {}
};

struct ArgumentInSubgroupError : std::invalid_argument {
    explicit ArgumentInSubgroupError(const std::string& what) : std::invalid_argument(what) {}
};

struct PreconditionViolatedError : std::invalid_argument {
    explicit PreconditionViolatedError(const std::string& what) : std::invalid_argument(what) {}
};

struct ParseError : std::invalid_argument {
    explicit ParseError(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace wreathlab
