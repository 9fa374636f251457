#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmd {

// Base for all library errors. The CLI maps these to exit code 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// associative arrays
struct InvalidValue : Error {
    using Error::Error;
};
struct MixedTypeCollision : Error {
    using Error::Error;
};
struct TypeMismatch : Error {
    using Error::Error;
};
struct InvalidRange : Error {
    using Error::Error;
};

// text formats
struct ParseError : Error {
    using Error::Error;
};

// dense-table schema
struct RaggedRow : Error {
    using Error::Error;
};
struct DuplicateRowId : Error {
    using Error::Error;
};
struct DelimiterClash : Error {
    using Error::Error;
};
struct MalformedColumn : Error {
    using Error::Error;
};
struct MultiValueCell : Error {
    using Error::Error;
};

// masking
struct EmptyPassword : Error {
    using Error::Error;
};
struct InputTooLong : Error {
    using Error::Error;
};
struct DecryptFailure : Error {
    using Error::Error;
};
struct AuthFailure : Error {
    using Error::Error;
};
struct PolicyMismatch : Error {
    using Error::Error;
};
struct SchemeMismatch : Error {
    using Error::Error;
};

// table store
struct NotFound : Error {
    using Error::Error;
};
struct Corrupt : Error {
    Corrupt(const std::string& msg, std::size_t recovered_records)
        : Error(msg), recovered(recovered_records) {}
    std::size_t recovered;
};
struct IoFailure : Error {
    using Error::Error;
};
struct ConcurrentWriter : Error {
    using Error::Error;
};

// analytics and benchmarks
struct SequenceTooShort : Error {
    using Error::Error;
};
struct EmptyProjection : Error {
    using Error::Error;
};
struct CorrectnessFailure : Error {
    using Error::Error;
};

} // namespace cmd
