#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mobscope {

// Errors caused by bad input or misuse of an operation's contract.
// The CLI maps these to exit code 2; anything else is an internal
// failure and maps to exit code 3.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

class InternalError : public std::runtime_error {
public:
    explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

class FileNotFoundError : public InputError {
public:
    explicit FileNotFoundError(const std::string& path)
        : InputError("file not found: " + path), path(path) {}
    std::string path;
};

class ParseError : public InputError {
public:
    ParseError(std::size_t row, const std::string& reason)
        : InputError("row " + std::to_string(row) + ": " + reason),
          row(row),
          reason(reason) {}
    std::size_t row;
    std::string reason;
};

class DuplicateCommentIdError : public InputError {
public:
    explicit DuplicateCommentIdError(const std::string& id)
        : InputError("duplicate comment_id: " + id), comment_id(id) {}
    std::string comment_id;
};

class UnknownChannelError : public InputError {
public:
    explicit UnknownChannelError(const std::string& id)
        : InputError("unknown channel: " + id), channel_id(id) {}
    std::string channel_id;
};

class ConfigError : public InputError {
public:
    ConfigError(const std::string& field, const std::string& reason)
        : InputError("config field '" + field + "': " + reason), field(field) {}
    std::string field;
};

class TooFewPointsError : public InputError {
public:
    explicit TooFewPointsError(int n)
        : InputError("too few points: " + std::to_string(n)), n(n) {}
    int n;
};

class TooFewRowsError : public InputError {
public:
    explicit TooFewRowsError(int n) : InputError("too few rows: " + std::to_string(n)), n(n) {}
    int n;
};

class InvalidKError : public InputError {
public:
    InvalidKError(int k, int n)
        : InputError("invalid k=" + std::to_string(k) + " for n=" + std::to_string(n)), k(k) {}
    int k;
};

class MismatchedChannelsError : public InputError {
public:
    MismatchedChannelsError() : InputError("assignments cover different channel sets") {}
};

class UncoveredNodeError : public InputError {
public:
    explicit UncoveredNodeError(const std::string& id)
        : InputError("node not covered by assignment: " + id), node_id(id) {}
    std::string node_id;
};

class InconsistentInputsError : public InputError {
public:
    using InputError::InputError;
};

}  // namespace mobscope
