/**
 * @file error.hpp
 * @brief Exception hierarchy shared by every palm module
 */
#pragma once

#include <stdexcept>
#include <string>

namespace palm {

enum class ErrorCode {
    InvalidArgument,
    Io,
    InvalidDataset,
    EmptyDataset,
    CorruptModel,
    BadImage,
    InvalidConfig,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(ErrorCode::InvalidArgument, msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(ErrorCode::Io, msg) {}
};

class InvalidDataset : public Error {
public:
    explicit InvalidDataset(const std::string& msg) : Error(ErrorCode::InvalidDataset, msg) {}
};

class EmptyDataset : public Error {
public:
    explicit EmptyDataset(const std::string& msg) : Error(ErrorCode::EmptyDataset, msg) {}
};

class CorruptModel : public Error {
public:
    explicit CorruptModel(const std::string& msg) : Error(ErrorCode::CorruptModel, msg) {}
};

class BadImage : public Error {
public:
    explicit BadImage(const std::string& msg) : Error(ErrorCode::BadImage, msg) {}
};

class InvalidConfig : public Error {
public:
    explicit InvalidConfig(const std::string& msg) : Error(ErrorCode::InvalidConfig, msg) {}
};

}  // namespace palm
