#pragma once

#include <stdexcept>
#include <string>

namespace vdm {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problems with external inputs (datasets, files, configs). The CLI maps
// these to exit code 2.
struct DataError : Error {
  using Error::Error;
};

struct MissingFileError : DataError {
  explicit MissingFileError(const std::string& path)
      : DataError("missing file: " + path), path(path) {}
  std::string path;
};

struct MalformedLineError : DataError {
  MalformedLineError(const std::string& file, int line, const std::string& what)
      : DataError(file + ":" + std::to_string(line) + ": " + what),
        file(file),
        line(line) {}
  std::string file;
  int line;
};

struct MalformedHeaderError : DataError {
  using DataError::DataError;
};

struct NoAssociationsError : DataError {
  using DataError::DataError;
};

struct NoValidDepthError : DataError {
  using DataError::DataError;
};

struct EmptyInputError : DataError {
  using DataError::DataError;
};

struct EmptyGraphError : DataError {
  using DataError::DataError;
};

struct IoError : DataError {
  using DataError::DataError;
};

// Broken internal invariants; exit code 3 in the CLI.
struct InternalError : Error {
  using Error::Error;
};

}  // namespace vdm
