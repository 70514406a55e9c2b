// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace futurefoul {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed annotation document. `line` is 0 when the failure is structural
/// (wrong type or missing key) rather than a syntax error.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, std::string field)
      : Error(message), line_(line), field_(std::move(field)) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

/// Well-formed document that breaks a domain invariant.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& message, int frame_index)
      : Error(message), frame_index_(frame_index) {}

  int frame_index() const noexcept { return frame_index_; }

 private:
  int frame_index_;
};

class MissingFrameError : public Error {
 public:
  MissingFrameError(const std::string& message, int frame_index)
      : Error(message), frame_index_(frame_index) {}

  int frame_index() const noexcept { return frame_index_; }

 private:
  int frame_index_;
};

/// Tensor shapes that do not match the model configuration.
class ShapeError : public Error {
 public:
  ShapeError(const std::string& message, std::string branch)
      : Error(message), branch_(std::move(branch)) {}

  const std::string& branch() const noexcept { return branch_; }

 private:
  std::string branch_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& message, int epoch, int batch)
      : Error(message), epoch_(epoch), batch_(batch) {}

  int epoch() const noexcept { return epoch_; }
  int batch() const noexcept { return batch_; }

 private:
  int epoch_;
  int batch_;
};

enum class RejectReason {
  NoBall,
  InsufficientContext,
  ExcludedLabel,
  TooFewPlayers,
  LostTrack,
};

std::string_view to_string(RejectReason reason) noexcept;
std::optional<RejectReason> parse_reject_reason(std::string_view text) noexcept;

struct Rejection {
  std::string match_id;
  int time_s = 0;
  RejectReason reason = RejectReason::NoBall;

  friend bool operator==(const Rejection&, const Rejection&) = default;
};

/// Value-or-rejection carrier for pipeline stages that drop events instead of
/// failing.
template <class T>
class Result {
 public:
  Result(T value) : storage_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Result(RejectReason reason) : storage_(reason) {}  // NOLINT(google-explicit-constructor)

  bool ok() const noexcept { return std::holds_alternative<T>(storage_); }
  explicit operator bool() const noexcept { return ok(); }

  const T& value() const& {
    if (!ok()) throw Error("Result holds rejection " + std::string(to_string(reason())));
    return std::get<T>(storage_);
  }
  T& value() & {
    if (!ok()) throw Error("Result holds rejection " + std::string(to_string(reason())));
    return std::get<T>(storage_);
  }
  T&& value() && {
    if (!ok()) throw Error("Result holds rejection " + std::string(to_string(reason())));
    return std::get<T>(std::move(storage_));
  }

  RejectReason reason() const { return std::get<RejectReason>(storage_); }

 private:
  std::variant<T, RejectReason> storage_;
};

}  // namespace futurefoul
