#ifndef SQUADPORT_ERRORS_HPP
#define SQUADPORT_ERRORS_HPP

#include <chrono>
#include <stdexcept>
#include <string>

namespace squadport {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input bytes are not valid UTF-8.
class EncodingError : public Error {
 public:
  using Error::Error;
};

/// Bad JSON or a missing/mistyped required field. Carries the document path
/// of the offending node ("data[3].paragraphs[0].qas[2].id").
class MalformedInput : public Error {
 public:
  MalformedInput(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Answer offsets touch no sentence span (they fall in uncovered whitespace);
/// signals corrupt input.
class AnswerOutsideContext : public Error {
 public:
  using Error::Error;
};

/// Remote backend gave up after exhausting retries.
class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

class RateLimited : public Error {
 public:
  RateLimited(const std::string& what, std::chrono::milliseconds retry_after)
      : Error(what), retry_after_(retry_after) {}
  std::chrono::milliseconds retry_after() const { return retry_after_; }

 private:
  std::chrono::milliseconds retry_after_;
};

class UnknownLanguage : public Error {
 public:
  using Error::Error;
};

/// BLEU over zero eligible pairs.
class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class MissingPrediction : public Error {
 public:
  explicit MissingPrediction(const std::string& qa_id)
      : Error("no prediction for qa id '" + qa_id + "'"), qa_id_(qa_id) {}
  const std::string& qa_id() const { return qa_id_; }

 private:
  std::string qa_id_;
};

class UnknownId : public Error {
 public:
  explicit UnknownId(const std::string& qa_id)
      : Error("prediction for unknown qa id '" + qa_id + "'"), qa_id_(qa_id) {}
  const std::string& qa_id() const { return qa_id_; }

 private:
  std::string qa_id_;
};

}  // namespace squadport

#endif  // SQUADPORT_ERRORS_HPP
