#pragma once

#include <stdexcept>
#include <string>

#include "pgnav/embedding.hpp"
#include "pgnav/student.hpp"
#include "pgnav/teacher.hpp"

namespace pgnav {

// Portable model container: a text header (format version, model kind,
// shapes) followed by a base64 payload of little-endian IEEE doubles.
// Round-tripping reproduces behavior bit-exactly.

struct ModelVersionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ModelShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ModelTruncatedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void save_mlp(const MlpModel& m, const std::string& path);
MlpModel load_mlp(const std::string& path);

void save_nnql(const NnqlStore& s, const std::string& path);
NnqlStore load_nnql(const std::string& path);

void save_classifier(const PlaceClassifier& c, const std::string& path);
PlaceClassifier load_classifier(const std::string& path);

// Exposed for tests.
std::string base64_encode(const std::string& bytes);
std::string base64_decode(const std::string& text);

} // namespace pgnav
