#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "evtlearn/anomaly.hpp"
#include "evtlearn/classification.hpp"
#include "evtlearn/regression.hpp"

namespace evtlearn {

// Plain-text model files: a "evtlearn-model <version>" line, key=value header lines,
// then one "coef"/"cell" line per entry. Doubles are written in shortest round-trip
// form, so save followed by load is bit-exact.

inline constexpr int kModelFormatVersion = 1;

void save_model(std::ostream& out, const AngularLinearModel& model);
void save_model(std::ostream& out, const AngularClassifier& model);
void save_model(std::ostream& out, const MvSetModel& model);

/// "xlasso", "classifier" or "mvset"; throws on a bad header or unsupported version.
std::string peek_model_kind(std::istream& in);

AngularLinearModel load_linear_model(std::istream& in);
AngularClassifier load_classifier(std::istream& in);
MvSetModel load_mvset_model(std::istream& in);

template <class Model>
void save_model_file(const std::filesystem::path& path, const Model& model);

AngularLinearModel load_linear_model_file(const std::filesystem::path& path);
AngularClassifier load_classifier_file(const std::filesystem::path& path);
MvSetModel load_mvset_model_file(const std::filesystem::path& path);

}  // namespace evtlearn
