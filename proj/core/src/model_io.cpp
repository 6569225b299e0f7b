#include "evtlearn/model_io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "evtlearn/csv.hpp"

namespace evtlearn {

namespace {

constexpr std::string_view kMagic = "evtlearn-model";

struct Record {
  std::string kind;
  std::map<std::string, std::string> header;
  std::vector<std::pair<std::size_t, double>> entries;  // coef or cell lines
};

void write_header(std::ostream& out, std::string_view kind) {
  out << kMagic << ' ' << kModelFormatVersion << '\n' << "kind=" << kind << '\n';
}

void write_key(std::ostream& out, std::string_view key, const std::string& value) {
  out << key << '=' << value << '\n';
}

std::string read_magic(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("model file is empty");
  std::istringstream ss(line);
  std::string magic;
  int version = 0;
  if (!(ss >> magic >> version) || magic != kMagic) throw std::runtime_error("not an evtlearn model file");
  if (version != kModelFormatVersion) {
    throw std::runtime_error("unsupported model format version " + std::to_string(version));
  }
  if (!std::getline(in, line) || line.rfind("kind=", 0) != 0) throw std::runtime_error("model file lacks kind");
  return line.substr(5);
}

Record read_record(std::istream& in, std::string_view expected_kind, std::string_view entry_tag) {
  Record rec;
  rec.kind = read_magic(in);
  if (rec.kind != expected_kind) {
    throw std::runtime_error("model kind is '" + rec.kind + "', expected '" + std::string(expected_kind) + "'");
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      rec.header[line.substr(0, eq)] = line.substr(eq + 1);
      continue;
    }
    std::istringstream ss(line);
    std::string tag, value;
    std::size_t index = 0;
    if (!(ss >> tag >> index >> value) || tag != entry_tag) throw std::runtime_error("bad model line '" + line + "'");
    const auto v = parse_double(value);
    if (!v) throw std::runtime_error("bad number in model line '" + line + "'");
    rec.entries.emplace_back(index, *v);
  }
  return rec;
}

const std::string& field(const Record& rec, const std::string& key) {
  const auto it = rec.header.find(key);
  if (it == rec.header.end()) throw std::runtime_error("model file lacks '" + key + "'");
  return it->second;
}

double number(const Record& rec, const std::string& key) {
  const auto v = parse_double(field(rec, key));
  if (!v) throw std::runtime_error("model field '" + key + "' is not a number");
  return *v;
}

std::size_t count(const Record& rec, const std::string& key) {
  const double v = number(rec, key);
  if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw std::runtime_error("model field '" + key + "' is not a count");
  }
  return static_cast<std::size_t>(v);
}

Eigen::VectorXd dense_vector(const Record& rec, std::size_t size) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size));
  for (const auto& [i, x] : rec.entries) {
    if (i >= size) throw std::runtime_error("coefficient index out of range");
    v(static_cast<Eigen::Index>(i)) = x;
  }
  return v;
}

void write_common(std::ostream& out, NormSpec norm, Standardization s, std::size_t k) {
  write_key(out, "norm", format_double(norm.p()));
  write_key(out, "standardization", std::string(to_string(s)));
  write_key(out, "k", std::to_string(k));
}

void write_beta(std::ostream& out, const Eigen::VectorXd& beta) {
  write_key(out, "d", std::to_string(beta.size()));
  for (Eigen::Index j = 0; j < beta.size(); ++j) out << "coef " << j << ' ' << format_double(beta(j)) << '\n';
}

template <class Load>
auto load_file(const std::filesystem::path& path, Load load) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return load(in);
}

}  // namespace

void save_model(std::ostream& out, const AngularLinearModel& model) {
  write_header(out, "xlasso");
  write_common(out, model.norm, model.standardization, model.k);
  write_key(out, "lambda", format_double(model.lambda));
  write_key(out, "iterations", std::to_string(model.iterations));
  write_key(out, "converged", model.converged ? "1" : "0");
  write_key(out, "objective", format_double(model.objective));
  write_beta(out, model.beta);
}

void save_model(std::ostream& out, const AngularClassifier& model) {
  write_header(out, "classifier");
  write_common(out, model.norm, model.standardization, model.k);
  write_key(out, "mode", model.mode.kind == PenaltyMode::kLagrangian ? "lagrangian" : "constrained");
  write_key(out, "mode_value", format_double(model.mode.value));
  write_key(out, "iterations", std::to_string(model.iterations));
  write_key(out, "converged", model.converged ? "1" : "0");
  write_key(out, "single_class", model.single_class ? "1" : "0");
  write_key(out, "objective", format_double(model.objective));
  write_beta(out, model.beta);
}

void save_model(std::ostream& out, const MvSetModel& model) {
  write_header(out, "mvset");
  write_common(out, model.norm, model.standardization, model.k);
  write_key(out, "grid_d", std::to_string(model.grid.d()));
  write_key(out, "grid_m", std::to_string(model.grid.m()));
  write_key(out, "alpha", format_double(model.alpha));
  write_key(out, "psi", format_double(model.psi));
  write_key(out, "achieved_mass", format_double(model.achieved_mass));
  std::string selected;
  for (std::size_t i = 0; i < model.selected_cells.size(); ++i) {
    if (i) selected += ',';
    selected += std::to_string(model.selected_cells[i]);
  }
  write_key(out, "selected", selected);
  for (std::size_t c = 0; c < model.cell_masses.size(); ++c) {
    if (model.cell_masses[c] != 0.0) out << "cell " << c << ' ' << format_double(model.cell_masses[c]) << '\n';
  }
}

std::string peek_model_kind(std::istream& in) { return read_magic(in); }

AngularLinearModel load_linear_model(std::istream& in) {
  const Record rec = read_record(in, "xlasso", "coef");
  AngularLinearModel m;
  m.norm = NormSpec(number(rec, "norm"));
  m.standardization = parse_standardization(field(rec, "standardization"));
  m.k = count(rec, "k");
  m.lambda = number(rec, "lambda");
  m.iterations = count(rec, "iterations");
  m.converged = field(rec, "converged") == "1";
  m.objective = number(rec, "objective");
  m.beta = dense_vector(rec, count(rec, "d"));
  return m;
}

AngularClassifier load_classifier(std::istream& in) {
  const Record rec = read_record(in, "classifier", "coef");
  AngularClassifier m;
  m.norm = NormSpec(number(rec, "norm"));
  m.standardization = parse_standardization(field(rec, "standardization"));
  m.k = count(rec, "k");
  const std::string& mode = field(rec, "mode");
  if (mode == "lagrangian") {
    m.mode = ClassifierMode::lagrangian(number(rec, "mode_value"));
  } else if (mode == "constrained") {
    m.mode = ClassifierMode::constrained(number(rec, "mode_value"));
  } else {
    throw std::runtime_error("unknown classifier mode '" + mode + "'");
  }
  m.iterations = count(rec, "iterations");
  m.converged = field(rec, "converged") == "1";
  m.single_class = field(rec, "single_class") == "1";
  m.objective = number(rec, "objective");
  m.beta = dense_vector(rec, count(rec, "d"));
  return m;
}

MvSetModel load_mvset_model(std::istream& in) {
  const Record rec = read_record(in, "mvset", "cell");
  MvSetModel m;
  m.norm = NormSpec(number(rec, "norm"));
  m.standardization = parse_standardization(field(rec, "standardization"));
  m.k = count(rec, "k");
  m.grid = build_grid(count(rec, "grid_d"), count(rec, "grid_m"));
  m.alpha = number(rec, "alpha");
  m.psi = number(rec, "psi");
  m.achieved_mass = number(rec, "achieved_mass");
  m.cell_masses.assign(m.grid.cell_count(), 0.0);
  for (const auto& [c, mass] : rec.entries) {
    if (c >= m.cell_masses.size()) throw std::runtime_error("cell index out of range");
    m.cell_masses[c] = mass;
  }
  const std::string& selected = field(rec, "selected");
  std::istringstream ss(selected);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = parse_double(item);
    if (!v || *v < 0.0 || static_cast<std::size_t>(*v) >= m.grid.cell_count()) {
      throw std::runtime_error("bad selected cell '" + item + "'");
    }
    m.selected_cells.push_back(static_cast<std::size_t>(*v));
  }
  return m;
}

template <class Model>
void save_model_file(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  save_model(out, model);
}

template void save_model_file(const std::filesystem::path&, const AngularLinearModel&);
template void save_model_file(const std::filesystem::path&, const AngularClassifier&);
template void save_model_file(const std::filesystem::path&, const MvSetModel&);

AngularLinearModel load_linear_model_file(const std::filesystem::path& path) {
  return load_file(path, [](std::istream& in) { return load_linear_model(in); });
}
AngularClassifier load_classifier_file(const std::filesystem::path& path) {
  return load_file(path, [](std::istream& in) { return load_classifier(in); });
}
MvSetModel load_mvset_model_file(const std::filesystem::path& path) {
  return load_file(path, [](std::istream& in) { return load_mvset_model(in); });
}

}  // namespace evtlearn
