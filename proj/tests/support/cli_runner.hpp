#pragma once

// Drives the evtlearn executable through every subcommand in a scratch directory.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace evtlearn::testing {

namespace fs = std::filesystem;

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

class CliRunner {
 public:
  CliRunner(std::string exe, const std::string& tag) : exe_(std::move(exe)) {
    dir_ = fs::temp_directory_path() / ("evtlearn_" + tag + "_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
  }
  ~CliRunner() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  CliRunner(const CliRunner&) = delete;
  CliRunner& operator=(const CliRunner&) = delete;

  const fs::path& dir() const { return dir_; }
  fs::path path(const std::string& name) const { return dir_ / name; }

  /// Exit status of `evtlearn <args>`; stdout goes to `stdout_name` inside the scratch dir.
  int run(const std::string& args, const std::string& stdout_name = "stdout.txt") const {
    const std::string cmd = "\"" + exe_ + "\" " + args + " > \"" + path(stdout_name).string() + "\" 2> \"" +
                            path("stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string stderr_text() const { return slurp(path("stderr.txt")); }

 private:
  std::string exe_;
  fs::path dir_;
};

/// 49-column return table with a "Trans" column, built from a fixed-seed heavy-tailed draw.
inline std::string synthetic_portfolio_csv(std::size_t n) {
  std::mt19937_64 gen(2024);
  std::student_t_distribution<double> t(3.0);
  std::ostringstream out;
  for (int j = 0; j < 49; ++j) {
    if (j) out << ',';
    out << (j == 10 ? std::string("Trans") : "S" + std::to_string(j));
  }
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    const double market = t(gen);
    for (int j = 0; j < 49; ++j) {
      if (j) out << ',';
      out << market + 0.5 * t(gen);
    }
    out << '\n';
  }
  return out.str();
}

struct SubcommandCase {
  std::string name;
  std::string args;    // without --seed / --out
  std::string output;  // file name the command writes (via --out, or captured stdout)
  bool writes_file = true;
};

/// Inputs shared by the cases; call once per scratch directory.
inline bool prepare_inputs(const CliRunner& cli) {
  spit(cli.path("portfolio.csv"), synthetic_portfolio_csv(600));
  return cli.run("simulate --seed 5 --set generator=additive --set n=1500 --set d=5 --out " +
                 cli.path("additive.csv").string()) == 0 &&
         cli.run("simulate --seed 6 --set generator=classification --set n=3000 --set d=3 --out " +
                 cli.path("classes.csv").string()) == 0 &&
         cli.run("simulate --seed 7 --set generator=logistic --set n=2000 --set d=3 --out " +
                 cli.path("logistic.csv").string()) == 0 &&
         cli.run("mvset-fit --seed 1 --set input=" + cli.path("logistic.csv").string() +
                 " --set k=200 --set grid_m=3 --out " + cli.path("base.mvset").string()) == 0;
}

inline std::vector<SubcommandCase> subcommand_cases(const CliRunner& cli) {
  const std::string add = cli.path("additive.csv").string();
  const std::string cls = cli.path("classes.csv").string();
  const std::string lg = cli.path("logistic.csv").string();
  return {
      {"simulate", "simulate --set generator=logistic --set n=500 --set d=4", "simulate.csv"},
      {"standardize", "standardize --set input=" + lg, "standardize.csv"},
      {"angular-measure", "angular-measure --set input=" + lg + " --set k=150 --set region_lower=0.5,0,0",
       "angular.csv"},
      {"mvset-fit", "mvset-fit --set input=" + lg + " --set k=200 --set grid_m=3", "mvset.model"},
      {"score",
       "score --set input=" + lg + " --set train=" + lg + " --set model=" + cli.path("base.mvset").string(),
       "score.csv"},
      {"fit-xlasso", "fit-xlasso --set input=" + add + " --set target=y --set tau=0.1 --set lambda_points=10",
       "xlasso.model"},
      {"fit-classifier",
       "fit-classifier --set input=" + cls + " --set label=label --set k=150 --set value=5", "classifier.model"},
      {"cv", "cv --set input=" + add + " --set target=y --set p=0.1 --set lambda_points=6", "cv.csv"},
      {"bounds", "bounds --set requests=b_term,k_tilde,mc:quantile-lemma --set mc_replications=100", "bounds.csv"},
      {"experiment-sim",
       "experiment-sim --set n=1000 --set d=5 --set replications=2 --set n_test=5000 --set taus=0.03,0.05 "
       "--set lambda_points=6",
       "sim.csv"},
      {"experiment-portfolio",
       "experiment-portfolio --set input=" + cli.path("portfolio.csv").string() +
           " --set splits=2 --set taus=0.25,0.5 --set tau_test=0.05 --set lambda_points=5",
       "portfolio_errors.csv"},
  };
}

/// Runs `c` twice with the same seed; returns an empty string on byte-identical output,
/// otherwise a description of the failure.
inline std::string check_deterministic(const CliRunner& cli, const SubcommandCase& c) {
  std::string first;
  for (int pass = 0; pass < 2; ++pass) {
    const std::string out = cli.path(std::to_string(pass) + "_" + c.output).string();
    const int code = cli.run(c.args + " --seed 11 --out " + out);
    if (code != 0) return c.name + ": exit " + std::to_string(code) + ": " + cli.stderr_text();
    std::string bytes = slurp(out);
    const fs::path stem = fs::path(out).replace_extension();
    for (const char* extra : {".summary.csv", ".support.csv"}) {
      const fs::path side = fs::path(stem.string() + extra);
      if (fs::exists(side)) bytes += "\n--\n" + slurp(side);
    }
    if (bytes.empty()) return c.name + ": empty output";
    if (pass == 0) {
      first = std::move(bytes);
    } else if (bytes != first) {
      return c.name + ": outputs differ between runs";
    }
  }
  return {};
}

}  // namespace evtlearn::testing
