#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "fwdtd/error.hpp"
#include "fwdtd/harness.hpp"

namespace fwdtd {

namespace {

void put(std::ostream& out, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out << buf;
}

std::vector<std::string> split_cells(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, sep)) cells.push_back(cell);
  if (!line.empty() && line.back() == sep) cells.emplace_back();
  return cells;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double x = std::stod(s, &used);
  if (used != s.size()) throw ConfigError("bad number in CSV: '" + s + "'");
  return x;
}

std::uint64_t to_unsigned(const std::string& s) {
  std::size_t used = 0;
  const auto x = std::stoull(s, &used);
  if (used != s.size()) throw ConfigError("bad integer in CSV: '" + s + "'");
  return x;
}

}  // namespace

void emit_csv(const ResultTable& table, std::ostream& out) {
  out << kResultCsvHeader << '\n';
  for (const auto& r : table.rows) {
    out << r.task << ',' << r.algorithm << ',';
    put(out, r.lambda);
    out << ',';
    put(out, r.alpha);
    out << ',';
    put(out, r.eta);
    out << ',' << r.k_max << ',' << r.k << ',';
    put(out, r.epsilon);
    out << ',' << r.episodes << ',' << r.approximator << ',' << r.hidden << ',';
    put(out, r.init_range);
    out << ',' << r.run << ',' << r.run_seed << ',';
    put(out, r.aggregate);
    out << ',' << (r.diverged ? 1 : 0) << ',';
    for (std::size_t i = 0; i < r.curve.size(); ++i) {
      if (i) out << ';';
      put(out, r.curve[i]);
    }
    out << '\n';
  }
}

void emit_csv(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  emit_csv(table, out);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

ResultTable parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultCsvHeader) {
    throw ConfigError("CSV header does not match the result schema");
  }
  ResultTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_cells(line, ',');
    if (c.size() != 17) throw ConfigError("CSV row has " + std::to_string(c.size()) + " columns");
    ResultRow r;
    r.task = c[0];
    r.algorithm = c[1];
    r.lambda = to_double(c[2]);
    r.alpha = to_double(c[3]);
    r.eta = to_double(c[4]);
    r.k_max = c[5];
    r.k = c[6];
    r.epsilon = to_double(c[7]);
    r.episodes = to_unsigned(c[8]);
    r.approximator = c[9];
    r.hidden = to_unsigned(c[10]);
    r.init_range = to_double(c[11]);
    r.run = to_unsigned(c[12]);
    r.run_seed = to_unsigned(c[13]);
    r.aggregate = to_double(c[14]);
    r.diverged = c[15] == "1";
    if (!c[16].empty()) {
      for (const auto& x : split_cells(c[16], ';')) r.curve.push_back(to_double(x));
    }
    table.rows.push_back(std::move(r));
  }
  return table;
}

std::vector<SummaryRow> summarize(const ResultTable& table, bool higher_is_better) {
  using Key = std::tuple<std::string, std::string, double, double, double, std::string, std::string>;
  std::map<Key, std::size_t> index;
  std::vector<SummaryRow> out;
  std::vector<std::vector<double>> samples;
  for (const auto& r : table.rows) {
    const Key key{r.task, r.algorithm, r.lambda, r.alpha, r.eta, r.k_max, r.k};
    auto [it, inserted] = index.try_emplace(key, out.size());
    if (inserted) {
      out.push_back({r.task, r.algorithm, r.lambda, r.alpha, r.eta, r.k_max, r.k});
      samples.emplace_back();
    }
    samples[it->second].push_back(r.aggregate);
    out[it->second].diverged_runs += r.diverged ? 1 : 0;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& xs = samples[i];
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    out[i].runs = xs.size();
    out[i].mean = mean;
    out[i].std_error = xs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  }

  // The alpha sweep of a group is every summary row sharing all keys but alpha.
  using Group = std::tuple<std::string, std::string, double, double, std::string>;
  std::map<Group, std::size_t> best;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& s = out[i];
    const Group g{s.task, s.algorithm, s.lambda, s.eta, s.k_max};
    auto [it, inserted] = best.try_emplace(g, i);
    if (inserted) continue;
    const double incumbent = out[it->second].mean;
    if (higher_is_better ? s.mean > incumbent : s.mean < incumbent) it->second = i;
  }
  for (const auto& [g, i] : best) out[i].best_alpha = true;
  return out;
}

void emit_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "task,algorithm,lambda,alpha,eta,k_max,K,runs,mean,std_error,diverged_runs,best_alpha\n";
  for (const auto& s : rows) {
    out << s.task << ',' << s.algorithm << ',';
    put(out, s.lambda);
    out << ',';
    put(out, s.alpha);
    out << ',';
    put(out, s.eta);
    out << ',' << s.k_max << ',' << s.k << ',' << s.runs << ',';
    put(out, s.mean);
    out << ',';
    put(out, s.std_error);
    out << ',' << s.diverged_runs << ',' << (s.best_alpha ? 1 : 0) << '\n';
  }
}

const SummaryRow* best_alpha_row(const std::vector<SummaryRow>& rows, std::string_view algorithm,
                                 double lambda) {
  for (const auto& s : rows) {
    if (s.best_alpha && s.algorithm == algorithm && s.lambda == lambda) return &s;
  }
  return nullptr;
}

}  // namespace fwdtd
