#include "rbal/record.hpp"

#include <fstream>
#include <sstream>

#include "rbal/errors.hpp"
#include "rbal/format.hpp"

namespace rbal {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  return cells;
}

double to_double(const std::string& text, const std::string& path, int row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError(path + ": row " + std::to_string(row) + ": bad number '" + text + "'");
  }
}

}  // namespace

int RunRecord::step_queries() const {
  int count = 0;
  for (const auto& step : steps) count += step.queried ? 1 : 0;
  return count;
}

void write_record_csv(std::ostream& out, const RunRecord& record) {
  out << 't';
  for (int k = 1; k <= record.class_count; ++k) out << ",belief_" << k;
  out << ",evpi,queried,action,oracle_action,pred_label,true_label\n";
  for (const auto& step : record.steps) {
    out << step.t;
    for (Eigen::Index k = 0; k < step.belief.size(); ++k) out << ',' << format_double(step.belief[k]);
    out << ',' << format_double(step.evpi) << ',' << (step.queried ? 1 : 0) << ','
        << step.action.index << ',' << step.oracle_action.index << ',' << step.predicted_label
        << ',' << step.true_label << '\n';
  }
}

void write_record_csv(const std::string& path, const RunRecord& record) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write_record_csv(out, record);
  if (!out) throw ConfigError("failed writing " + path);
}

void write_curve_csv(const std::string& path, const RunRecord& record) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "query_count,decision_accuracy,f1\n";
  for (std::size_t i = 0; i < record.accuracy_curve.size(); ++i) {
    out << record.accuracy_curve[i].query_count << ','
        << format_double(record.accuracy_curve[i].value) << ','
        << format_double(record.f1_curve[i].value) << '\n';
  }
  if (!out) throw ConfigError("failed writing " + path);
}

RunRecord read_record_csv(const std::string& path, int class_count) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  RunRecord record;
  record.class_count = class_count;
  std::string line;
  std::getline(in, line);  // header
  const std::size_t expected = static_cast<std::size_t>(class_count) + 7;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != expected)
      throw ParseError(path + ": row " + std::to_string(row) + ": expected " +
                       std::to_string(expected) + " columns");
    StepRecord step;
    step.t = static_cast<int>(to_double(cells[0], path, row));
    step.belief.resize(class_count);
    for (int k = 0; k < class_count; ++k)
      step.belief[k] = to_double(cells[static_cast<std::size_t>(k) + 1], path, row);
    std::size_t c = static_cast<std::size_t>(class_count) + 1;
    step.evpi = to_double(cells[c++], path, row);
    step.queried = to_double(cells[c++], path, row) != 0.0;
    step.action = Action{static_cast<int>(to_double(cells[c++], path, row))};
    step.oracle_action = Action{static_cast<int>(to_double(cells[c++], path, row))};
    step.predicted_label = static_cast<int>(to_double(cells[c++], path, row));
    step.true_label = static_cast<int>(to_double(cells[c++], path, row));
    record.steps.push_back(std::move(step));
  }
  return record;
}

std::pair<std::vector<CurvePoint>, std::vector<CurvePoint>> read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<CurvePoint> accuracy, f1;
  std::string line;
  std::getline(in, line);
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 3) throw ParseError(path + ": row " + std::to_string(row) + ": expected 3 columns");
    const int q = static_cast<int>(to_double(cells[0], path, row));
    accuracy.push_back({q, to_double(cells[1], path, row)});
    f1.push_back({q, to_double(cells[2], path, row)});
  }
  return {accuracy, f1};
}

}  // namespace rbal
