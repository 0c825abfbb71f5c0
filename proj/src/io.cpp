// Apache License, Version 2.0, refer to LICENSE.txt
#include "fablab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace fablab {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

Matrix load_csv_matrix(const std::filesystem::path& path, bool header) {
  std::ifstream in(path);
  if (!in) {
    throw CsvError(path.string() + ": cannot open file");
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (header && line_no == 1) continue;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    std::size_t col = 0;
    while (std::getline(fields, field, ',')) {
      ++col;
      const std::string cell = trim(field);
      double value = 0.0;
      const auto* begin = cell.data();
      const auto* end = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (cell.empty() || ec != std::errc{} || ptr != end) {
        throw CsvError(path.string() + ": row " + std::to_string(line_no) +
                       ", column " + std::to_string(col) +
                       ": cannot parse \"" + cell + "\" as a number");
      }
      if (!std::isfinite(value)) {
        throw CsvError(path.string() + ": row " + std::to_string(line_no) +
                       ", column " + std::to_string(col) + ": value not finite");
      }
      row.push_back(value);
    }
    if (cols == 0) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw CsvError(path.string() + ": row " + std::to_string(line_no) +
                     ": expected " + std::to_string(cols) + " columns, got " +
                     std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || cols == 0) {
    throw CsvError(path.string() + ": no data rows");
  }
  Matrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return x;
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error(tmp.string() + ": cannot open for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error(tmp.string() + ": write failed");
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (char c : raw) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string model_json(const GmmModel& model, double d, std::uint64_t seed,
                       int iterations, bool converged) {
  nlohmann::ordered_json j;
  j["k"] = model.components();
  j["weights"] = std::vector<double>(model.weights.begin(), model.weights.end());
  auto matrix_rows = [](const Matrix& m) {
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      rows.emplace_back(m.row(i).begin(), m.row(i).end());
    }
    return rows;
  };
  j["means"] = matrix_rows(model.means);
  j["variances"] = matrix_rows(model.variances);
  j["d"] = d;
  j["seed"] = seed;
  j["iterations"] = iterations;
  j["converged"] = converged;
  return j.dump(2) + "\n";
}

std::string dominance_csv(const std::vector<DominanceRow>& rows) {
  std::string out = "r,prior_kind,prior_param,tv_distance,map_blocks,map_partition\n";
  for (const auto& row : rows) {
    out += std::to_string(row.r) + ',' + csv_field(row.prior_kind) + ',' +
           csv_field(row.prior_param) + ',' + format_double(row.tv_distance) +
           ',' + std::to_string(row.map_blocks) + ',' +
           csv_field(row.map_partition) + '\n';
  }
  return out;
}

std::string selection_csv(const std::vector<SelectionRow>& rows) {
  std::string out = "d,seed,selected_k,objective,iterations,ari,status\n";
  for (const auto& row : rows) {
    if (row.status == "ok") {
      out += format_double(row.d) + ',' + std::to_string(row.seed) + ',' +
             std::to_string(row.selected_k) + ',' + format_double(row.objective) +
             ',' + std::to_string(row.iterations) + ',' + format_double(row.ari) +
             ",ok\n";
    } else {
      out += format_double(row.d) + ',' + std::to_string(row.seed) + ",,,,," +
             csv_field(row.status) + '\n';
    }
  }
  return out;
}

}  // namespace fablab
