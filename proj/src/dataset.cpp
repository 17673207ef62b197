#include "sqlfix/dataset.hpp"

#include <unordered_set>

#include "json.hpp"

#include "sqlfix/errors.hpp"
#include "sqlfix/exec.hpp"
#include "sqlfix/util.hpp"

namespace sqlfix {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string string_field(const ordered_json& j, const char* name,
                         const char* alias) {
  for (const char* key : {name, alias}) {
    if (key == nullptr || !j.contains(key)) continue;
    const auto& v = j.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer())
      return std::to_string(v.get<long long>());
    if (v.is_number()) return std::to_string(v.get<double>());
  }
  return {};
}

}  // namespace

std::string FilterReport::to_json() const {
  ordered_json j;
  j["kept"] = kept;
  j["dropped_db_creation"] = dropped_db_creation;
  j["dropped_golden_error"] = dropped_golden_error;
  j["dropped_golden_empty"] = dropped_golden_empty;
  ordered_json ids = ordered_json::array();
  for (const auto& [id, reason] : dropped_ids)
    ids.push_back(ordered_json::array({id, reason}));
  j["dropped_ids"] = std::move(ids);
  return j.dump();
}

std::vector<DatasetRecord> load_dataset(const std::string& path) {
  std::string text = read_file(path);
  std::vector<DatasetRecord> records;
  std::unordered_set<std::string> seen_ids;
  size_t line_no = 0;
  for (const std::string& line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(line_no, "",
                        "line " + std::to_string(line_no) +
                            ": invalid JSON: " + e.what());
    }
    DatasetRecord r;
    r.id = string_field(j, "id", nullptr);
    if (r.id.empty()) r.id = "line" + std::to_string(line_no);
    r.nlq = string_field(j, "nlq", "sql_prompt");
    r.schema_ddl = string_field(j, "schema_ddl", "sql_context");
    r.golden_sql = string_field(j, "golden_sql", "sql");
    r.split = string_field(j, "split", nullptr);
    if (r.split.empty()) r.split = "train";
    if (r.nlq.empty())
      throw SchemaError(line_no, "sql_prompt",
                        "line " + std::to_string(line_no) +
                            ": missing field \"sql_prompt\" (nlq)");
    if (r.golden_sql.empty())
      throw SchemaError(line_no, "sql",
                        "line " + std::to_string(line_no) +
                            ": missing field \"sql\" (golden_sql)");
    if (!seen_ids.insert(r.id).second)
      throw SchemaError(line_no, "id",
                        "line " + std::to_string(line_no) +
                            ": duplicate record id \"" + r.id + "\"");
    records.push_back(std::move(r));
  }
  return records;
}

void save_dataset(const std::vector<DatasetRecord>& records,
                  const std::string& path) {
  std::string out;
  for (const DatasetRecord& r : records) {
    ordered_json j;
    j["id"] = r.id;
    j["nlq"] = r.nlq;
    j["schema_ddl"] = r.schema_ddl;
    j["golden_sql"] = r.golden_sql;
    j["split"] = r.split;
    out += j.dump();
    out += '\n';
  }
  write_file(path, out);
}

Database provision_database(const DatasetRecord& record) {
  return provision_database(record.schema_ddl);
}

std::pair<std::vector<DatasetRecord>, FilterReport> filter_records(
    const std::vector<DatasetRecord>& records) {
  std::vector<DatasetRecord> kept;
  FilterReport report;
  for (const DatasetRecord& r : records) {
    try {
      Database db = provision_database(r);
      ExecutionResult golden = execute(db, r.golden_sql);
      if (golden.error.has_value()) {
        ++report.dropped_golden_error;
        report.dropped_ids.emplace_back(r.id, "golden_error");
        continue;
      }
      if (golden.rows.empty()) {
        ++report.dropped_golden_empty;
        report.dropped_ids.emplace_back(r.id, "golden_empty");
        continue;
      }
      kept.push_back(r);
      ++report.kept;
    } catch (const DbCreationError&) {
      ++report.dropped_db_creation;
      report.dropped_ids.emplace_back(r.id, "db_creation");
    }
  }
  return {std::move(kept), report};
}

}  // namespace sqlfix
