#include "data/corpus_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace data {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

json generator_to_json(const GeneratorConfig& g) {
  return json{{"sample_rate_hz", g.sample_rate_hz},
              {"duration_s", g.duration_s},
              {"onset_s", g.onset_s},
              {"noise_scale", g.noise_scale},
              {"grid_start_cm", g.grid_start_cm},
              {"grid_step_cm", g.grid_step_cm},
              {"grid_end_cm", g.grid_end_cm},
              {"grid_stride", g.grid_stride}};
}

GeneratorConfig generator_from_json(const json& j) {
  GeneratorConfig g;
  g.sample_rate_hz = j.at("sample_rate_hz").get<double>();
  g.duration_s = j.at("duration_s").get<double>();
  g.onset_s = j.at("onset_s").get<double>();
  g.noise_scale = j.at("noise_scale").get<double>();
  g.grid_start_cm = j.at("grid_start_cm").get<double>();
  g.grid_step_cm = j.at("grid_step_cm").get<double>();
  g.grid_end_cm = j.at("grid_end_cm").get<double>();
  g.grid_stride = j.at("grid_stride").get<int>();
  return g;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_case_csv(const std::filesystem::path& file, const TransientCase& c) {
  std::ostringstream out;
  out << "time_s";
  for (const auto& code : c.signal_order) out << ',' << code;
  out << '\n';
  for (std::size_t i = 0; i < c.length(); ++i) {
    out << format_double(c.time_s[i]);
    for (const auto& code : c.signal_order) {
      out << ',' << format_double(c.series(code)[i]);
    }
    out << '\n';
  }
  write_file(file, out.str());
}

TransientCase read_case_csv(const std::filesystem::path& csv_file,
                            const std::filesystem::path& sidecar_file) {
  TransientCase c;
  {
    json meta = json::parse(read_file(sidecar_file));
    c.case_id = meta.at("case_id").get<std::string>();
    c.location = location_from_string(meta.at("break_location").get<std::string>());
    c.break_size_cm = meta.at("break_size_cm").get<double>();
    c.sample_rate_hz = meta.at("sample_rate_hz").get<double>();
    c.duration_s = meta.at("duration_s").get<double>();
    c.onset_s = meta.at("onset_s").get<double>();
  }

  std::ifstream in(csv_file);
  if (!in) throw std::runtime_error("cannot open " + csv_file.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty case file " + csv_file.string());
  }
  std::vector<std::string> columns;
  {
    std::stringstream header(line);
    std::string col;
    while (std::getline(header, col, ',')) columns.push_back(col);
  }
  if (columns.empty() || columns[0] != "time_s") {
    throw std::runtime_error("case file must start with a time_s column");
  }
  c.signal_order.assign(columns.begin() + 1, columns.end());
  for (const auto& code : c.signal_order) c.signals[code] = {};

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(row, cell, ',')) {
      const double v = std::stod(cell);
      if (col == 0) {
        c.time_s.push_back(v);
      } else {
        c.signals[c.signal_order[col - 1]].push_back(v);
      }
      ++col;
    }
    if (col != columns.size()) {
      throw std::runtime_error("ragged row in " + csv_file.string());
    }
  }
  return c;
}

void save_corpus(const std::filesystem::path& dir, const CorpusOnDisk& corpus) {
  std::filesystem::create_directories(dir / "cases");

  json manifest;
  manifest["format"] = "transient-corpus-v1";
  manifest["seed"] = corpus.seed;
  manifest["generator"] = generator_to_json(corpus.generator);

  json case_list = json::array();
  for (const auto& c : corpus.cases) {
    const std::string stem = c.case_id;
    json meta{{"case_id", c.case_id},
              {"break_location", to_string(c.location)},
              {"break_size_cm", c.break_size_cm},
              {"sample_rate_hz", c.sample_rate_hz},
              {"duration_s", c.duration_s},
              {"onset_s", c.onset_s}};
    write_file(dir / "cases" / (stem + ".json"), meta.dump(2) + "\n");
    write_case_csv(dir / "cases" / (stem + ".csv"), c);
    case_list.push_back(json{{"case_id", c.case_id}, {"file", "cases/" + stem + ".csv"}});
  }
  manifest["cases"] = case_list;
  manifest["split"] = json{{"train", corpus.split.train_ids},
                           {"test", corpus.split.test_ids}};

  json stats = json::object();
  for (const auto& [code, m] : corpus.norm.by_signal) {
    stats[code] = json{{"mean", m.mean}, {"std", m.std}};
  }
  manifest["norm_stats"] = stats;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

CorpusOnDisk load_corpus(const std::filesystem::path& dir) {
  CorpusOnDisk corpus;
  json manifest = json::parse(read_file(dir / "manifest.json"));
  if (manifest.at("format").get<std::string>() != "transient-corpus-v1") {
    throw std::runtime_error("unsupported corpus format in " + dir.string());
  }
  corpus.seed = manifest.at("seed").get<std::uint64_t>();
  corpus.generator = generator_from_json(manifest.at("generator"));
  for (const auto& entry : manifest.at("cases")) {
    const std::string id = entry.at("case_id").get<std::string>();
    corpus.cases.push_back(read_case_csv(dir / "cases" / (id + ".csv"),
                                         dir / "cases" / (id + ".json")));
  }
  corpus.split.train_ids =
      manifest.at("split").at("train").get<std::vector<std::string>>();
  corpus.split.test_ids =
      manifest.at("split").at("test").get<std::vector<std::string>>();
  for (const auto& [code, m] : manifest.at("norm_stats").items()) {
    corpus.norm.by_signal[code] = {m.at("mean").get<double>(),
                                   m.at("std").get<double>()};
  }
  return corpus;
}

}  // namespace data
