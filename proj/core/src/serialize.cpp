#include "deltanls/serialize.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace deltanls {

std::string field_to_json(const WaveField& f) {
  nlohmann::json j;
  j["n"] = f.grid->n;
  j["half_width"] = f.grid->half_width;
  nlohmann::json vals = nlohmann::json::array();
  for (const Complex& v : f.values) {
    vals.push_back({v.real(), v.imag()});
  }
  j["values"] = std::move(vals);
  return j.dump();
}

WaveField field_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const int n = j.at("n").get<int>();
  const double half_width = j.at("half_width").get<double>();
  const auto& vals = j.at("values");
  if (static_cast<int>(vals.size()) != n) {
    throw std::invalid_argument("field json: values length does not match n");
  }
  WaveField f = make_field(make_grid(n, half_width));
  for (int k = 0; k < n; ++k) {
    f.values[k] = Complex{vals[k][0].get<double>(), vals[k][1].get<double>()};
  }
  return f;
}

void save_field(const std::string& path, const WaveField& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_field: cannot open " + path);
  out << field_to_json(f) << "\n";
}

WaveField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_field: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return field_from_json(text);
}

}  // namespace deltanls
