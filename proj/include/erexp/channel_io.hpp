#pragma once

#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <json.hpp>

#include "erexp/ensemble.hpp"
#include "erexp/errors.hpp"

// Channel specifications for the command line: either the shorthand
// "bsc:<p>" or a path to a JSON file of the form
//   {"input_dist": [...], "channel": [[...], ...]}
// with channel rows indexed by input letter.

namespace erexp::io {

class file_error : public std::runtime_error {
 public:
  explicit file_error(const std::string& what) : std::runtime_error(what) {}
};

inline ensemble parse_channel_json(const std::string& text, const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw invalid_ensemble(origin + ": not valid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("input_dist") || !doc.contains("channel")) {
    throw invalid_ensemble(origin + ": expected an object with input_dist and channel");
  }
  std::vector<double> input;
  std::vector<std::vector<double>> rows;
  try {
    input = doc["input_dist"].get<std::vector<double>>();
    rows = doc["channel"].get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw invalid_ensemble(origin + ": input_dist must be an array and channel a matrix: " +
                           e.what());
  }
  return ensemble(std::move(input), std::move(rows));
}

// Resolves "bsc:<p>" or a JSON file path into a validated ensemble.
inline ensemble load_channel(const std::string& spec) {
  if (spec.rfind("bsc:", 0) == 0) {
    const std::string arg = spec.substr(4);
    double p = 0.0;
    std::size_t used = 0;
    try {
      p = std::stod(arg, &used);
    } catch (const std::exception&) {
      throw invalid_ensemble("bad crossover probability in '" + spec + "'");
    }
    if (used != arg.size()) throw invalid_ensemble("bad crossover probability in '" + spec + "'");
    if (!(p > 0.0 && p < 0.5)) {
      throw invalid_ensemble("BSC crossover probability must lie in (0, 0.5); the p > 1/2 "
                             "mirror is the caller's job");
    }
    return make_bsc(p);
  }
  std::ifstream in(spec);
  if (!in) throw file_error("cannot open channel file '" + spec + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw file_error("failed reading channel file '" + spec + "'");
  return parse_channel_json(text, spec);
}

}  // namespace erexp::io
