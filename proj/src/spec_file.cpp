#include "tenx18/spec_file.hpp"

#include <fstream>
#include <sstream>

#include "tenx18/exact_table.hpp"

namespace tenx18 {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw SpecError("spec " + (path.empty() ? std::string("/") : path) + ": " + what);
}

Rational rational_field(const json& value, const std::string& path) {
  try {
    if (value.is_number_integer()) return Rational(value.get<long>());
    if (value.is_string()) return parse_rational(value.get<std::string>());
  } catch (const InvalidInput& e) {
    fail(path, e.what());
  }
  fail(path, "expected an integer or an \"n/d\" string");
}

int int_field(const json& value, const std::string& path) {
  if (!value.is_number_integer()) fail(path, "expected an integer");
  return value.get<int>();
}

int int_key(const std::string& key, const std::string& path) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(key, &used);
    if (used == key.size()) return v;
  } catch (const std::exception&) {
  }
  fail(path, "key '" + key + "' is not an integer");
}

DieSpec parse_die(const json& die, const std::string& path) {
  if (!die.is_object()) fail(path, "a die must be an object");
  std::vector<Face> faces;
  if (die.contains("sides")) {
    const int sides = int_field(die["sides"], path + "/sides");
    if (sides < 1) fail(path + "/sides", "must be at least 1");
    for (int v = 1; v <= sides; ++v) faces.push_back({v, Rational(1)});
    if (die.contains("weights")) {
      const auto& weights = die["weights"];
      if (!weights.is_object()) fail(path + "/weights", "expected an object");
      for (const auto& [key, w] : weights.items()) {
        const std::string wpath = path + "/weights/" + key;
        const int v = int_key(key, wpath);
        if (v < 1 || v > sides) fail(wpath, "no such face");
        faces[static_cast<std::size_t>(v - 1)].weight = rational_field(w, wpath);
      }
    }
  } else if (die.contains("faces")) {
    const auto& list = die["faces"];
    if (!list.is_array()) fail(path + "/faces", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string fpath = path + "/faces/" + std::to_string(i);
      const auto& f = list[i];
      if (f.is_number_integer()) {
        faces.push_back({f.get<int>(), Rational(1)});
      } else if (f.is_object() && f.contains("value")) {
        faces.push_back({int_field(f["value"], fpath + "/value"),
                         f.contains("weight") ? rational_field(f["weight"], fpath + "/weight")
                                              : Rational(1)});
      } else {
        fail(fpath, "expected an integer or {\"value\", \"weight\"}");
      }
    }
  } else {
    fail(path, "a die needs \"sides\" or \"faces\"");
  }
  try {
    return DieSpec(std::move(faces));
  } catch (const InvalidInput& e) {
    fail(path, e.what());
  }
}

Pmf parse_pmf_table(const json& table) {
  if (!table.is_object()) fail("/pmf", "expected an object");
  std::map<int, Rational> probs;
  for (const auto& [key, p] : table.items()) {
    const std::string path = "/pmf/" + key;
    probs[int_key(key, path)] = rational_field(p, path);
  }
  try {
    return Pmf::from_map(probs);
  } catch (const InvalidInput& e) {
    fail("/pmf", e.what());
  }
}

Pmf parse_dice(const json& list) {
  if (!list.is_array() || list.empty()) fail("/dice", "expected a non-empty array");
  std::vector<DieSpec> dice;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "/dice/" + std::to_string(i);
    DieSpec die = parse_die(list[i], path);
    int count = 1;
    if (list[i].contains("count")) count = int_field(list[i]["count"], path + "/count");
    if (count < 1) fail(path + "/count", "must be at least 1");
    for (int c = 0; c < count; ++c) dice.push_back(die);
  }
  return pmf_from_dice(dice);
}

SlotConfig parse_board(const json& doc) {
  std::vector<Rational> multipliers;
  if (doc.contains("multipliers")) {
    const auto& list = doc["multipliers"];
    if (!list.is_array()) fail("/multipliers", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      multipliers.push_back(rational_field(list[i], "/multipliers/" + std::to_string(i)));
    }
  } else {
    const int slots = doc.contains("slots") ? int_field(doc["slots"], "/slots") : 10;
    if (slots < 1) fail("/slots", "must be at least 1");
    for (int i = 1; i <= slots; ++i) multipliers.emplace_back(i);
  }
  try {
    return SlotConfig(std::move(multipliers));
  } catch (const InvalidInput& e) {
    fail("/multipliers", e.what());
  }
}

std::pair<int, int> line_and_column(std::string_view text, std::size_t byte) {
  int line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

GameSpec game_spec_from_json(const json& doc) {
  if (!doc.is_object()) fail("", "top level must be an object");
  if (doc.contains("dice") && doc.contains("pmf")) {
    fail("", "give either \"dice\" or \"pmf\", not both");
  }
  std::string label = "custom";
  if (doc.contains("label")) {
    if (!doc["label"].is_string()) fail("/label", "expected a string");
    label = doc["label"].get<std::string>();
  }
  Pmf pmf = doc.contains("pmf")    ? parse_pmf_table(doc["pmf"])
            : doc.contains("dice") ? parse_dice(doc["dice"])
                                   : standard_pmf();
  SlotConfig config = parse_board(doc);
  return GameSpec{std::move(label), std::move(pmf), std::move(config), doc};
}

GameSpec standard_game_spec() {
  return game_spec_from_json(json{{"label", "three fair d6, multipliers 1..10"},
                                  {"dice", json::array({{{"sides", 6}, {"count", 3}}})},
                                  {"slots", 10}});
}

GameSpec parse_game_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte);
    throw SpecError("spec line " + std::to_string(line) + ", column " +
                    std::to_string(column) + ": " + e.what());
  }
  return game_spec_from_json(doc);
}

GameSpec load_game_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_game_spec(buffer.str());
}

std::uint64_t game_spec_key(const GameSpec& spec) {
  return table_key(spec.pmf, spec.config);
}

}  // namespace tenx18
