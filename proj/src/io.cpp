#include "slopp/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

namespace slopp {

namespace {

struct Token {
  std::string text;
  int line = 0;
};

/// Whitespace-separated tokens with line tracking. CR is treated as a blank,
/// so LF and CRLF input read the same.
class Tokenizer {
 public:
  explicit Tokenizer(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    text_ = std::move(buf).str();
  }

  bool next(Token& out) {
    skip_blanks();
    if (pos_ >= text_.size()) return false;
    size_t start = pos_;
    while (pos_ < text_.size() && !is_blank(text_[pos_])) ++pos_;
    out.text = text_.substr(start, pos_ - start);
    out.line = line_;
    return true;
  }

  bool peek(Token& out) {
    size_t pos = pos_;
    int line = line_;
    bool ok = next(out);
    pos_ = pos;
    line_ = line;
    return ok;
  }

  int line() const { return line_; }

 private:
  static bool is_blank(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
           c == '\v';
  }

  void skip_blanks() {
    while (pos_ < text_.size() && is_blank(text_[pos_])) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string text_;
  size_t pos_ = 0;
  int line_ = 1;
};

[[noreturn]] void fail(int line, int instance_1based, const std::string& msg) {
  std::ostringstream os;
  os << "thpack parse error at line " << line;
  if (instance_1based > 0) {
    os << " (instance " << instance_1based << ")";
  }
  os << ": " << msg;
  throw ParseError(os.str());
}

long long read_int(Tokenizer& tz, int instance, const char* what) {
  Token tok;
  if (!tz.next(tok)) {
    fail(tz.line(), instance, std::string("unexpected end of input, expected ") + what);
  }
  long long value = 0;
  auto [ptr, ec] = std::from_chars(tok.text.data(),
                                   tok.text.data() + tok.text.size(), value);
  if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
    fail(tok.line, instance,
         "malformed token '" + tok.text + "', expected " + what);
  }
  return value;
}

bool read_flag(Tokenizer& tz, int instance, const char* what) {
  Token tok;
  int line = tz.line();
  long long v = read_int(tz, instance, what);
  (void)tok;
  if (v != 0 && v != 1) {
    fail(line, instance,
         std::string(what) + " must be 0 or 1, got " + std::to_string(v));
  }
  return v == 1;
}

std::string instance_name(std::string_view suite, int index_1based) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", index_1based);
  return std::string(suite) + "_" + buf;
}

}  // namespace

ThpackSuite parse_thpack(std::istream& in, std::string_view suite_name) {
  Tokenizer tz(in);
  ThpackSuite suite;

  long long case_count = read_int(tz, 0, "the number of test cases");
  if (case_count < 1) {
    fail(tz.line(), 0, "number of test cases must be positive");
  }

  for (int p = 1; p <= case_count; ++p) {
    Token idx_tok;
    if (!tz.next(idx_tok)) {
      fail(tz.line(), p, "unexpected end of input, expected case index");
    }
    long long idx = 0;
    auto [ptr, ec] = std::from_chars(
        idx_tok.text.data(), idx_tok.text.data() + idx_tok.text.size(), idx);
    if (ec != std::errc() || ptr != idx_tok.text.data() + idx_tok.text.size()) {
      fail(idx_tok.line, p, "malformed case index '" + idx_tok.text + "'");
    }
    if (idx != p) {
      fail(idx_tok.line, p,
           "case index " + std::to_string(idx) + " out of order, expected " +
               std::to_string(p));
    }

    // The grammar puts "p [seed]" on one line: a second token on the index
    // line is the optional PRNG seed.
    std::optional<long long> seed;
    Token peeked;
    if (tz.peek(peeked) && peeked.line == idx_tok.line) {
      seed = read_int(tz, p, "seed");
    }

    // File order is (L, W, H); canonical order is (W, L, H).
    Coord length = read_int(tz, p, "container length");
    Coord width = read_int(tz, p, "container width");
    Coord height = read_int(tz, p, "container height");
    for (Coord d : {length, width, height}) {
      if (d < 1) fail(tz.line(), p, "container dimensions must be positive");
    }

    long long num_classes = read_int(tz, p, "the number of item classes");
    if (num_classes < 1) {
      fail(tz.line(), p, "number of item classes must be positive");
    }

    Instance inst;
    inst.name = instance_name(suite_name, p);
    inst.container.dims = {width, length, height};
    inst.classes.reserve(size_t(num_classes));

    for (int i = 1; i <= num_classes; ++i) {
      int line = tz.line();
      long long class_idx = read_int(tz, p, "class index");
      if (class_idx != i) {
        fail(line, p,
             "class index " + std::to_string(class_idx) +
                 " out of order, expected " + std::to_string(i));
      }
      Coord l = read_int(tz, p, "class length");
      bool vl = read_flag(tz, p, "length vertical flag");
      Coord w = read_int(tz, p, "class width");
      bool vw = read_flag(tz, p, "width vertical flag");
      Coord h = read_int(tz, p, "class height");
      bool vh = read_flag(tz, p, "height vertical flag");
      long long count = read_int(tz, p, "class item count");

      if (l < 1 || w < 1 || h < 1) {
        fail(line, p,
             "class " + std::to_string(i) + " has a non-positive dimension");
      }
      if (!vl && !vw && !vh) {
        fail(line, p,
             "class " + std::to_string(i) + " has all vertical flags 0");
      }
      if (count < 1) {
        fail(line, p,
             "class " + std::to_string(i) + " has a non-positive item count");
      }

      ItemClass cls;
      cls.dims = {w, l, h};
      cls.vertical_ok = {vw, vl, vh};
      cls.count = int(count);
      inst.classes.push_back(cls);
    }

    suite.instances.push_back(std::move(inst));
    suite.seeds.push_back(seed);
  }

  Token trailing;
  if (tz.next(trailing)) {
    fail(trailing.line, int(case_count),
         "unexpected trailing content '" + trailing.text + "'");
  }
  return suite;
}

ThpackSuite parse_thpack_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open " + path.string());
  }
  return parse_thpack(in, path.stem().string());
}

namespace {

using Json = nlohmann::ordered_json;

Json vec3_to_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

Vec3 vec3_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError("expected a 3-element array");
  }
  return {j[0].get<Coord>(), j[1].get<Coord>(), j[2].get<Coord>()};
}

}  // namespace

std::string write_instance_json(const Instance& instance) {
  Json j;
  j["name"] = instance.name;
  j["container"] = vec3_to_json(instance.container.dims);
  j["classes"] = Json::array();
  for (const ItemClass& cls : instance.classes) {
    Json c;
    c["dims"] = vec3_to_json(cls.dims);
    c["vertical_ok"] =
        Json::array({cls.vertical_ok[0], cls.vertical_ok[1], cls.vertical_ok[2]});
    c["count"] = cls.count;
    j["classes"].push_back(std::move(c));
  }
  return j.dump(2) + "\n";
}

Instance read_instance_json(const std::string& text) {
  try {
    Json j = Json::parse(text);
    Instance inst;
    inst.name = j.at("name").get<std::string>();
    inst.container.dims = vec3_from_json(j.at("container"));
    for (const Json& c : j.at("classes")) {
      ItemClass cls;
      cls.dims = vec3_from_json(c.at("dims"));
      const Json& v = c.at("vertical_ok");
      cls.vertical_ok = {v.at(0).get<bool>(), v.at(1).get<bool>(),
                         v.at(2).get<bool>()};
      cls.count = c.at("count").get<int>();
      inst.classes.push_back(cls);
    }
    return inst;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("instance json: ") + e.what());
  }
}

std::string write_solution_json(const Instance& instance,
                                const Solution& solution,
                                const SolveStats& stats) {
  std::vector<Violation> violations = validate(instance, solution);
  if (!violations.empty()) {
    throw std::invalid_argument("refusing to serialize an invalid solution: " +
                                violations.front().describe());
  }

  Json j;
  j["instance"] = instance.name;
  j["container"] = vec3_to_json(instance.container.dims);
  j["placements"] = Json::array();
  for (const Placement& p : solution.placed) {
    Json pj;
    pj["item"] = p.item_index;
    pj["class"] = p.class_index;
    pj["rot"] = Json::array(
        {p.rotation.perm[0], p.rotation.perm[1], p.rotation.perm[2]});
    pj["pos"] = vec3_to_json(p.pos);
    pj["size"] =
        vec3_to_json(oriented_size(instance.classes[p.class_index], p.rotation));
    j["placements"].push_back(std::move(pj));
  }
  j["unpacked"] = solution.unpacked_counts;
  j["objective_cm3"] = solution.objective;
  j["volume_utilization"] = volume_utilization(instance, solution);
  Json sj;
  sj["nodes_explored"] = stats.nodes_explored;
  sj["propagations"] = stats.propagations;
  sj["solutions_found"] = stats.solutions_found;
  sj["wall_time_s"] = stats.wall_time.count();
  sj["proved_optimal"] = stats.proved_optimal;
  j["stats"] = std::move(sj);
  return j.dump(2) + "\n";
}

SolutionFile read_solution_json(const std::string& text) {
  try {
    Json j = Json::parse(text);
    SolutionFile out;
    out.instance_name = j.at("instance").get<std::string>();
    for (const Json& pj : j.at("placements")) {
      Placement p;
      p.item_index = pj.at("item").get<int>();
      p.class_index = pj.at("class").get<int>();
      const Json& r = pj.at("rot");
      p.rotation.perm = {r.at(0).get<std::uint8_t>(),
                         r.at(1).get<std::uint8_t>(),
                         r.at(2).get<std::uint8_t>()};
      p.pos = vec3_from_json(pj.at("pos"));
      out.solution.placed.push_back(p);
      out.stored_sizes.push_back(vec3_from_json(pj.at("size")));
    }
    out.solution.unpacked_counts = j.at("unpacked").get<std::vector<int>>();
    out.solution.objective = j.at("objective_cm3").get<Volume>();
    out.stored_volume_utilization = j.at("volume_utilization").get<double>();
    const Json& sj = j.at("stats");
    out.stats.nodes_explored = sj.at("nodes_explored").get<std::uint64_t>();
    out.stats.propagations = sj.at("propagations").get<std::uint64_t>();
    out.stats.solutions_found = sj.at("solutions_found").get<std::uint64_t>();
    out.stats.wall_time =
        std::chrono::duration<double>(sj.at("wall_time_s").get<double>());
    out.stats.proved_optimal = sj.at("proved_optimal").get<bool>();
    return out;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("solution json: ") + e.what());
  }
}

std::string write_progress_csv(const std::vector<ProgressRecord>& records) {
  std::string out = "elapsed_s,objective_cm3,left_boxes,volume_utilization\n";
  char buf[128];
  for (const ProgressRecord& r : records) {
    std::snprintf(buf, sizeof buf, "%.3f,%lld,%d,%.4f\n", r.elapsed_s,
                  static_cast<long long>(r.objective), r.left_boxes,
                  r.volume_utilization);
    out += buf;
  }
  return out;
}

}  // namespace slopp
