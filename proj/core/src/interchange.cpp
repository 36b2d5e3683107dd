#include "lgplan/interchange.hpp"

#include <fstream>
#include <sstream>

#include "lgplan/errors.hpp"
#include "lgplan/io.hpp"

namespace lgplan {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed: " + path.string());
}

namespace {

constexpr std::string_view kMagic = "lgplan-task 1";

void write_ids(std::ostringstream& out, std::string_view key, const std::vector<int>& ids) {
  out << key << ' ' << ids.size();
  for (int id : ids) out << ' ' << id;
  out << '\n';
}

class DumpReader {
 public:
  explicit DumpReader(std::string_view text) : text_(text) {}

  std::string_view line() {
    if (pos_ >= text_.size()) fail("unexpected end of input");
    size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view l = text_.substr(pos_, end - pos_);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    pos_ = end + 1;
    ++line_no_;
    return l;
  }

  // "<key> <rest>" -> rest
  std::string_view keyed(std::string_view key) {
    std::string_view l = line();
    if (l.size() < key.size() + 1 || l.substr(0, key.size()) != key || l[key.size()] != ' ') {
      fail("expected '" + std::string(key) + "'");
    }
    return l.substr(key.size() + 1);
  }

  size_t count(std::string_view key) {
    std::istringstream in{std::string(keyed(key))};
    long long n = -1;
    if (!(in >> n) || n < 0) fail("expected count after '" + std::string(key) + "'");
    return static_cast<size_t>(n);
  }

  std::vector<int> ids(std::string_view key, size_t universe) {
    std::istringstream in{std::string(keyed(key))};
    long long n = -1;
    if (!(in >> n) || n < 0) fail("expected count after '" + std::string(key) + "'");
    std::vector<int> out;
    for (long long i = 0; i < n; ++i) {
      long long id = -1;
      if (!(in >> id)) fail("expected " + std::to_string(n) + " ids");
      if (id < 0 || static_cast<size_t>(id) >= universe) fail("id out of range");
      out.push_back(static_cast<int>(id));
    }
    std::string extra;
    if (in >> extra) fail("trailing tokens");
    return out;
  }

  bool at_end() const { return text_.find_first_not_of(" \t\r\n", pos_) == std::string_view::npos; }

  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, line_no_, 1); }

 private:
  std::string_view text_;
  size_t pos_ = 0;
  int line_no_ = 0;
};

}  // namespace

std::string write_task_dump(const StripsTask& task) {
  std::ostringstream out;
  out << kMagic << '\n';
  out << "propositions " << task.propositions.size() << '\n';
  for (const auto& p : task.propositions) out << p << '\n';
  out << "actions " << task.actions.size() << '\n';
  for (const auto& a : task.actions) {
    out << "action " << a.name << '\n';
    write_ids(out, "pre", a.pre);
    write_ids(out, "add", a.add);
    write_ids(out, "del", a.del);
    out << "cost " << a.cost << '\n';
  }
  write_ids(out, "init", task.init);
  write_ids(out, "goal", task.goal);
  out << "end\n";
  return out.str();
}

StripsTask read_task_dump(std::string_view text) {
  DumpReader r(text);
  if (r.line() != kMagic) r.fail("expected header '" + std::string(kMagic) + "'");
  StripsTask task;
  const size_t np = r.count("propositions");
  for (size_t i = 0; i < np; ++i) task.propositions.emplace_back(r.line());
  const size_t na = r.count("actions");
  for (size_t i = 0; i < na; ++i) {
    StripsAction a;
    a.name = std::string(r.keyed("action"));
    a.pre = r.ids("pre", np);
    a.add = r.ids("add", np);
    a.del = r.ids("del", np);
    a.cost = static_cast<int>(r.count("cost"));
    task.actions.push_back(std::move(a));
  }
  task.init = r.ids("init", np);
  task.goal = r.ids("goal", np);
  if (r.line() != "end") r.fail("expected 'end'");
  if (!r.at_end()) r.fail("trailing content after 'end'");
  task.validate();
  return task;
}

}  // namespace lgplan
