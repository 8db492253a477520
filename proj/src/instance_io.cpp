#include "uflow/instance_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace uflow {

namespace {

// Splits the stream into meaningful lines (comments and blanks dropped),
// remembering original line numbers for error messages.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::istringstream& line) {
    std::string text;
    while (std::getline(in_, text)) {
      ++number_;
      if (auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
      if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
      line.clear();
      line.str(text);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error("line " + std::to_string(number_) + ": " + what);
  }

  int number() const { return number_; }

 private:
  std::istream& in_;
  int number_ = 0;
};

template <typename T>
T read_value(std::istringstream& line, const LineReader& reader, const char* what) {
  T value{};
  if (!(line >> value)) reader.fail(std::string("expected ") + what);
  return value;
}

void expect_end(std::istringstream& line, const LineReader& reader) {
  std::string extra;
  if (line >> extra) reader.fail("unexpected token '" + extra + "'");
}

void expect_keyword(std::istringstream& line, const LineReader& reader, const std::string& kw) {
  std::string token;
  if (!(line >> token) || token != kw) reader.fail("expected '" + kw + "'");
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

Instance read_instance(std::istream& in) {
  LineReader reader(in);
  std::istringstream line;
  if (!reader.next(line)) throw Error("instance: empty input");

  expect_keyword(line, reader, "nodes");
  const auto nodes = read_value<long long>(line, reader, "node count");
  std::string kind;
  line >> kind;
  const bool undirected = kind == "edges";
  if (kind != "arcs" && kind != "edges") reader.fail("expected 'arcs' or 'edges'");
  const auto lines = read_value<long long>(line, reader, "arc count");
  expect_keyword(line, reader, "commodities");
  const auto commodity_count = read_value<long long>(line, reader, "commodity count");
  expect_end(line, reader);
  if (nodes < 0 || lines < 0 || commodity_count < 0) reader.fail("negative count");

  std::vector<Arc> arcs;
  arcs.reserve(static_cast<std::size_t>(undirected ? 2 * lines : lines));
  for (long long i = 0; i < lines; ++i) {
    if (!reader.next(line)) reader.fail("missing arc line");
    Arc a;
    a.tail = read_value<NodeId>(line, reader, "tail");
    a.head = read_value<NodeId>(line, reader, "head");
    a.capacity = read_value<double>(line, reader, "capacity");
    expect_end(line, reader);
    if (a.tail < 0 || a.tail >= nodes || a.head < 0 || a.head >= nodes) {
      reader.fail("arc endpoint outside [0, " + std::to_string(nodes) + ")");
    }
    arcs.push_back(a);
    if (undirected) arcs.push_back(Arc{a.head, a.tail, a.capacity});
  }

  Instance instance;
  instance.graph = Graph(static_cast<NodeId>(nodes), std::move(arcs));
  instance.commodities.reserve(static_cast<std::size_t>(commodity_count));
  for (long long k = 0; k < commodity_count; ++k) {
    if (!reader.next(line)) reader.fail("missing commodity line");
    Commodity c;
    c.origin = read_value<NodeId>(line, reader, "origin");
    c.destination = read_value<NodeId>(line, reader, "destination");
    c.demand = read_value<double>(line, reader, "demand");
    expect_end(line, reader);
    instance.commodities.push_back(c);
  }

  if (reader.next(line)) {
    expect_keyword(line, reader, "witness");
    expect_end(line, reader);
    std::vector<Path> witness;
    witness.reserve(static_cast<std::size_t>(commodity_count));
    for (long long k = 0; k < commodity_count; ++k) {
      if (!reader.next(line)) reader.fail("missing witness path");
      Path p;
      ArcId e;
      while (line >> e) p.push_back(e);
      if (!line.eof()) reader.fail("malformed witness path");
      witness.push_back(std::move(p));
    }
    instance.witness = std::move(witness);
    if (reader.next(line)) reader.fail("trailing content after witness block");
  }
  return instance;
}

void write_instance(std::ostream& out, const Instance& instance) {
  const Graph& g = instance.graph;
  out << "nodes " << g.node_count() << " arcs " << g.arc_count() << " commodities "
      << instance.commodities.size() << '\n';
  for (const Arc& a : g.arcs()) {
    out << a.tail << ' ' << a.head << ' ' << format_number(a.capacity) << '\n';
  }
  for (const Commodity& c : instance.commodities) {
    out << c.origin << ' ' << c.destination << ' ' << format_number(c.demand) << '\n';
  }
  if (instance.witness) {
    out << "witness\n";
    for (const Path& p : *instance.witness) {
      for (std::size_t i = 0; i < p.size(); ++i) out << (i ? " " : "") << p[i];
      out << '\n';
    }
  }
}

Instance load_instance(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open " + file.string());
  try {
    return read_instance(in);
  } catch (const Error& e) {
    throw Error(file.string() + ": " + e.what());
  }
}

void save_instance(const std::filesystem::path& file, const Instance& instance) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  write_instance(out, instance);
}

void write_solution(std::ostream& out, const PathAssignment& assignment,
                    const Metrics& metrics, double total_demand) {
  for (const Path& p : assignment.paths) {
    for (std::size_t i = 0; i < p.size(); ++i) out << (i ? " " : "") << p[i];
    out << '\n';
  }
  out << "overflow_sum " << format_number(metrics.overflow_sum) << '\n';
  out << "congestion " << format_number(metrics.congestion) << '\n';
  out << "total_demand " << format_number(total_demand) << '\n';
}

PathAssignment read_solution(std::istream& in, CommodityId commodity_count) {
  PathAssignment a;
  std::string text;
  int number = 0;
  while (static_cast<CommodityId>(a.paths.size()) < commodity_count && std::getline(in, text)) {
    ++number;
    std::istringstream line(text);
    Path p;
    ArcId e;
    while (line >> e) p.push_back(e);
    if (!line.eof()) throw Error("solution line " + std::to_string(number) + ": malformed path");
    a.paths.push_back(std::move(p));
  }
  if (static_cast<CommodityId>(a.paths.size()) != commodity_count) {
    throw Error("solution: expected " + std::to_string(commodity_count) + " paths, found " +
                std::to_string(a.paths.size()));
  }
  return a;
}

}  // namespace uflow
