#include "efgcl/harness/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "efgcl/errors.hpp"

namespace efgcl::harness {

namespace {

constexpr const char* kMagic = "efgcl-checkpoint";

void write_values(std::ostream& out, const Eigen::VectorXd& v) {
  char buf[32];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto r = std::to_chars(buf, buf + sizeof buf, v[i]);
    out << (i ? " " : "") << std::string_view(buf, r.ptr - buf);
  }
  out << '\n';
}

Eigen::VectorXd read_values(std::istream& in, long long n) {
  Eigen::VectorXd v(n);
  std::string token;
  for (long long i = 0; i < n; ++i) {
    if (!(in >> token)) throw ConfigError("checkpoint: truncated value list");
    const auto r = std::from_chars(token.data(), token.data() + token.size(), v[i]);
    if (r.ec != std::errc() || r.ptr != token.data() + token.size()) {
      throw ConfigError("checkpoint: malformed number '" + token + "'");
    }
  }
  return v;
}

}  // namespace

const rl::Mlp& Checkpoint::net(const std::string& name) const {
  const auto it = nets.find(name);
  if (it == nets.end()) throw ConfigError("checkpoint has no network '" + name + "'");
  return it->second;
}

const Eigen::VectorXd& Checkpoint::vector(const std::string& name) const {
  const auto it = vectors.find(name);
  if (it == vectors.end()) throw ConfigError("checkpoint has no vector '" + name + "'");
  return it->second;
}

const std::string& Checkpoint::get(const std::string& key) const {
  const auto it = meta.find(key);
  if (it == meta.end()) throw ConfigError("checkpoint has no field '" + key + "'");
  return it->second;
}

void write_checkpoint(std::ostream& out, const Checkpoint& c) {
  out << kMagic << ' ' << kCheckpointVersion << '\n';
  for (const auto& [k, v] : c.meta) {
    if (k.find_first_of(" \n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw ConfigError("checkpoint metadata must be single-line and keys space-free");
    }
    out << "meta " << k << ' ' << v << '\n';
  }
  for (const auto& [name, net] : c.nets) {
    out << "net " << name << ' ' << net.sizes().size();
    for (int s : net.sizes()) out << ' ' << s;
    out << '\n';
    write_values(out, net.flatten());
  }
  for (const auto& [name, v] : c.vectors) {
    out << "vector " << name << ' ' << v.size() << '\n';
    write_values(out, v);
  }
  out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) throw ConfigError("not a checkpoint file");
  if (version != kCheckpointVersion) {
    throw ConfigError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint c;
  std::string tag;
  while (in >> tag) {
    if (tag == "end") return c;
    std::string name;
    if (!(in >> name)) throw ConfigError("checkpoint: record without a name");
    if (tag == "meta") {
      std::string value;
      std::getline(in, value);
      c.meta[name] = value.empty() ? value : value.substr(1);
    } else if (tag == "net") {
      std::size_t layers = 0;
      if (!(in >> layers) || layers < 2 || layers > 64) throw ConfigError("checkpoint: bad layer count");
      std::vector<int> sizes(layers);
      for (auto& s : sizes) {
        if (!(in >> s) || s <= 0) throw ConfigError("checkpoint: bad layer size");
      }
      rl::Mlp net(sizes);
      net.assign(read_values(in, net.parameter_count()));
      c.nets.emplace(name, std::move(net));
    } else if (tag == "vector") {
      long long n = -1;
      if (!(in >> n) || n < 0) throw ConfigError("checkpoint: bad vector length");
      c.vectors[name] = read_values(in, n);
    } else {
      throw ConfigError("checkpoint: unknown record '" + tag + "'");
    }
  }
  throw ConfigError("checkpoint: missing end marker");
}

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write checkpoint " + path);
  write_checkpoint(f, c);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open checkpoint " + path);
  return read_checkpoint(f);
}

}  // namespace efgcl::harness
