#include "numkit/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace numkit {

namespace {

void fail(const std::string& path, const std::string& why) {
  throw std::runtime_error("checkpoint '" + path + "': " + why);
}

void write_values(std::ostream& os, const std::vector<double>& v) {
  char buf[48];
  for (size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    os << buf << (i + 1 == v.size() ? '\n' : ' ');
  }
  if (v.empty()) os << '\n';
}

}  // namespace

void checkpoint_save(const Mlp& net, const std::string& path) {
  std::ofstream os(path);
  if (!os) fail(path, "cannot open for writing");
  os << "matchrl-net 1\n";
  os << "sizes " << net.layer_sizes.size();
  for (int s : net.layer_sizes) os << ' ' << s;
  os << '\n';
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", net.dropout);
  os << "dropout " << buf << '\n';
  os << "heads " << net.heads.size();
  for (const Head& h : net.heads) os << ' ' << h.name << ' ' << h.size;
  os << '\n';
  for (int l = 0; l < net.num_layers(); ++l) {
    os << "layer " << l << '\n';
    write_values(os, net.weights[l]);
    write_values(os, net.biases[l]);
  }
  if (!os) fail(path, "write failed");
}

Mlp checkpoint_load(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(path, "cannot open");
  std::string tag;
  int version = 0;
  if (!(is >> tag >> version) || tag != "matchrl-net" || version != 1)
    fail(path, "bad header");
  size_t n_sizes = 0;
  if (!(is >> tag >> n_sizes) || tag != "sizes" || n_sizes < 2)
    fail(path, "bad sizes line");
  std::vector<int> sizes(n_sizes);
  for (int& s : sizes)
    if (!(is >> s) || s <= 0) fail(path, "bad layer size");
  double dropout = 0.0;
  if (!(is >> tag >> dropout) || tag != "dropout" || dropout < 0.0 || dropout >= 1.0)
    fail(path, "bad dropout line");
  size_t n_heads = 0;
  if (!(is >> tag >> n_heads) || tag != "heads") fail(path, "bad heads line");
  std::vector<std::pair<std::string, int>> head_spec(n_heads);
  for (auto& [name, size] : head_spec)
    if (!(is >> name >> size) || size <= 0) fail(path, "bad head entry");

  Rng dummy(0);
  Mlp net = mlp_init(sizes, head_spec, dropout, dummy);
  for (int l = 0; l < net.num_layers(); ++l) {
    int idx = -1;
    if (!(is >> tag >> idx) || tag != "layer" || idx != l)
      fail(path, "bad layer marker");
    for (double& w : net.weights[l])
      if (!(is >> w)) fail(path, "truncated weights");
    for (double& b : net.biases[l])
      if (!(is >> b)) fail(path, "truncated biases");
  }
  double extra;
  if (is >> extra) fail(path, "trailing data");
  return net;
}

}  // namespace numkit
