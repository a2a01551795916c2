#include "cobra/graph.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "cobra/errors.hpp"

namespace cobra {

std::uint32_t LabeledGraph::addVertex(const std::string& label) {
  auto [it, fresh] = labelIds_.emplace(label, static_cast<std::uint32_t>(labelNames_.size()));
  if (fresh) labelNames_.push_back(label);
  labels_.push_back(it->second);
  adj_.emplace_back();
  return static_cast<std::uint32_t>(labels_.size() - 1);
}

void LabeledGraph::addEdge(std::uint32_t u, std::uint32_t v) {
  if (u >= size() || v >= size()) throw DomainError("edge endpoint out of range");
  if (u == v) throw DomainError("loops are not allowed");
  adj_[u].push_back(v);
  adj_[v].push_back(u);
  sorted_ = false;
}

void LabeledGraph::normalize() const {
  if (sorted_) return;
  for (auto& a : adj_) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  sorted_ = true;
}

std::size_t LabeledGraph::edgeCount() const {
  normalize();
  std::size_t m = 0;
  for (const auto& a : adj_) m += a.size();
  return m / 2;
}

std::span<const std::uint32_t> LabeledGraph::neighbors(std::uint32_t v) const {
  normalize();
  return adj_[v];
}

bool LabeledGraph::hasEdge(std::uint32_t u, std::uint32_t v) const {
  normalize();
  return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
}

bool LabeledGraph::isAutomorphism(std::span<const std::uint32_t> perm) const {
  const std::size_t n = size();
  if (perm.size() != n) return false;
  std::vector<char> hit(n, 0);
  for (auto p : perm) {
    if (p >= n || hit[p]) return false;
    hit[p] = 1;
  }
  for (std::uint32_t v = 0; v < n; ++v) {
    if (labels_[v] != labels_[perm[v]]) return false;
    if (neighbors(v).size() != neighbors(perm[v]).size()) return false;
    for (auto u : neighbors(v))
      if (!hasEdge(perm[v], perm[u])) return false;
  }
  return true;
}

LabeledGraph LabeledGraph::relabeled(std::span<const std::uint32_t> perm) const {
  const std::size_t n = size();
  std::vector<std::uint32_t> inverse(n);
  for (std::uint32_t v = 0; v < n; ++v) inverse[perm[v]] = v;
  LabeledGraph out;
  for (std::uint32_t w = 0; w < n; ++w) out.addVertex(label(inverse[w]));
  for (std::uint32_t v = 0; v < n; ++v)
    for (auto u : neighbors(v))
      if (v < u) out.addEdge(perm[v], perm[u]);
  return out;
}

std::string LabeledGraph::toDot(const std::string& name) const {
  std::ostringstream os;
  os << "graph " << name << " {\n";
  for (std::uint32_t v = 0; v < size(); ++v) {
    std::string l = label(v);
    std::string escaped;
    for (char c : l) {
      if (c == '"' || c == '\\') escaped += '\\';
      escaped += c;
    }
    os << "  v" << v << " [label=\"" << escaped << "\"];\n";
  }
  for (std::uint32_t v = 0; v < size(); ++v)
    for (auto u : neighbors(v))
      if (v < u) os << "  v" << v << " -- v" << u << ";\n";
  os << "}\n";
  return os.str();
}

// ------------------------------------------------------------ canonical form

namespace {

constexpr int kNoJump = std::numeric_limits<int>::max();

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h * 0xff51afd7ed558ccdULL;
}

// Ordered partition of the vertex set. Cells are ranges of lab identified by
// their start position.
struct Partition {
  std::vector<std::uint32_t> lab;
  std::vector<std::uint32_t> pos;
  std::vector<std::uint32_t> cellOf;  // position -> cell start
  std::vector<std::uint32_t> cellEnd;  // cell start -> end
  std::size_t cells = 0;

  bool discrete() const { return cells == lab.size(); }
};

class Canonizer {
 public:
  explicit Canonizer(const LabeledGraph& g) : g_(g), n_(static_cast<std::uint32_t>(g.size())), cnt_(n_, 0) {
    adj_.resize(n_);
    for (std::uint32_t v = 0; v < n_; ++v) {
      auto nb = g.neighbors(v);
      adj_[v].assign(nb.begin(), nb.end());
    }
  }

  CanonicalForm run() {
    Partition p = initial();
    std::vector<std::uint32_t> queue;
    for (std::uint32_t c = 0; c < n_; c = p.cellEnd[c]) queue.push_back(c);
    std::vector<std::uint64_t> trace{refine(p, queue)};
    std::vector<std::uint32_t> prefix;
    if (n_ > 0) search(p, 0, trace, prefix);

    CanonicalForm out;
    out.position.resize(n_);
    for (std::uint32_t i = 0; i < n_; ++i) out.position[bestLab_[i]] = i;
    out.generators = std::move(generators_);
    out.leaves = leaves_;
    out.key = encode(out.position);
    return out;
  }

 private:
  Partition initial() const {
    Partition p;
    p.lab.resize(n_);
    std::iota(p.lab.begin(), p.lab.end(), 0u);
    std::stable_sort(p.lab.begin(), p.lab.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return g_.label(a) < g_.label(b); });
    p.pos.resize(n_);
    p.cellOf.resize(n_);
    p.cellEnd.assign(n_, 0);
    std::uint32_t start = 0;
    for (std::uint32_t i = 0; i < n_; ++i) {
      p.pos[p.lab[i]] = i;
      if (i > 0 && g_.label(p.lab[i]) != g_.label(p.lab[i - 1])) {
        p.cellEnd[start] = i;
        start = i;
        ++p.cells;
      }
      p.cellOf[i] = start;
    }
    if (n_ > 0) {
      p.cellEnd[start] = n_;
      ++p.cells;
    }
    return p;
  }

  // Equitable refinement; returns an invariant hash of the splitting history.
  std::uint64_t refine(Partition& p, std::vector<std::uint32_t> queue) {
    std::vector<char> inQueue(n_, 0);
    for (auto c : queue) inQueue[c] = 1;
    std::uint64_t h = 0x12345;
    std::size_t head = 0;
    std::vector<std::uint32_t> touched;
    std::vector<std::uint32_t> touchedCells;
    std::vector<std::uint32_t> splitter;
    while (head < queue.size()) {
      const std::uint32_t w = queue[head++];
      inQueue[w] = 0;
      splitter.assign(p.lab.begin() + w, p.lab.begin() + p.cellEnd[w]);
      for (auto x : splitter)
        for (auto y : adj_[x]) {
          if (cnt_[y]++ == 0) touched.push_back(y);
        }
      for (auto y : touched) touchedCells.push_back(p.cellOf[p.pos[y]]);
      std::sort(touchedCells.begin(), touchedCells.end());
      touchedCells.erase(std::unique(touchedCells.begin(), touchedCells.end()), touchedCells.end());
      for (auto c : touchedCells) {
        const std::uint32_t e = p.cellEnd[c];
        if (e - c == 1) {
          h = mix(h, c * 31u + cnt_[p.lab[c]]);
          continue;
        }
        std::sort(p.lab.begin() + c, p.lab.begin() + e,
                  [&](std::uint32_t a, std::uint32_t b) { return cnt_[a] < cnt_[b]; });
        if (cnt_[p.lab[c]] == cnt_[p.lab[e - 1]]) {
          for (auto i = c; i < e; ++i) p.pos[p.lab[i]] = i;
          h = mix(h, (std::uint64_t{c} << 32) ^ cnt_[p.lab[c]]);
          continue;
        }
        // split into fragments of equal count
        std::vector<std::uint32_t> starts;
        for (auto i = c; i < e; ++i) {
          p.pos[p.lab[i]] = i;
          if (i == c || cnt_[p.lab[i]] != cnt_[p.lab[i - 1]]) starts.push_back(i);
        }
        starts.push_back(e);
        std::uint32_t largest = 0;
        for (std::size_t f = 0; f + 1 < starts.size(); ++f) {
          const auto s = starts[f];
          const auto t = starts[f + 1];
          p.cellEnd[s] = t;
          for (auto i = s; i < t; ++i) p.cellOf[i] = s;
          h = mix(h, (std::uint64_t{s} << 40) ^ (std::uint64_t{t - s} << 20) ^ cnt_[p.lab[s]]);
          if (t - s > starts[largest + 1] - starts[largest]) largest = static_cast<std::uint32_t>(f);
        }
        p.cells += starts.size() - 2;
        const bool wasQueued = inQueue[c];
        for (std::size_t f = 0; f + 1 < starts.size(); ++f) {
          const auto s = starts[f];
          if (wasQueued ? (s == c) : (f == largest)) continue;
          if (!inQueue[s]) {
            inQueue[s] = 1;
            queue.push_back(s);
          }
        }
      }
      for (auto y : touched) cnt_[y] = 0;
      touched.clear();
      touchedCells.clear();
    }
    return mix(h, p.cells);
  }

  std::vector<std::uint64_t> certificate(const Partition& p) const {
    std::vector<std::uint64_t> cert;
    for (std::uint32_t v = 0; v < n_; ++v)
      for (auto u : adj_[v])
        if (v < u) {
          std::uint64_t a = p.pos[v];
          std::uint64_t b = p.pos[u];
          if (a > b) std::swap(a, b);
          cert.push_back((a << 32) | b);
        }
    std::sort(cert.begin(), cert.end());
    return cert;
  }

  static int compareTrace(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
      if (i >= b.size()) return 0;
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
  }

  static int commonPrefix(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    std::size_t i = 0;
    while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
    return static_cast<int>(i);
  }

  void addGenerator(const std::vector<std::uint32_t>& from, const std::vector<std::uint32_t>& to) {
    std::vector<std::uint32_t> gamma(n_);
    bool identity = true;
    for (std::uint32_t i = 0; i < n_; ++i) {
      gamma[from[i]] = to[i];
      if (from[i] != to[i]) identity = false;
    }
    if (!identity) generators_.push_back(std::move(gamma));
  }

  int leaf(const Partition& p, const std::vector<std::uint64_t>& trace, const std::vector<std::uint32_t>& prefix) {
    ++leaves_;
    auto cert = certificate(p);
    if (!haveFirst_) {
      haveFirst_ = true;
      firstLab_ = bestLab_ = p.lab;
      firstCert_ = bestCert_ = std::move(cert);
      firstTrace_ = bestTrace_ = trace;
      firstPrefix_ = bestPrefix_ = prefix;
      return kNoJump;
    }
    if (trace == firstTrace_ && cert == firstCert_) {
      addGenerator(p.lab, firstLab_);
      return commonPrefix(prefix, firstPrefix_);
    }
    int c = compareTrace(trace, bestTrace_, std::max(trace.size(), bestTrace_.size()));
    if (c == 0 && trace.size() != bestTrace_.size()) c = trace.size() < bestTrace_.size() ? -1 : 1;
    if (c == 0) c = cert < bestCert_ ? -1 : (cert == bestCert_ ? 0 : 1);
    if (c == 0) {
      addGenerator(p.lab, bestLab_);
      return commonPrefix(prefix, bestPrefix_);
    }
    if (c < 0) {
      bestLab_ = p.lab;
      bestCert_ = std::move(cert);
      bestTrace_ = trace;
      bestPrefix_ = prefix;
    }
    return kNoJump;
  }

  // Orbits of the group generated by the generators that fix prefix pointwise.
  std::vector<std::uint32_t> orbits(const std::vector<std::uint32_t>& prefix) const {
    std::vector<std::uint32_t> parent(n_);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& gamma : generators_) {
      bool fixes = true;
      for (auto v : prefix)
        if (gamma[v] != v) fixes = false;
      if (!fixes) continue;
      for (std::uint32_t v = 0; v < n_; ++v) {
        const auto a = find(v);
        const auto b = find(gamma[v]);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
    for (std::uint32_t v = 0; v < n_; ++v) parent[v] = find(v);
    return parent;
  }

  int search(const Partition& p, int level, std::vector<std::uint64_t>& trace, std::vector<std::uint32_t>& prefix) {
    if (haveFirst_ && compareTrace(trace, bestTrace_, trace.size()) > 0 &&
        compareTrace(trace, firstTrace_, trace.size()) != 0)
      return kNoJump;
    if (p.discrete()) return leaf(p, trace, prefix);

    std::uint32_t cell = 0;
    while (p.cellEnd[cell] - cell == 1) cell = p.cellEnd[cell];
    const std::uint32_t end = p.cellEnd[cell];
    std::vector<std::uint32_t> candidates(p.lab.begin() + cell, p.lab.begin() + end);
    std::sort(candidates.begin(), candidates.end());

    std::vector<std::uint32_t> done;
    std::size_t orbitGens = std::numeric_limits<std::size_t>::max();
    std::vector<std::uint32_t> orbit;
    for (auto v : candidates) {
      if (!done.empty()) {
        if (orbitGens != generators_.size()) {
          orbit = orbits(prefix);
          orbitGens = generators_.size();
        }
        bool seen = false;
        for (auto d : done)
          if (orbit[d] == orbit[v]) seen = true;
        if (seen) continue;
      }
      Partition child = p;
      // individualize v at the front of its cell
      const std::uint32_t at = child.pos[v];
      std::swap(child.lab[at], child.lab[cell]);
      child.pos[child.lab[at]] = at;
      child.pos[v] = cell;
      child.cellEnd[cell] = cell + 1;
      child.cellEnd[cell + 1] = end;
      for (auto i = cell + 1; i < end; ++i) child.cellOf[i] = cell + 1;
      ++child.cells;
      const std::uint64_t h = refine(child, {cell});
      trace.push_back(mix(h, cell));
      prefix.push_back(v);
      const int jump = search(child, level + 1, trace, prefix);
      trace.pop_back();
      prefix.pop_back();
      done.push_back(v);
      if (jump < level) return jump;
    }
    return kNoJump;
  }

  std::string encode(const std::vector<std::uint32_t>& position) const {
    std::vector<std::uint32_t> byPos(n_);
    for (std::uint32_t v = 0; v < n_; ++v) byPos[position[v]] = v;
    std::string key;
    auto putNum = [&](std::uint64_t x) {
      do {
        std::uint8_t byte = x & 0x7f;
        x >>= 7;
        if (x) byte |= 0x80;
        key.push_back(static_cast<char>(byte));
      } while (x);
    };
    putNum(n_);
    // labels as run lengths over positions
    for (std::uint32_t i = 0; i < n_;) {
      std::uint32_t j = i;
      while (j < n_ && g_.label(byPos[j]) == g_.label(byPos[i])) ++j;
      putNum(j - i);
      putNum(g_.label(byPos[i]).size());
      key += g_.label(byPos[i]);
      i = j;
    }
    std::vector<std::uint64_t> cert;
    for (std::uint32_t v = 0; v < n_; ++v)
      for (auto u : adj_[v])
        if (v < u) {
          std::uint64_t a = position[v];
          std::uint64_t b = position[u];
          if (a > b) std::swap(a, b);
          cert.push_back((a << 32) | b);
        }
    std::sort(cert.begin(), cert.end());
    putNum(cert.size());
    std::uint64_t prev = 0;
    for (auto c : cert) {
      putNum(c - prev);  // delta encoding of the sorted edge codes
      prev = c;
    }
    return key;
  }

  const LabeledGraph& g_;
  std::uint32_t n_;
  std::vector<std::vector<std::uint32_t>> adj_;
  std::vector<std::uint32_t> cnt_;

  bool haveFirst_ = false;
  std::vector<std::uint32_t> firstLab_, bestLab_;
  std::vector<std::uint64_t> firstCert_, bestCert_;
  std::vector<std::uint64_t> firstTrace_, bestTrace_;
  std::vector<std::uint32_t> firstPrefix_, bestPrefix_;
  std::vector<std::vector<std::uint32_t>> generators_;
  std::size_t leaves_ = 0;
};

}  // namespace

CanonicalForm canonicalForm(const LabeledGraph& g) { return Canonizer(g).run(); }

std::string canonicalKey(const LabeledGraph& g) { return canonicalForm(g).key; }

}  // namespace cobra
