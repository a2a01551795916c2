#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace cobra {

// Undirected vertex-labeled graph without parallel edges or loops.
class LabeledGraph {
 public:
  std::uint32_t addVertex(const std::string& label);
  void addEdge(std::uint32_t u, std::uint32_t v);  // duplicates are ignored

  std::size_t size() const { return labels_.size(); }
  std::size_t edgeCount() const;
  const std::string& label(std::uint32_t v) const { return labelNames_[labels_[v]]; }
  std::span<const std::uint32_t> neighbors(std::uint32_t v) const;
  bool hasEdge(std::uint32_t u, std::uint32_t v) const;

  // Label-preserving bijection test.
  bool isAutomorphism(std::span<const std::uint32_t> perm) const;
  // Copy with vertex v renamed to perm[v].
  LabeledGraph relabeled(std::span<const std::uint32_t> perm) const;

  std::string toDot(const std::string& name = "G") const;

 private:
  void normalize() const;

  std::vector<std::uint32_t> labels_;
  std::vector<std::string> labelNames_;
  std::unordered_map<std::string, std::uint32_t> labelIds_;
  mutable std::vector<std::vector<std::uint32_t>> adj_;
  mutable bool sorted_ = true;
};

struct CanonicalForm {
  std::string key;                      // equal iff isomorphic
  std::vector<std::uint32_t> position;  // vertex -> canonical position
  std::vector<std::vector<std::uint32_t>> generators;  // automorphisms found on the way
  std::size_t leaves = 0;
};

// Exact canonical form by partition refinement with individualization.
CanonicalForm canonicalForm(const LabeledGraph& g);
std::string canonicalKey(const LabeledGraph& g);

}  // namespace cobra
