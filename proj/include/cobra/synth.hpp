#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cobra/symmetry.hpp"

namespace cobra {

// Nonnegative fraction in lowest terms.
class Rational {
 public:
  Rational(std::uint64_t num = 0, std::uint64_t den = 1);

  std::uint64_t num() const { return num_; }
  std::uint64_t den() const { return den_; }
  double toDouble() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string toString() const;  // "713/256", or "3" for integers
  // Rounded half-up to the given number of decimals.
  std::string toDecimal(int digits = 5) const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::uint64_t num_;
  std::uint64_t den_;
};

enum class RankingKind { MaxModels, ExpModels, EntModels, Parts, MinFixed, ExpFixed };

std::string toString(RankingKind k);
std::optional<RankingKind> parseRankingKind(std::string_view s);
const std::vector<RankingKind>& allRankingKinds();

// Updates[φ,e]: φ ∧ ξ for every outcome ξ of e, canonicalized, unsatisfiable ones kept.
std::vector<Formula> updates(const DeductiveGame& g, const Formula& phi, const ExperimentInstance& e);

struct UpdateStats {
  std::uint64_t models = 0;
  std::size_t fixed = 0;  // every variable counts as fixed in an unsatisfiable update
};

// Smaller is better. Throws UndefinedRankError when a model-weighted ranking
// sees no models at all.
double rank(RankingKind kind, std::span<const UpdateStats> stats);
double rank(RankingKind kind, std::span<const Formula> updates, std::size_t varCount);
std::vector<UpdateStats> updateStats(GameContext& ctx, const Knowledge& k, const ExperimentInstance& e,
                                     bool withFixed = true);

struct TreeNode {
  bool leaf = false;
  ExperimentInstance experiment;                                  // internal nodes
  std::vector<std::pair<std::uint32_t, std::uint32_t>> children;  // (outcome, node), by outcome
  Valuation valuation;                                            // leaves
};

class DecisionTree {
 public:
  std::uint32_t addLeaf(Valuation v);
  std::uint32_t addInternal(ExperimentInstance e);
  void addChild(std::uint32_t parent, std::uint32_t outcome, std::uint32_t child);

  std::uint32_t root() const { return 0; }
  std::size_t size() const { return nodes_.size(); }
  const TreeNode& node(std::uint32_t i) const { return nodes_.at(i); }
  std::optional<std::uint32_t> child(std::uint32_t node, std::uint32_t outcome) const;

  std::string toDot(const DeductiveGame& g) const;
  // [{node_id, kind, experiment?, params?, children{outcome -> id}, valuation?}]
  std::string toJson(const DeductiveGame& g) const;

 private:
  std::vector<TreeNode> nodes_;
};

struct ComplexityReport {
  std::uint32_t worst = 0;
  Rational avg;
};

// Throws MalformedTreeError unless the leaves partition the codes along their paths.
ComplexityReport evalComplexity(const DeductiveGame& g, const DecisionTree& tree);
ComplexityReport evalComplexity(const ModelSpace& space, const DeductiveGame& g, const DecisionTree& tree);

// The play against a secret code; throws MalformedTreeError if the tree has no
// branch for a realized outcome or ends at a different code.
std::vector<EvaluatedExperiment> simulatePlay(const DeductiveGame& g, const DecisionTree& tree,
                                              const Valuation& secret);

// Average candidate counts over the tree nodes expanded in one round.
struct RoundStats {
  std::size_t nodes = 0;
  double phase1Avg = 0;
  double phase2Avg = 0;
};

struct RankingResult {
  DecisionTree tree;
  std::vector<RoundStats> rounds;  // rounds[i] is round i + 1
  std::size_t uninformative = 0;   // chosen experiments that did not shrink the knowledge
};

// Throws NonTerminatingStrategy when a branch needs more than maxDepth experiments.
RankingResult buildRankingTree(GameContext& ctx, RankingKind kind, std::size_t maxDepth = 64);

enum class OptimalMode { Worst, Average };

std::string toString(OptimalMode m);

struct OptimalResult {
  bool solved = false;  // false: no strategy beats the bound
  std::optional<ExperimentInstance> experiment;
  std::optional<Valuation> leaf;
  Rational cost;  // experiments still needed, worst case or on average over codes
};

// Branch and bound over representative experiments with a cache that is shared
// between symmetric knowledge.
class OptimalSolver {
 public:
  OptimalSolver(GameContext& ctx, OptimalMode mode);

  // Bounds are exclusive: with upper set, only costs below it are reported.
  OptimalResult optimal(const Knowledge& k, std::optional<Rational> upper = std::nullopt);
  // Throws DomainError when the game cannot be solved.
  DecisionTree buildTree();

  std::size_t visited() const { return visited_; }
  std::size_t cacheHits() const { return hits_; }
  std::size_t cacheSize() const { return exact_.size() + symmetric_.size(); }

 private:
  static constexpr std::uint64_t kInfinite = ~std::uint64_t{0};

  struct Entry {
    std::uint64_t value = 0;  // exact cost, or a lower bound when !exact
    bool exact = false;
    std::optional<ExperimentInstance> choice;
  };

  std::uint64_t solve(const Knowledge& k, std::uint64_t upper, bool useCache);
  std::uint64_t lowerBound(std::uint64_t n) const;
  std::optional<std::uint64_t> lookup(const Entry* e, std::uint64_t upper) const;
  static void remember(Entry& slot, const Entry& e);
  std::uint32_t expand(DecisionTree& tree, const Knowledge& k);

  GameContext& ctx_;
  OptimalMode mode_;
  std::uint64_t out_;
  std::unordered_map<ModelSet, Entry, ModelSetHash> exact_;
  std::unordered_map<std::string, Entry> symmetric_;
  std::size_t visited_ = 0;
  std::size_t hits_ = 0;
};

DecisionTree buildOptimalTree(GameContext& ctx, OptimalMode mode);

}  // namespace cobra
