#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cobra/game.hpp"
#include "cobra/graph.hpp"
#include "cobra/satcore.hpp"

namespace cobra {

// How experiment and knowledge graphs are built.
//   Syntactic: syntax trees of the reduced knowledge and outcome formulae.
//   Semantic:  one vertex per remaining code, joined to its true variables.
//   None:      no reduction at all; every feasible instance is kept.
enum class SymmetryMode { None, Syntactic, Semantic };

std::string toString(SymmetryMode m);
std::optional<SymmetryMode> parseSymmetryMode(std::string_view s);

// Interchangeable parameters and attributes, found by checking that every
// transposition lifts to a game symmetry, and the base graph built from them.
struct SymmetryModel {
  std::vector<std::uint32_t> paramClass;
  std::vector<std::uint32_t> attrClass;
  // positionBlock[t][i]: least position interchangeable with i in every outcome set
  std::vector<std::vector<std::uint32_t>> positionBlock;
  LabeledGraph base;  // vertices: X, then F, then Σ
  std::uint32_t attrVertex(std::uint32_t f) const { return static_cast<std::uint32_t>(varCount + f); }
  std::uint32_t paramVertex(std::uint32_t a) const { return static_cast<std::uint32_t>(varCount + attrCount + a); }
  std::size_t varCount = 0;
  std::size_t attrCount = 0;
};

// space may be null, in which case attribute symmetries are not searched.
SymmetryModel computeSymmetryModel(const DeductiveGame& g, const ModelSpace* space);

// The base graph with vertices X ∪ F: attribute-variable edges, same-parameter
// co-occurrence edges, and variables outside every outcome labeled "var".
LabeledGraph buildBaseGraph(const DeductiveGame& g);

// X-restriction of a label-preserving automorphism of a base graph whose first
// |X| vertices are the variables; nullopt when perm is not an automorphism.
std::optional<std::vector<VarId>> baseAutomorphismToSymmetry(const DeductiveGame& g, const LabeledGraph& base,
                                                            std::span<const std::uint32_t> perm);

// The variable permutation swapping f(a) and f(b) for every attribute f.
std::vector<VarId> paramSwap(const DeductiveGame& g, std::uint32_t a, std::uint32_t b);

// Accumulated knowledge: the codes still possible plus the history that led there.
struct Knowledge {
  ModelSet models;
  std::vector<EvaluatedExperiment> history;
};

// Game plus everything derived from it that the search reuses: the code space,
// symmetry model and per-instance outcome sets. Not thread-safe.
class GameContext {
 public:
  explicit GameContext(const DeductiveGame& g, SymmetryMode mode = SymmetryMode::Semantic,
                       std::uint64_t cap = defaultModelCap());

  const DeductiveGame& game() const { return game_; }
  const ModelSpace& space() const { return space_; }
  const SymmetryModel& symmetry() const { return symmetry_; }
  SymmetryMode mode() const { return mode_; }
  void setMode(SymmetryMode m) { mode_ = m; }

  Knowledge initialKnowledge() const;
  // Knowledge after observing outcome o of e; the model set may be empty.
  Knowledge update(const Knowledge& k, const ExperimentInstance& e, std::uint32_t outcome);
  // φ0 ∧ ξ1 ∧ … ∧ ξn in canonical form.
  Formula formula(const Knowledge& k) const;

  // Models of each outcome of e among all codes.
  const std::vector<ModelSet>& outcomeSets(const ExperimentInstance& e);
  // Code index permutation induced by paramSwap(a, b).
  const std::vector<std::uint32_t>& swapPermutation(std::uint32_t a, std::uint32_t b);
  std::size_t outcomeCacheSize() const { return outcomeCache_.size(); }

 private:
  const DeductiveGame& game_;
  ModelSpace space_;
  SymmetryModel symmetry_;
  SymmetryMode mode_;
  std::unordered_map<ExperimentInstance, std::vector<ModelSet>, ExperimentInstanceHash> outcomeCache_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::uint32_t>> swapCache_;
};

// B_{φ,e}: the base graph with the knowledge and outcomes of e attached.
LabeledGraph buildExperimentGraph(GameContext& ctx, const Knowledge& k, const ExperimentInstance& e);
// Base graph with only the knowledge attached; its key identifies knowledge up to symmetry.
LabeledGraph buildKnowledgeGraph(GameContext& ctx, const Knowledge& k);
// Syntactic graphs for an arbitrary formula φ (fixed variables found by SAT).
LabeledGraph buildExperimentGraph(const GameContext& ctx, const Formula& phi, const ExperimentInstance& e);

std::string knowledgeKey(GameContext& ctx, const Knowledge& k);

// One-sided: true implies e1 ∼φ e2.
bool areEquivalent(GameContext& ctx, const Knowledge& k, const ExperimentInstance& e1, const ExperimentInstance& e2);

// Whether tuples u·b·… can be skipped because u·a·… covers them.
bool isDominated(GameContext& ctx, const Knowledge& k, std::uint32_t t, std::span<const std::uint32_t> prefix,
                 std::uint32_t a, std::uint32_t b);

struct ExperimentsResult {
  std::vector<ExperimentInstance> phase1;
  std::vector<ExperimentInstance> representatives;  // ⪯-sorted
};

// S_φ: covers every experiment up to ∼φ. Uninformative instances are kept.
ExperimentsResult experimentsFor(GameContext& ctx, const Knowledge& k);

}  // namespace cobra
