#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cobra/formula.hpp"

namespace cobra {

enum class InstanceKind { AllTuples, DistinctTuples };

// Maps every parameter to a variable: image[a] = f(a).
struct Attribute {
  std::string name;
  std::vector<VarId> image;
};

struct OutcomeTemplate {
  std::string label;  // display name, may be empty
  Formula formula;    // over X and atoms f($j)
};

struct ParameterizedExperiment {
  std::string name;
  std::uint32_t arity = 0;
  InstanceKind kind = InstanceKind::AllTuples;
  std::vector<OutcomeTemplate> outcomes;

  // Filled in by DeductiveGame: attributes used at each position (F_i) and the
  // compatibility relation F_i ∩ F_j ≠ ∅.
  std::vector<std::vector<std::uint32_t>> positionAttributes;
  std::vector<std::vector<char>> compatible;

  std::string outcomeName(std::size_t i) const;
};

struct ExperimentInstance {
  std::uint32_t experiment = 0;
  std::vector<std::uint32_t> params;

  // The experiment order: experiment index, then parameters lexicographically.
  friend auto operator<=>(const ExperimentInstance&, const ExperimentInstance&) = default;
  friend bool operator==(const ExperimentInstance&, const ExperimentInstance&) = default;
};

struct ExperimentInstanceHash {
  std::size_t operator()(const ExperimentInstance& e) const {
    std::size_t h = e.experiment * 0x9e3779b97f4a7c15ULL;
    for (auto p : e.params) h = (h ^ p) * 0x100000001b3ULL;
    return h;
  }
};

struct EvaluatedExperiment {
  ExperimentInstance instance;
  std::uint32_t outcome = 0;
  friend bool operator==(const EvaluatedExperiment&, const EvaluatedExperiment&) = default;
};

// G = (X, φ0, Σ, F, T). Immutable once constructed; the constructor validates the
// definition and throws DefinitionError.
class DeductiveGame {
 public:
  DeductiveGame(Vocabulary variables, Formula initial, std::vector<std::string> params,
                std::vector<Attribute> attributes, std::vector<ParameterizedExperiment> experiments);

  const Vocabulary& variables() const { return variables_; }
  std::size_t varCount() const { return variables_.size(); }
  const Formula& initial() const { return initial_; }
  const std::vector<std::string>& params() const { return params_; }
  const std::vector<Attribute>& attributes() const { return attributes_; }
  const std::vector<std::string>& attributeNames() const { return attributeNames_; }
  const std::vector<ParameterizedExperiment>& experiments() const { return experiments_; }
  const ParameterizedExperiment& experiment(std::uint32_t t) const { return experiments_.at(t); }

  std::optional<std::uint32_t> findParam(std::string_view name) const;
  std::optional<std::uint32_t> findAttribute(std::string_view name) const;
  std::optional<std::uint32_t> findExperiment(std::string_view name) const;
  VarId image(std::uint32_t attribute, std::uint32_t param) const { return attributes_[attribute].image[param]; }
  // (attribute, param) with f(a) = x, if x lies in some attribute image.
  std::optional<std::pair<std::uint32_t, std::uint32_t>> owner(VarId x) const;
  // Variables occurring outside atoms in some outcome template.
  const std::vector<char>& rawInOutcomes() const { return rawInOutcomes_; }
  std::size_t maxOutcomes() const;

 private:
  Vocabulary variables_;
  Formula initial_;
  std::vector<std::string> params_;
  std::vector<Attribute> attributes_;
  std::vector<std::string> attributeNames_;
  std::vector<ParameterizedExperiment> experiments_;
  std::vector<std::optional<std::pair<std::uint32_t, std::uint32_t>>> owners_;
  std::vector<char> rawInOutcomes_;
};

bool isInstance(const DeductiveGame& g, const ExperimentInstance& e);
// Whether prefix extends to some tuple of the experiment's instance set.
bool isFeasiblePrefix(const DeductiveGame& g, std::uint32_t t, std::span<const std::uint32_t> prefix);
// All instances of t in the experiment order. Intended for small games.
std::vector<ExperimentInstance> allInstances(const DeductiveGame& g, std::uint32_t t);
std::vector<ExperimentInstance> allInstances(const DeductiveGame& g);

Formula instantiateOutcome(const DeductiveGame& g, const Formula& tmpl, std::span<const std::uint32_t> params);
Formula instantiateOutcome(const DeductiveGame& g, const ExperimentInstance& e, std::uint32_t outcome);
std::vector<Formula> outcomes(const DeductiveGame& g, const ExperimentInstance& e);

// Outcome template value under v without building the instance.
bool outcomeHolds(const DeductiveGame& g, const ExperimentInstance& e, std::uint32_t outcome, const Valuation& v);

struct WellFormedReport {
  bool ok = true;
  std::optional<ExperimentInstance> experiment;
  std::optional<Valuation> witness;
  std::vector<std::uint32_t> trueOutcomes;  // outcomes the witness satisfies
};

// For each representative: UNSAT(φ0 ∧ ¬exactly_1(ξ1..ξn)).
WellFormedReport checkWellFormed(const DeductiveGame& g, std::span<const ExperimentInstance> reps);

// Throws IllFormedGameError unless exactly one outcome holds.
EvaluatedExperiment evaluateExperiment(const DeductiveGame& g, const ExperimentInstance& e, const Valuation& v);

struct FaithfulReport {
  bool faithful = true;
  std::string reason;  // first violated condition
};

FaithfulReport isFaithful(const DeductiveGame& g, std::uint32_t t);

std::string describe(const DeductiveGame& g, const ExperimentInstance& e);
// Inverse of describe: "name(p1, p2)" or "name" for arity 0.
ExperimentInstance parseInstance(const DeductiveGame& g, std::string_view text);
std::string describeOutcome(const DeductiveGame& g, const EvaluatedExperiment& ev);

}  // namespace cobra
