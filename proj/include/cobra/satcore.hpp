#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "cobra/formula.hpp"

namespace cobra {

// Variables whose value is the same in every model, with that value.
using FixedSet = std::map<VarId, bool>;

std::uint64_t defaultModelCap();  // 2^20 unless COBRA_MODEL_CAP is set

struct Reduced {
  Formula residue;
  FixedSet fixed;
};

// Decision procedures over formulas on a vocabulary of varCount variables.
class SatBackend {
 public:
  virtual ~SatBackend() = default;
  virtual bool isSatisfiable(const Formula& f, std::size_t varCount) = 0;
  virtual std::optional<Valuation> findModel(const Formula& f, std::size_t varCount) = 0;
  // Models projected onto all varCount variables, in discovery order.
  virtual std::vector<Valuation> enumerateModels(const Formula& f, std::size_t varCount, std::uint64_t cap) = 0;
  virtual std::uint64_t countModels(const Formula& f, std::size_t varCount, std::uint64_t cap) = 0;
  // All variables count as fixed when f is unsatisfiable.
  virtual FixedSet fixedVariables(const Formula& f, std::size_t varCount) = 0;
};

// CNF + CDCL with blocking clauses for enumeration.
class ReferenceSatBackend final : public SatBackend {
 public:
  bool isSatisfiable(const Formula& f, std::size_t varCount) override;
  std::optional<Valuation> findModel(const Formula& f, std::size_t varCount) override;
  std::vector<Valuation> enumerateModels(const Formula& f, std::size_t varCount, std::uint64_t cap) override;
  std::uint64_t countModels(const Formula& f, std::size_t varCount, std::uint64_t cap) override;
  FixedSet fixedVariables(const Formula& f, std::size_t varCount) override;
};

SatBackend& referenceBackend();

bool isSatisfiable(const Formula& f, std::size_t varCount);
std::optional<Valuation> findModel(const Formula& f, std::size_t varCount);
std::uint64_t countModels(const Formula& f, std::size_t varCount, std::uint64_t cap = defaultModelCap());
FixedSet fixedVariables(const Formula& f, std::size_t varCount);
// Substitutes the variables fixed in f and folds constants.
Reduced removeFixed(const Formula& f, std::size_t varCount);
// Substitutes the given fixed values and folds constants.
Formula removeFixed(const Formula& f, const FixedSet& fixed);
bool equivalent(const Formula& a, const Formula& b, std::size_t varCount);

// Dense bitset over the models of a ModelSpace.
class ModelSet {
 public:
  ModelSet() = default;
  explicit ModelSet(std::size_t size, bool full = false);

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  std::size_t count() const;
  bool empty() const;
  std::size_t first() const;  // size() when empty
  template <class Fn>
  void forEach(const Fn& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = __builtin_ctzll(bits);
        fn(w * 64 + static_cast<std::size_t>(b));
        bits &= bits - 1;
      }
    }
  }
  std::vector<std::uint32_t> indices() const;
  ModelSet& operator&=(const ModelSet& o);
  ModelSet& operator|=(const ModelSet& o);
  friend ModelSet operator&(ModelSet a, const ModelSet& b) { return a &= b; }
  friend ModelSet operator|(ModelSet a, const ModelSet& b) { return a |= b; }
  ModelSet complement() const;
  // Image under a permutation of indices: result.test(perm[i]) == test(i).
  ModelSet permuted(std::span<const std::uint32_t> perm) const;
  std::size_t intersectionCount(const ModelSet& o) const;
  friend bool operator==(const ModelSet&, const ModelSet&) = default;
  std::size_t hash() const;
  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct ModelSetHash {
  std::size_t operator()(const ModelSet& s) const { return s.hash(); }
};

// The models of an initial constraint, enumerated once. Every formula that implies
// the constraint is then represented exactly by the subset of models it keeps.
class ModelSpace {
 public:
  ModelSpace(const Formula& constraint, std::size_t varCount, std::uint64_t cap = defaultModelCap());

  std::size_t size() const { return models_.size(); }
  std::size_t varCount() const { return varCount_; }
  const Valuation& model(std::size_t i) const { return models_[i]; }
  const std::vector<Valuation>& models() const { return models_; }
  std::optional<std::size_t> indexOf(const Valuation& v) const;
  ModelSet all() const { return ModelSet(models_.size(), true); }
  ModelSet select(const Formula& f) const;
  ModelSet select(const Formula& f, const ModelSet& within) const;
  // Bit-parallel evaluation over all models. Atoms are resolved to variables by
  // atomVar(attribute, position); without it they are a DomainError.
  ModelSet evaluateAll(const Formula& f,
                       const std::function<VarId(std::uint32_t, std::uint32_t)>& atomVar = nullptr) const;
  const ModelSet& trueSet(VarId x) const { return trueSets_.at(x); }
  // Index permutation induced by a variable permutation that preserves the space;
  // nullopt when some model leaves it.
  std::optional<std::vector<std::uint32_t>> modelPermutation(std::span<const VarId> varPerm) const;
  FixedSet fixed(const ModelSet& s) const;
  std::size_t fixedCount(const ModelSet& s) const;

 private:
  std::size_t varCount_;
  std::vector<Valuation> models_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<ModelSet> trueSets_;
};

}  // namespace cobra
