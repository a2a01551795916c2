#include "cobra/satcore.hpp"

#include <algorithm>
#include <cstdlib>

#include "cobra/cnf.hpp"
#include "cobra/sat_solver.hpp"

namespace cobra {

std::uint64_t defaultModelCap() {
  if (const char* env = std::getenv("COBRA_MODEL_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::uint64_t{1} << 20;
}

namespace {

struct Prepared {
  Cnf cnf;
  std::vector<VarId> occurring;
};

Prepared prepare(const Formula& f, std::size_t varCount) {
  for (VarId v : variablesOf(f))
    if (v >= varCount) throw DomainError("formula mentions variable " + std::to_string(v) + " outside X");
  if (containsAtoms(f)) throw DomainError("formula still contains parameter atoms");
  return Prepared{toCnf(f, varCount), variablesOf(f)};
}

Valuation extract(const SatSolver& s, std::size_t varCount) {
  Valuation v(varCount);
  for (std::size_t i = 0; i < varCount; ++i) v.set(static_cast<VarId>(i), s.modelValue(static_cast<int>(i) + 1));
  return v;
}

// Enumerates the models projected onto the occurring variables; other variables are false.
template <class Fn>
void enumerateProjected(const Prepared& p, std::size_t varCount, std::uint64_t cap, const Fn& fn) {
  SatSolver s(p.cnf);
  std::uint64_t n = 0;
  while (s.solve()) {
    if (++n > cap) throw ModelCapExceeded("more than " + std::to_string(cap) + " models");
    Valuation v = extract(s, varCount);
    std::vector<Lit> block;
    for (VarId x : p.occurring) {
      const bool val = v[x];
      block.push_back(val ? -static_cast<Lit>(x + 1) : static_cast<Lit>(x + 1));
    }
    for (VarId x = 0; x < varCount; ++x)
      if (!std::binary_search(p.occurring.begin(), p.occurring.end(), x)) v.set(x, false);
    fn(v);
    if (block.empty() || !s.addClause(block)) break;
  }
}

}  // namespace

bool ReferenceSatBackend::isSatisfiable(const Formula& f, std::size_t varCount) {
  SatSolver s(prepare(f, varCount).cnf);
  return s.solve();
}

std::optional<Valuation> ReferenceSatBackend::findModel(const Formula& f, std::size_t varCount) {
  SatSolver s(prepare(f, varCount).cnf);
  if (!s.solve()) return std::nullopt;
  return extract(s, varCount);
}

std::vector<Valuation> ReferenceSatBackend::enumerateModels(const Formula& f, std::size_t varCount,
                                                            std::uint64_t cap) {
  const Prepared p = prepare(f, varCount);
  std::vector<VarId> freeVars;
  for (VarId x = 0; x < varCount; ++x)
    if (!std::binary_search(p.occurring.begin(), p.occurring.end(), x)) freeVars.push_back(x);
  if (freeVars.size() >= 63) throw ModelCapExceeded("too many unconstrained variables");
  const std::uint64_t copies = std::uint64_t{1} << freeVars.size();
  std::vector<Valuation> out;
  enumerateProjected(p, varCount, cap, [&](const Valuation& base) {
    if (out.size() + copies > cap) throw ModelCapExceeded("more than " + std::to_string(cap) + " models");
    for (std::uint64_t mask = 0; mask < copies; ++mask) {
      Valuation v = base;
      for (std::size_t i = 0; i < freeVars.size(); ++i) v.set(freeVars[i], (mask >> i) & 1u);
      out.push_back(std::move(v));
    }
  });
  return out;
}

std::uint64_t ReferenceSatBackend::countModels(const Formula& f, std::size_t varCount, std::uint64_t cap) {
  const Prepared p = prepare(f, varCount);
  const std::size_t freeCount = varCount - p.occurring.size();
  if (freeCount >= 63) throw ModelCapExceeded("too many unconstrained variables");
  std::uint64_t projected = 0;
  enumerateProjected(p, varCount, cap, [&](const Valuation&) { ++projected; });
  const std::uint64_t total = projected << freeCount;
  if (total > cap) throw ModelCapExceeded("more than " + std::to_string(cap) + " models");
  return total;
}

FixedSet ReferenceSatBackend::fixedVariables(const Formula& f, std::size_t varCount) {
  const Prepared p = prepare(f, varCount);
  SatSolver s(p.cnf);
  FixedSet out;
  if (!s.solve()) {
    for (VarId x = 0; x < varCount; ++x) out.emplace(x, false);
    return out;
  }
  const Valuation model = extract(s, varCount);
  for (VarId x : p.occurring) {
    const Lit flipped = model[x] ? -static_cast<Lit>(x + 1) : static_cast<Lit>(x + 1);
    const Lit assumption[] = {flipped};
    if (!s.solve(assumption)) out.emplace(x, model[x]);
  }
  return out;
}

SatBackend& referenceBackend() {
  static ReferenceSatBackend backend;
  return backend;
}

bool isSatisfiable(const Formula& f, std::size_t varCount) { return referenceBackend().isSatisfiable(f, varCount); }

std::optional<Valuation> findModel(const Formula& f, std::size_t varCount) {
  return referenceBackend().findModel(f, varCount);
}

std::uint64_t countModels(const Formula& f, std::size_t varCount, std::uint64_t cap) {
  return referenceBackend().countModels(f, varCount, cap);
}

FixedSet fixedVariables(const Formula& f, std::size_t varCount) {
  return referenceBackend().fixedVariables(f, varCount);
}

Formula removeFixed(const Formula& f, const FixedSet& fixed) {
  if (fixed.empty()) return canonicalize(f);
  return canonicalize(substitute(f, [&](VarId v) -> std::optional<bool> {
    auto it = fixed.find(v);
    if (it == fixed.end()) return std::nullopt;
    return it->second;
  }));
}

Reduced removeFixed(const Formula& f, std::size_t varCount) {
  FixedSet fixed = fixedVariables(f, varCount);
  Formula residue = removeFixed(f, fixed);
  return Reduced{std::move(residue), std::move(fixed)};
}

bool equivalent(const Formula& a, const Formula& b, std::size_t varCount) {
  // a xor b unsatisfiable
  return !isSatisfiable(Formula::exactly(1, {a, b}), varCount);
}

// ------------------------------------------------------------------ ModelSet

ModelSet::ModelSet(std::size_t size, bool full) : size_(size), words_((size + 63) / 64, 0) {
  if (full) {
    for (auto& w : words_) w = ~std::uint64_t{0};
    if (size % 64) words_.back() = (std::uint64_t{1} << (size % 64)) - 1;
  }
}

std::size_t ModelSet::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
  return n;
}

bool ModelSet::empty() const {
  for (auto w : words_)
    if (w) return false;
  return true;
}

std::size_t ModelSet::first() const {
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i]) return i * 64 + static_cast<std::size_t>(__builtin_ctzll(words_[i]));
  return size_;
}

std::vector<std::uint32_t> ModelSet::indices() const {
  std::vector<std::uint32_t> out;
  forEach([&](std::size_t i) { out.push_back(static_cast<std::uint32_t>(i)); });
  return out;
}

ModelSet& ModelSet::operator&=(const ModelSet& o) {
  if (o.size_ != size_) throw DomainError("model sets over different spaces");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

ModelSet& ModelSet::operator|=(const ModelSet& o) {
  if (o.size_ != size_) throw DomainError("model sets over different spaces");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

ModelSet ModelSet::complement() const {
  ModelSet out(size_, true);
  for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] &= ~words_[i];
  return out;
}

ModelSet ModelSet::permuted(std::span<const std::uint32_t> perm) const {
  ModelSet out(size_);
  forEach([&](std::size_t i) { out.set(perm[i]); });
  return out;
}

std::size_t ModelSet::intersectionCount(const ModelSet& o) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) n += static_cast<std::size_t>(__builtin_popcountll(words_[i] & o.words_[i]));
  return n;
}

std::size_t ModelSet::hash() const {
  std::size_t h = size_;
  for (auto w : words_) h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

// ---------------------------------------------------------------- ModelSpace

namespace {

std::string packKey(const Valuation& v) { return std::string(v.bits().begin(), v.bits().end()); }

}  // namespace

ModelSpace::ModelSpace(const Formula& constraint, std::size_t varCount, std::uint64_t cap) : varCount_(varCount) {
  models_ = referenceBackend().enumerateModels(constraint, varCount, cap);
  std::sort(models_.begin(), models_.end());
  for (std::size_t i = 0; i < models_.size(); ++i) index_.emplace(packKey(models_[i]), i);
  trueSets_.assign(varCount, ModelSet(models_.size()));
  for (std::size_t i = 0; i < models_.size(); ++i)
    for (VarId x = 0; x < varCount; ++x)
      if (models_[i][x]) trueSets_[x].set(i);
}

ModelSet ModelSpace::evaluateAll(const Formula& f,
                                 const std::function<VarId(std::uint32_t, std::uint32_t)>& atomVar) const {
  switch (f.op()) {
    case Op::Const:
      return ModelSet(models_.size(), f.value());
    case Op::Var:
      if (f.var() >= varCount_) throw DomainError("formula mentions an unknown variable");
      return trueSets_[f.var()];
    case Op::Atom:
      if (!atomVar) throw DomainError("cannot evaluate a parameter atom");
      return trueSets_.at(atomVar(f.attribute(), f.position()));
    case Op::Not:
      return evaluateAll(f.children()[0], atomVar).complement();
    case Op::And: {
      ModelSet out = all();
      for (const auto& c : f.children()) out &= evaluateAll(c, atomVar);
      return out;
    }
    case Op::Or: {
      ModelSet out(models_.size());
      for (const auto& c : f.children()) out |= evaluateAll(c, atomVar);
      return out;
    }
    case Op::Exactly: {
      // cnt[j]: models with exactly j true children so far, j == k + 1 saturating
      const std::size_t k = f.k();
      std::vector<ModelSet> cnt(k + 2, ModelSet(models_.size()));
      cnt[0] = all();
      for (const auto& c : f.children()) {
        const ModelSet v = evaluateAll(c, atomVar);
        const ModelSet nv = v.complement();
        cnt[k + 1] |= cnt[k] & v;
        for (std::size_t j = k; j >= 1; --j) cnt[j] = (cnt[j] & nv) | (cnt[j - 1] & v);
        cnt[0] &= nv;
      }
      return cnt[k];
    }
  }
  return ModelSet(models_.size());
}

std::optional<std::vector<std::uint32_t>> ModelSpace::modelPermutation(std::span<const VarId> varPerm) const {
  std::vector<std::uint32_t> out(models_.size());
  Valuation image(varCount_);
  for (std::size_t i = 0; i < models_.size(); ++i) {
    for (VarId x = 0; x < varCount_; ++x) image.set(varPerm[x], models_[i][x]);
    const auto j = indexOf(image);
    if (!j) return std::nullopt;
    out[i] = static_cast<std::uint32_t>(*j);
  }
  return out;
}

std::optional<std::size_t> ModelSpace::indexOf(const Valuation& v) const {
  if (v.size() != varCount_) return std::nullopt;
  auto it = index_.find(packKey(v));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ModelSet ModelSpace::select(const Formula& f) const { return select(f, all()); }

ModelSet ModelSpace::select(const Formula& f, const ModelSet& within) const {
  ModelSet out(models_.size());
  within.forEach([&](std::size_t i) {
    if (evaluate(f, models_[i])) out.set(i);
  });
  return out;
}

FixedSet ModelSpace::fixed(const ModelSet& s) const {
  FixedSet out;
  const std::size_t first = s.first();
  if (first >= s.size()) {
    for (VarId x = 0; x < varCount_; ++x) out.emplace(x, false);
    return out;
  }
  const Valuation& ref = models_[first];
  std::vector<char> same(varCount_, 1);
  s.forEach([&](std::size_t i) {
    const auto& bits = models_[i].bits();
    for (std::size_t x = 0; x < varCount_; ++x)
      if (bits[x] != ref.bits()[x]) same[x] = 0;
  });
  for (VarId x = 0; x < varCount_; ++x)
    if (same[x]) out.emplace(x, ref[x]);
  return out;
}

std::size_t ModelSpace::fixedCount(const ModelSet& s) const {
  if (s.empty()) return varCount_;
  const std::size_t n = s.count();
  std::size_t out = 0;
  for (VarId x = 0; x < varCount_; ++x) {
    const std::size_t t = s.intersectionCount(trueSets_[x]);
    if (t == 0 || t == n) ++out;
  }
  return out;
}

}  // namespace cobra
