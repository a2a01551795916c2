#include "cobra/sat_solver.hpp"

#include <algorithm>
#include <cstdlib>

namespace cobra {

namespace {

constexpr int kNoReason = -1;

double luby(double y, int x) {
  int size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

SatSolver::SatSolver(const Cnf& cnf) {
  for (int v = 0; v < cnf.variables; ++v) newVariable();
  for (const auto& c : cnf.clauses)
    if (!addClause(c)) break;
}

int SatSolver::newVariable() {
  const auto v = static_cast<std::uint32_t>(assigns_.size());
  ensureVariable(v);
  return static_cast<int>(v) + 1;
}

void SatSolver::ensureVariable(std::uint32_t v) {
  while (assigns_.size() <= v) {
    const auto x = static_cast<std::uint32_t>(assigns_.size());
    assigns_.push_back(kUndef);
    phase_.push_back(kFalse);
    levels_.push_back(0);
    reasons_.push_back(kNoReason);
    activity_.push_back(0.0);
    seen_.push_back(0);
    heapIndex_.push_back(-1);
    watches_.emplace_back();
    watches_.emplace_back();
    heapInsert(x);
  }
}

void SatSolver::attach(int ci) {
  const auto& c = clauses_[ci].lits;
  watches_[neg(c[0])].push_back(ci);
  watches_[neg(c[1])].push_back(ci);
}

bool SatSolver::addClause(std::span<const Lit> clause) {
  if (!ok_) return false;
  backtrack(0);
  std::vector<L> lits;
  for (Lit d : clause) {
    if (d == 0) throw DomainError("literal 0 in clause");
    ensureVariable(static_cast<std::uint32_t>(std::abs(d) - 1));
    lits.push_back(fromDimacs(d));
  }
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<L> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == neg(lits[i])) return true;  // tautology
    const auto v = value(lits[i]);
    if (v == kTrue) return true;
    if (v == kUndef) kept.push_back(lits[i]);
  }
  if (kept.empty()) return ok_ = false;
  if (kept.size() == 1) {
    assign(kept[0], kNoReason);
    if (propagate() != -1) ok_ = false;
    return ok_;
  }
  clauses_.push_back(Clause{std::move(kept), false});
  attach(static_cast<int>(clauses_.size()) - 1);
  return true;
}

void SatSolver::assign(L l, int reason) {
  const auto v = varOf(l);
  assigns_[v] = (l & 1u) ? kFalse : kTrue;
  levels_[v] = level();
  reasons_[v] = reason;
  trail_.push_back(l);
}

int SatSolver::propagate() {
  while (qhead_ < trail_.size()) {
    const L p = trail_[qhead_++];
    const L falseLit = neg(p);
    auto& ws = watches_[p];
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ws.size()) {
      const int ci = ws[i++];
      auto& c = clauses_[ci].lits;
      if (c[0] == falseLit) std::swap(c[0], c[1]);
      if (value(c[0]) == kTrue) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (value(c[k]) != kFalse) {
          std::swap(c[1], c[k]);
          watches_[neg(c[1])].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ci;
      if (value(c[0]) == kFalse) {
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        qhead_ = trail_.size();
        return ci;
      }
      assign(c[0], ci);
    }
    ws.resize(j);
  }
  return -1;
}

void SatSolver::analyze(int conflict, std::vector<L>& learnt, int& backLevel) {
  learnt.clear();
  learnt.push_back(0);
  int pathCount = 0;
  bool haveP = false;
  L p = 0;
  std::size_t idx = trail_.size();
  int ci = conflict;
  do {
    const auto& c = clauses_[ci].lits;
    for (std::size_t k = haveP ? 1 : 0; k < c.size(); ++k) {
      const L q = c[k];
      const auto v = varOf(q);
      if (seen_[v] || levels_[v] == 0) continue;
      seen_[v] = 1;
      bump(v);
      if (levels_[v] >= level())
        ++pathCount;
      else
        learnt.push_back(q);
    }
    do {
      --idx;
    } while (!seen_[varOf(trail_[idx])]);
    p = trail_[idx];
    haveP = true;
    ci = reasons_[varOf(p)];
    seen_[varOf(p)] = 0;
    --pathCount;
  } while (pathCount > 0);
  learnt[0] = neg(p);

  backLevel = 0;
  std::size_t maxAt = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k) {
    seen_[varOf(learnt[k])] = 0;
    if (levels_[varOf(learnt[k])] > backLevel) {
      backLevel = levels_[varOf(learnt[k])];
      maxAt = k;
    }
  }
  if (learnt.size() > 1) std::swap(learnt[1], learnt[maxAt]);
}

void SatSolver::backtrack(int target) {
  if (level() <= target) return;
  for (std::size_t i = trail_.size(); i-- > static_cast<std::size_t>(trailLim_[target]);) {
    const auto v = varOf(trail_[i]);
    phase_[v] = assigns_[v];
    assigns_[v] = kUndef;
    reasons_[v] = kNoReason;
    if (heapIndex_[v] < 0) heapInsert(v);
  }
  trail_.resize(trailLim_[target]);
  trailLim_.resize(target);
  qhead_ = trail_.size();
}

void SatSolver::bump(std::uint32_t v) {
  activity_[v] += bumpAmount_;
  if (activity_[v] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    bumpAmount_ *= 1e-100;
  }
  if (heapIndex_[v] >= 0) heapUp(static_cast<std::size_t>(heapIndex_[v]));
}

void SatSolver::heapInsert(std::uint32_t v) {
  heapIndex_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heapUp(heap_.size() - 1);
}

void SatSolver::heapUp(std::size_t i) {
  const auto v = heap_[i];
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (activity_[heap_[parent]] >= activity_[v]) break;
    heap_[i] = heap_[parent];
    heapIndex_[heap_[i]] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heapIndex_[v] = static_cast<int>(i);
}

void SatSolver::heapDown(std::size_t i) {
  const auto v = heap_[i];
  const std::size_t n = heap_.size();
  while (true) {
    std::size_t child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n && activity_[heap_[child + 1]] > activity_[heap_[child]]) ++child;
    if (activity_[heap_[child]] <= activity_[v]) break;
    heap_[i] = heap_[child];
    heapIndex_[heap_[i]] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heapIndex_[v] = static_cast<int>(i);
}

std::uint32_t SatSolver::heapPop() {
  const auto top = heap_.front();
  heapIndex_[top] = -1;
  const auto last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heapIndex_[last] = 0;
    heapDown(0);
  }
  return top;
}

SatSolver::L SatSolver::pickBranch() {
  while (!heap_.empty()) {
    const auto v = heapPop();
    if (assigns_[v] == kUndef) return 2u * v + (phase_[v] == kTrue ? 0u : 1u);
  }
  return ~0u;
}

bool SatSolver::solve(std::span<const Lit> assumptions) {
  if (!ok_) return false;
  backtrack(0);
  if (propagate() != -1) return ok_ = false;

  std::vector<L> assume;
  for (Lit d : assumptions) {
    ensureVariable(static_cast<std::uint32_t>(std::abs(d) - 1));
    assume.push_back(fromDimacs(d));
  }

  std::vector<L> learnt;
  int restart = 0;
  std::uint64_t budget = static_cast<std::uint64_t>(luby(2, restart) * 100);
  std::uint64_t sinceRestart = 0;
  while (true) {
    const int conflict = propagate();
    if (conflict != -1) {
      ++conflicts_;
      ++sinceRestart;
      if (level() == 0) return ok_ = false;
      int backLevel = 0;
      analyze(conflict, learnt, backLevel);
      backtrack(backLevel);
      if (learnt.size() == 1) {
        assign(learnt[0], kNoReason);
      } else {
        clauses_.push_back(Clause{learnt, true});
        const int ci = static_cast<int>(clauses_.size()) - 1;
        attach(ci);
        assign(learnt[0], ci);
      }
      bumpAmount_ *= 1.0 / 0.95;
      continue;
    }
    if (sinceRestart >= budget) {
      backtrack(0);
      sinceRestart = 0;
      budget = static_cast<std::uint64_t>(luby(2, ++restart) * 100);
      continue;
    }
    L next = ~0u;
    while (static_cast<std::size_t>(level()) < assume.size()) {
      const L a = assume[level()];
      const auto v = value(a);
      if (v == kTrue) {
        trailLim_.push_back(static_cast<int>(trail_.size()));
      } else if (v == kFalse) {
        backtrack(0);
        return false;
      } else {
        next = a;
        break;
      }
    }
    if (next == ~0u) {
      next = pickBranch();
      if (next == ~0u) {
        model_.assign(assigns_.begin(), assigns_.end());
        backtrack(0);
        return true;
      }
    }
    trailLim_.push_back(static_cast<int>(trail_.size()));
    assign(next, kNoReason);
  }
}

}  // namespace cobra
