#pragma once

// Measured F_r-processes answering exact entropy queries H(P^W) for finite
// coordinate windows W.

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "flab/algebraic_shift.hpp"
#include "flab/entropy_value.hpp"
#include "flab/finite_group.hpp"
#include "flab/free_group.hpp"
#include "flab/partition.hpp"

namespace flab {

class FiniteProcess {
 public:
  virtual ~FiniteProcess() = default;

  virtual int rank() const = 0;
  virtual std::string name() const = 0;

  /// H(P^W), memoized per window.
  EntropyValue entropy(const WordSet& w) const { return memo(plain_, w, false); }

  /// H(P^W | base), for processes carrying an invariant base algebra.
  EntropyValue conditional_entropy(const WordSet& w) const {
    if (!has_base()) throw Error(name() + " has no base algebra to condition on");
    return memo(conditional_, w, true);
  }

  EntropyValue entropy(const WordSet& w, bool relative) const {
    return relative ? conditional_entropy(w) : entropy(w);
  }

  virtual bool has_base() const { return false; }

  /// Every answered window was exact, not merely window-stabilized.
  virtual bool exact_marginals() const { return true; }

  /// Per-site entropy when coordinates are i.i.d.
  virtual std::optional<EntropyValue> site_entropy() const { return std::nullopt; }

  /// Rate of the Z-system generated by s_i on P^W, when the space is finite.
  virtual std::optional<FiniteRate> finite_rate(int, const WordSet&, bool) const { return std::nullopt; }

 protected:
  virtual EntropyValue compute_entropy(const WordSet& w) const = 0;
  virtual EntropyValue compute_conditional(const WordSet&) const {
    throw Error(name() + " has no base algebra to condition on");
  }

 private:
  EntropyValue memo(std::map<WordSet, EntropyValue>& cache, const WordSet& w, bool conditional) const {
    if (w.rank() != rank()) throw RankMismatch(rank(), w.rank());
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (auto it = cache.find(w); it != cache.end()) return it->second;
    }
    EntropyValue v = conditional ? compute_conditional(w) : compute_entropy(w);
    std::lock_guard<std::mutex> lock(mu_);
    return cache.emplace(w, std::move(v)).first->second;
  }

  mutable std::mutex mu_;
  mutable std::map<WordSet, EntropyValue> plain_, conditional_;
};

/// i.i.d. coordinates with a given law on a finite alphabet.
class BernoulliProcess : public FiniteProcess {
 public:
  BernoulliProcess(int rank, std::size_t k, std::string label = {})
      : BernoulliProcess(rank, FiniteMeasure::uniform(k), label.empty() ? "Z/" + std::to_string(k) : label) {}
  BernoulliProcess(int rank, MeasurePtr law, std::string label)
      : rank_(rank), law_(std::move(law)), label_(std::move(label)), site_(shannon_entropy(FinitePartition::points(law_))) {}

  int rank() const override { return rank_; }
  std::string name() const override { return "Bernoulli(" + label_ + ")"; }
  std::optional<EntropyValue> site_entropy() const override { return site_; }

 protected:
  EntropyValue compute_entropy(const WordSet& w) const override {
    return site_ * static_cast<long long>(w.size());
  }

 private:
  int rank_;
  MeasurePtr law_;
  std::string label_;
  EntropyValue site_;
};

/// A finite measure-preserving action with an observable partition P and an
/// optional invariant partition C to condition on.
class FiniteActionProcess : public FiniteProcess {
 public:
  FiniteActionProcess(FinitePermAction action, FinitePartition p, std::string label,
                      std::optional<FinitePartition> base = std::nullopt)
      : action_(std::move(action)), p_(std::move(p)), label_(std::move(label)), base_(std::move(base)) {
    if (p_.space_size() != action_.size()) throw Error("partition does not live on the action's space");
    if (base_) {
      if (base_->space_size() != action_.size()) throw Error("base partition does not live on the action's space");
      for (int i = 1; i <= action_.rank(); ++i) {
        if (!(action_.translate(*base_, FreeWord::generator(action_.rank(), i)) == *base_)) {
          throw Error("base partition is not invariant");
        }
      }
    }
  }

  int rank() const override { return action_.rank(); }
  std::string name() const override { return label_; }
  bool has_base() const override { return base_.has_value(); }
  const FinitePermAction& action() const { return action_; }
  const FinitePartition& partition() const { return p_; }

  FinitePartition window_partition(const WordSet& w) const { return action_.window_join(p_, w); }

  std::optional<FiniteRate> finite_rate(int i, const WordSet& w, bool conditional) const override {
    FinitePartition q = window_partition(w);
    if (conditional) q = join(q, *base_);
    return z_entropy_rate_finite(action_.generator(i), q);
  }

 protected:
  EntropyValue compute_entropy(const WordSet& w) const override { return shannon_entropy(window_partition(w)); }
  EntropyValue compute_conditional(const WordSet& w) const override {
    return flab::conditional_entropy(window_partition(w), *base_);
  }

 private:
  FinitePermAction action_;
  FinitePartition p_;
  std::string label_;
  std::optional<FinitePartition> base_;
};

/// Haar measure on X_{h,p} with the coordinate-at-identity partition.
class KernelProcess : public FiniteProcess {
 public:
  explicit KernelProcess(std::shared_ptr<const KernelSubshift> x, std::string label = {})
      : x_(std::move(x)), label_(label.empty() ? "X[" + x_->kernel().to_string() + "]" : std::move(label)) {}

  int rank() const override { return x_->kernel().rank(); }
  std::string name() const override { return label_; }
  bool exact_marginals() const override { return proven_.load(); }
  const KernelSubshift& subshift() const { return *x_; }

 protected:
  EntropyValue compute_entropy(const WordSet& w) const override {
    const auto m = x_->marginal(w);
    if (!m.certified()) {
      throw Uncertified("marginal on " + w.to_string() + " is uncertified (dimension between " +
                        std::to_string(m.lower) + " and " + std::to_string(m.upper) + ")");
    }
    if (!m.proven()) proven_ = false;
    return EntropyValue::log_of(x_->kernel().modulus()) * static_cast<long long>(m.dimension());
  }

 private:
  std::shared_ptr<const KernelSubshift> x_;
  std::string label_;
  mutable std::atomic<bool> proven_{true};
};

}  // namespace flab
