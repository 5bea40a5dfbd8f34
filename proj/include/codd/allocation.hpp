#pragma once

#include <codd/planner.hpp>

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

namespace codd {

/// V(coalition) with the plan that achieves it. `exact` is false when the
/// solve ran out of budget and `value` is only an incumbent.
struct CharacteristicEntry
{
	double value = 0;
	bool exact = true;
	double lower_bound = 0;
	DeliveryPlan plan;
};

/// Memoized characteristic function. Insert-only; safe for concurrent
/// insertion of distinct coalitions.
class CharacteristicCache
{
public:
	CharacteristicCache() = default;

	CharacteristicCache(CharacteristicCache&& other) noexcept
	{
		std::unique_lock lock(other.mutex_);
		entries_ = std::move(other.entries_);
	}

	CharacteristicCache& operator=(CharacteristicCache&&) = delete;

	std::optional<CharacteristicEntry> find(Coalition c) const
	{
		std::shared_lock lock(mutex_);
		auto it = entries_.find(c);
		if (it == entries_.end())
		{
			return std::nullopt;
		}
		return it->second;
	}

	bool contains(Coalition c) const
	{
		std::shared_lock lock(mutex_);
		return entries_.contains(c);
	}

	/// Keeps the first value stored for a coalition; returns whether `e` was stored.
	bool insert(Coalition c, CharacteristicEntry e)
	{
		std::unique_lock lock(mutex_);
		return entries_.emplace(c, std::move(e)).second;
	}

	std::size_t size() const
	{
		std::shared_lock lock(mutex_);
		return entries_.size();
	}

private:
	mutable std::shared_mutex mutex_;
	std::map<Coalition, CharacteristicEntry> entries_;
};

struct CharacteristicValue
{
	double value = 0;
	bool exact = true;
};

/// V(coalition), solving and caching on a miss. V(empty) = 0.
inline CharacteristicValue characteristic_value(const Instance& inst, Coalition coalition,
												CharacteristicCache& cache, const SolverConfig& config = {})
{
	if (coalition.empty())
	{
		return {0, true};
	}
	if (auto hit = cache.find(coalition))
	{
		return {hit->value, hit->exact};
	}
	auto plan = solve(build_pool(inst, coalition), config);
	CharacteristicEntry e;
	e.value = plan.cost.total;
	e.exact = plan.status == SolveStatus::optimal;
	e.lower_bound = plan.lower_bound;
	e.plan = std::move(plan);
	CharacteristicValue out{e.value, e.exact};
	cache.insert(coalition, std::move(e));
	return out;
}

/// Non-empty subsets of `coalition`, by increasing size then mask.
inline std::vector<Coalition> subsets_by_size(Coalition coalition)
{
	std::vector<Coalition> out;
	const auto full = coalition.bits();
	for (std::uint64_t s = full; s != 0; s = (s - 1) & full)
	{
		out.emplace_back(s);
	}
	std::sort(out.begin(), out.end(), [](Coalition a, Coalition b) {
		return a.size() != b.size() ? a.size() < b.size() : a.bits() < b.bits();
	});
	return out;
}

/// Fill the cache with V(S) for every non-empty S within `coalition`,
/// smallest subsets first, on up to `threads` workers.
inline void evaluate_subsets(const Instance& inst, Coalition coalition, CharacteristicCache& cache,
							 const SolverConfig& config = {}, unsigned threads = 1)
{
	const auto subsets = subsets_by_size(coalition);
	if (threads <= 1)
	{
		for (auto s : subsets)
		{
			characteristic_value(inst, s, cache, config);
		}
		return;
	}
	std::atomic<std::size_t> next{0};
	std::vector<std::exception_ptr> errors(threads);
	{
		std::vector<std::jthread> pool;
		for (unsigned t = 0; t < threads; ++t)
		{
			pool.emplace_back([&, t] {
				try
				{
					for (auto k = next++; k < subsets.size(); k = next++)
					{
						characteristic_value(inst, subsets[k], cache, config);
					}
				}
				catch (...)
				{
					errors[t] = std::current_exception();
				}
			});
		}
	}
	for (auto& e : errors)
	{
		if (e)
		{
			std::rethrow_exception(e);
		}
	}
}

struct Share
{
	std::string supplier;
	double amount = 0;  ///< may be negative: the supplier is paid by the pool

	friend bool operator==(const Share&, const Share&) = default;
};

/// How V(coalition) is split among its members (instance order).
struct Allocation
{
	std::vector<std::string> coalition;
	double value = 0;
	std::vector<Share> shares;

	double share_of(std::string_view supplier) const
	{
		for (const auto& s : shares)
		{
			if (s.supplier == supplier)
			{
				return s.amount;
			}
		}
		throw invalid_input("supplier '" + std::string(supplier) + "' not in allocation");
	}

	double total() const
	{
		double t = 0;
		for (const auto& s : shares)
		{
			t += s.amount;
		}
		return t;
	}

	friend bool operator==(const Allocation&, const Allocation&) = default;
};

namespace detail {

inline double cached_value(const CharacteristicCache& cache, Coalition s, bool allow_approximate,
						   const Instance& inst)
{
	if (s.empty())
	{
		return 0;
	}
	auto e = cache.find(s);
	if (!e)
	{
		throw incomplete_cache("no characteristic value for {" + s.label(inst) + "}");
	}
	if (!e->exact && !allow_approximate)
	{
		throw approximate_value("characteristic value for {" + s.label(inst) + "} is not proven optimal");
	}
	return e->value;
}

inline Allocation empty_allocation(const Instance& inst, Coalition coalition, const CharacteristicCache& cache,
								   bool allow_approximate)
{
	Allocation a;
	a.coalition = coalition.ids(inst);
	a.value = cached_value(cache, coalition, allow_approximate, inst);
	return a;
}

} // namespace detail

/// Shapley value in subset form:
/// v_i = sum over S within P\{i} of |S|! (|P|-|S|-1)! / |P|! * (V(S+i) - V(S)).
inline Allocation shapley(const Instance& inst, Coalition coalition, const CharacteristicCache& cache,
						  bool allow_approximate = false)
{
	if (coalition.empty())
	{
		throw invalid_input("Shapley value of an empty coalition");
	}
	auto a = detail::empty_allocation(inst, coalition, cache, allow_approximate);
	const auto n = coalition.size();
	std::vector<double> fact(n + 1, 1);
	for (std::size_t k = 1; k <= n; ++k)
	{
		fact[k] = fact[k - 1] * static_cast<double>(k);
	}
	for (auto i : coalition.members())
	{
		const auto others = coalition.without(i).bits();
		double v = 0;
		// Walk every subset of `others`, including the empty one.
		for (std::uint64_t s = others;; s = (s - 1) & others)
		{
			const Coalition sub(s);
			const auto k = sub.size();
			const double weight = fact[k] * fact[n - k - 1] / fact[n];
			v += weight
				* (detail::cached_value(cache, sub.with(i), allow_approximate, inst)
				   - detail::cached_value(cache, sub, allow_approximate, inst));
			if (s == 0)
			{
				break;
			}
		}
		a.shares.push_back({inst.suppliers()[i].id, v});
	}
	return a;
}

/// Shapley value as the average marginal cost over all |P|! join orders.
/// Exponentially slower than `shapley`; an independent cross-check.
inline Allocation shapley_bruteforce(const Instance& inst, Coalition coalition, const CharacteristicCache& cache,
									 bool allow_approximate = false)
{
	if (coalition.empty())
	{
		throw invalid_input("Shapley value of an empty coalition");
	}
	auto a = detail::empty_allocation(inst, coalition, cache, allow_approximate);
	auto order = coalition.members();
	std::map<std::size_t, double> sum;
	double perms = 0;
	do
	{
		Coalition joined;
		for (auto p : order)
		{
			const double before = detail::cached_value(cache, joined, allow_approximate, inst);
			joined = joined.with(p);
			sum[p] += detail::cached_value(cache, joined, allow_approximate, inst) - before;
		}
		perms += 1;
	} while (std::next_permutation(order.begin(), order.end()));
	for (auto p : coalition.members())
	{
		a.shares.push_back({inst.suppliers()[p].id, sum[p] / perms});
	}
	return a;
}

} // namespace codd
