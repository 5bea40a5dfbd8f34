#pragma once

#include <codd/plan.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <numeric>
#include <tuple>
#include <vector>

namespace codd {

/// One way to serve a customer: outsource it, or fly drone `drone` from
/// depot `from` to depot `to`. `transfer` is set when `from` is not the
/// owner's depot, i.e. the package first moves owner depot -> `from`.
struct Option
{
	enum class Kind
	{
		outsource,
		drone
	};

	Kind kind = Kind::outsource;
	std::size_t drone = 0;
	std::size_t from = 0;
	std::size_t to = 0;
	double length = 0;
	double duration = 0;
	double cost = 0;  ///< routing cost, or carrier price when outsourced
	bool transfer = false;

	bool outsourced() const noexcept { return kind == Kind::outsource; }
};

using OptionTable = std::vector<std::vector<Option>>;

/// Per customer: outsourcing first, then every (drone, from, to) that
/// passes capacity and per-trip range, in pool index order.
inline OptionTable enumerate_options(const PoolInstance& pool, bool transfers_enabled = true)
{
	OptionTable table(pool.customers.size());
	for (std::size_t i = 0; i < pool.customers.size(); ++i)
	{
		auto& opts = table[i];
		opts.push_back({Option::Kind::outsource, 0, 0, 0, 0, 0, pool.outsource_cost(i), false});
		for (std::size_t d = 0; d < pool.drones.size(); ++d)
		{
			for (const auto& pair : serving_area(pool, i, d))
			{
				const bool transfer = pair.from != pool.owner[i];
				if (transfer && !transfers_enabled)
				{
					continue;
				}
				opts.push_back({Option::Kind::drone, d, pair.from, pair.to, pair.length,
								pool.trip_duration(i, d, pair.from, pair.to),
								pool.trip_routing(i, pair.from, pair.to), transfer});
			}
		}
	}
	return table;
}

/// Build the plan implied by one option choice per customer, with the
/// smallest W, M, T and B sets consistent with it.
inline DeliveryPlan derive_plan(const PoolInstance& pool, const OptionTable& options,
								const std::vector<std::size_t>& choice)
{
	DeliveryPlan plan;
	plan.coalition = pool.depot_ids;

	std::vector<bool> used(pool.drones.size(), false);
	std::vector<bool> payer(pool.depots.size(), false);
	std::vector<std::vector<bool>> loop(pool.depots.size(), std::vector<bool>(pool.drones.size(), false));
	struct Row
	{
		std::size_t d, i, p, q;
	};
	std::vector<Row> rows;
	for (std::size_t i = 0; i < pool.customers.size(); ++i)
	{
		const auto& o = options.at(i).at(choice.at(i));
		if (o.outsourced())
		{
			plan.outsourced.push_back(pool.customers[i].id);
			continue;
		}
		rows.push_back({o.drone, i, o.from, o.to});
		used[o.drone] = true;
		if (o.from == o.to)
		{
			loop[o.from][o.drone] = true;
		}
		if (o.transfer)
		{
			plan.transfers.push_back({pool.customers[i].id, pool.depot_ids[pool.owner[i]], pool.depot_ids[o.from]});
			payer[pool.owner[i]] = true;
			payer[o.from] = true;
		}
	}
	std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
		return std::tie(a.d, a.i, a.p, a.q) < std::tie(b.d, b.i, b.p, b.q);
	});
	for (const auto& r : rows)
	{
		plan.trips.push_back({pool.drones[r.d].id, pool.customers[r.i].id, pool.depot_ids[r.p], pool.depot_ids[r.q],
							  pool.trip_length(r.i, r.p, r.q), pool.trip_duration(r.i, r.d, r.p, r.q)});
	}
	for (std::size_t d = 0; d < pool.drones.size(); ++d)
	{
		if (used[d])
		{
			plan.used_drones.push_back(pool.drones[d].id);
		}
	}
	for (std::size_t p = 0; p < pool.depots.size(); ++p)
	{
		if (payer[p])
		{
			plan.transfer_payers.push_back(pool.depot_ids[p]);
		}
		for (std::size_t d = 0; d < pool.drones.size(); ++d)
		{
			if (loop[p][d])
			{
				plan.same_depot_flags.push_back({pool.depot_ids[p], pool.drones[d].id});
			}
		}
	}
	plan.cost = cost_breakdown(plan, pool);
	return plan;
}

namespace detail {

/// Ordering used to pick among optimal plans: cost (within tolerance),
/// then fewer drones, fewer transfers, lexicographically smallest trips.
struct PlanKey
{
	using TripKey = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;

	double cost = std::numeric_limits<double>::infinity();
	std::size_t drones = 0;
	std::size_t transfers = 0;
	std::vector<TripKey> trips;  ///< (drone, customer, from, to), sorted

	bool better_than(const PlanKey& o) const
	{
		if (cost < o.cost - kTolerance)
		{
			return true;
		}
		if (cost > o.cost + kTolerance)
		{
			return false;
		}
		return std::tie(drones, transfers, trips) < std::tie(o.drones, o.transfers, o.trips);
	}
};

inline PlanKey key_of(const PoolInstance& pool, const OptionTable& options, const std::vector<std::size_t>& choice,
					  double cost)
{
	PlanKey k;
	k.cost = cost;
	std::vector<bool> used(pool.drones.size(), false);
	for (std::size_t i = 0; i < choice.size(); ++i)
	{
		const auto& o = options[i][choice[i]];
		if (!o.outsourced())
		{
			k.trips.emplace_back(o.drone, i, o.from, o.to);
			used[o.drone] = true;
			k.transfers += o.transfer ? 1 : 0;
		}
	}
	k.drones = static_cast<std::size_t>(std::count(used.begin(), used.end(), true));
	std::sort(k.trips.begin(), k.trips.end());
	return k;
}

inline DeliveryPlan solve_exhaustive(const PoolInstance& pool, const SolverConfig& config)
{
	const auto options = enumerate_options(pool, config.transfers_enabled);
	std::uint64_t combos = 1;
	for (const auto& o : options)
	{
		if (combos > config.option_cap / o.size())
		{
			throw invalid_input("exhaustive enumeration exceeds the option cap of "
								+ std::to_string(config.option_cap));
		}
		combos *= o.size();
	}
	if (combos > config.option_cap)
	{
		throw invalid_input("exhaustive enumeration exceeds the option cap of " + std::to_string(config.option_cap));
	}

	std::vector<std::size_t> choice(options.size(), 0);
	PlanKey best;
	std::vector<std::size_t> best_choice;
	bool found = false;
	while (true)
	{
		auto plan = derive_plan(pool, options, choice);
		if (!has_fatal(validate(plan, pool, config)))
		{
			auto key = key_of(pool, options, choice, plan.cost.total);
			if (!found || key.better_than(best))
			{
				found = true;
				best = std::move(key);
				best_choice = choice;
			}
		}
		std::size_t i = 0;
		for (; i < choice.size(); ++i)
		{
			if (++choice[i] < options[i].size())
			{
				break;
			}
			choice[i] = 0;
		}
		if (i == choice.size())
		{
			break;
		}
	}
	auto plan = derive_plan(pool, options, best_choice);
	plan.lower_bound = plan.cost.total;
	return plan;
}

/// Depth-first branch and bound over per-customer options.
///
/// Lower bound at a node: committed cost plus, for every undecided customer,
/// its cheapest option where fixed charges that are not yet paid (drone
/// initial cost, supplier transfer charge) are spread over the largest
/// number of undecided customers that could share them.
///
/// Identical drones are interchangeable, so a search branch may only open
/// the first unused drone of each type; the incumbent is relabeled to the
/// lexicographically smallest equivalent plan.
class BranchAndBound
{
public:
	BranchAndBound(const PoolInstance& pool, const SolverConfig& config)
	: pool_(pool),
	  config_(config),
	  options_(enumerate_options(pool, config.transfers_enabled)),
	  n_c_(pool.customers.size()),
	  n_d_(pool.drones.size()),
	  n_p_(pool.depots.size())
	{
		classify_drones();
		order_customers();
		drones_.assign(n_d_, DroneState(n_p_));
		payer_refs_.assign(n_p_, 0);
		choice_.assign(n_c_, 0);
		class_used_.assign(class_members_.size(), 0);
		stamp_.assign(std::max(n_d_, n_p_), 0);
	}

	DeliveryPlan run()
	{
		start_ = std::chrono::steady_clock::now();

		// Outsourcing everything is always feasible; it seeds the incumbent.
		best_choice_.assign(n_c_, 0);
		double all_out = 0;
		for (std::size_t i = 0; i < n_c_; ++i)
		{
			all_out += options_[i][0].cost;
		}
		best_ = detail::key_of(pool_, options_, best_choice_, all_out);

		committed_ = 0;
		for (std::size_t i = 0; i < n_c_; ++i)
		{
			if (options_[i].size() == 1)
			{
				committed_ += options_[i][0].cost;
			}
		}
		root_bound_ = bound(0);
		search(0);

		auto plan = derive_plan(pool_, options_, best_choice_);
		if (aborted_)
		{
			plan.status = SolveStatus::budget_exhausted;
			plan.lower_bound = std::min(open_bound_, plan.cost.total);
		}
		else
		{
			plan.lower_bound = plan.cost.total;
		}
		return plan;
	}

	std::uint64_t nodes() const noexcept { return nodes_; }

private:
	struct DroneState
	{
		explicit DroneState(std::size_t depots)
		: balance(depots, 0), loops(depots, 0), inter_out(depots, 0), endpoint_refs(depots, 0),
		  depot_length(depots, 0)
		{
		}

		int trips = 0;
		double length = 0;
		double hours = 0;
		std::size_t endpoints = 0;
		std::size_t loop_depots = 0;
		std::vector<int> balance;  // departures minus landings
		std::vector<int> loops;
		std::vector<int> inter_out;
		std::vector<int> endpoint_refs;
		std::vector<double> depot_length;
	};

	void classify_drones()
	{
		drone_class_.assign(n_d_, 0);
		for (std::size_t d = 0; d < n_d_; ++d)
		{
			std::size_t c = 0;
			for (; c < class_members_.size(); ++c)
			{
				if (pool_.drones[class_members_[c].front()].same_type(pool_.drones[d]))
				{
					break;
				}
			}
			if (c == class_members_.size())
			{
				class_members_.emplace_back();
			}
			class_members_[c].push_back(d);
			drone_class_[d] = c;
		}
	}

	void order_customers()
	{
		std::vector<std::pair<double, std::size_t>> keyed;
		for (std::size_t i = 0; i < n_c_; ++i)
		{
			if (options_[i].size() == 1)
			{
				continue;
			}
			double cheapest = std::numeric_limits<double>::infinity();
			for (std::size_t k = 1; k < options_[i].size(); ++k)
			{
				cheapest = std::min(cheapest, options_[i][k].cost);
			}
			keyed.emplace_back(options_[i][0].cost - cheapest, i);
		}
		std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
		for (const auto& [spread, i] : keyed)
		{
			order_.push_back(i);
		}
	}

	bool out_of_budget()
	{
		if (config_.node_limit && nodes_ >= *config_.node_limit)
		{
			return true;
		}
		if (config_.time_budget && (nodes_ & 255U) == 0)
		{
			return std::chrono::steady_clock::now() - start_ > *config_.time_budget;
		}
		return false;
	}

	/// Marginal price of choosing `o` for customer `i` in the current state.
	double incremental(std::size_t i, const Option& o) const
	{
		double c = o.cost;
		if (o.outsourced())
		{
			return c;
		}
		if (drones_[o.drone].trips == 0)
		{
			c += pool_.drones[o.drone].initial_cost;
		}
		if (o.transfer)
		{
			const auto owner = pool_.owner[i];
			if (payer_refs_[owner] == 0)
			{
				c += pool_.transfer_cost[owner];
			}
			if (payer_refs_[o.from] == 0)
			{
				c += pool_.transfer_cost[o.from];
			}
		}
		return c;
	}

	bool allowed(const Option& o) const
	{
		if (o.outsourced())
		{
			return true;
		}
		const auto& s = drones_[o.drone];
		const auto& drone = pool_.drones[o.drone];
		if (s.trips == 0)
		{
			const auto c = drone_class_[o.drone];
			if (class_members_[c][class_used_[c]] != o.drone)
			{
				return false;
			}
		}
		if (config_.daily_limit_scope == DailyLimitScope::per_drone)
		{
			if (s.length + o.length > drone.daily_range + kTolerance)
			{
				return false;
			}
		}
		else if (s.depot_length[o.from] + o.length > drone.daily_range + kTolerance)
		{
			return false;
		}
		if (s.hours + o.duration > drone.work_hours + kTolerance)
		{
			return false;
		}
		if (config_.depot_visit_cap)
		{
			std::size_t endpoints = s.endpoints + (s.endpoint_refs[o.from] == 0 ? 1 : 0);
			if (o.to != o.from && s.endpoint_refs[o.to] == 0)
			{
				++endpoints;
			}
			if (endpoints > *config_.depot_visit_cap)
			{
				return false;
			}
		}
		return true;
	}

	void apply(std::size_t i, std::size_t k, int sign)
	{
		const auto& o = options_[i][k];
		committed_ += sign * incremental_for_apply(i, o, sign);
		if (o.outsourced())
		{
			return;
		}
		auto& s = drones_[o.drone];
		const auto c = drone_class_[o.drone];
		if (sign > 0 && s.trips == 0)
		{
			++class_used_[c];
			++used_drones_;
		}
		s.trips += sign;
		if (sign < 0 && s.trips == 0)
		{
			--class_used_[c];
			--used_drones_;
		}
		s.length += sign * o.length;
		s.depot_length[o.from] += sign * o.length;
		s.hours += sign * o.duration;
		s.balance[o.from] += sign;
		s.balance[o.to] -= sign;
		auto touch = [&](std::size_t p) {
			if (sign > 0 && s.endpoint_refs[p]++ == 0)
			{
				++s.endpoints;
			}
			if (sign < 0 && --s.endpoint_refs[p] == 0)
			{
				--s.endpoints;
			}
		};
		touch(o.from);
		if (o.to != o.from)
		{
			touch(o.to);
			s.inter_out[o.from] += sign;
		}
		else
		{
			if (sign > 0 && s.loops[o.from]++ == 0)
			{
				++s.loop_depots;
			}
			if (sign < 0 && --s.loops[o.from] == 0)
			{
				--s.loop_depots;
			}
		}
		if (o.transfer)
		{
			payer_refs_[pool_.owner[i]] += sign;
			payer_refs_[o.from] += sign;
			transfers_ += sign;
		}
	}

	/// Cost delta of adding (sign > 0) or the delta that was added, when
	/// removing (sign < 0). Fixed charges depend on the state before apply.
	double incremental_for_apply(std::size_t i, const Option& o, int sign) const
	{
		if (sign > 0)
		{
			return incremental(i, o);
		}
		double c = o.cost;
		if (o.outsourced())
		{
			return c;
		}
		if (drones_[o.drone].trips == 1)
		{
			c += pool_.drones[o.drone].initial_cost;
		}
		if (o.transfer)
		{
			if (payer_refs_[pool_.owner[i]] == 1)
			{
				c += pool_.transfer_cost[pool_.owner[i]];
			}
			if (payer_refs_[o.from] == 1)
			{
				c += pool_.transfer_cost[o.from];
			}
		}
		return c;
	}

	double bound(std::size_t depth)
	{
		// How many undecided customers could still use each unused drone
		// and each unpaid transfer charge.
		std::vector<std::size_t> drone_users(n_d_, 0);
		std::vector<std::size_t> payer_users(n_p_, 0);
		std::vector<double> min_len(n_d_, std::numeric_limits<double>::infinity());
		std::vector<double> min_hours(n_d_, std::numeric_limits<double>::infinity());
		for (std::size_t k = depth; k < order_.size(); ++k)
		{
			const auto i = order_[k];
			++epoch_;
			for (const auto& o : options_[i])
			{
				if (o.outsourced())
				{
					continue;
				}
				if (stamp_[o.drone] != epoch_)
				{
					stamp_[o.drone] = epoch_;
					++drone_users[o.drone];
				}
				min_len[o.drone] = std::min(min_len[o.drone], o.length);
				min_hours[o.drone] = std::min(min_hours[o.drone], o.duration);
			}
			++epoch_;
			bool any_transfer = false;
			for (const auto& o : options_[i])
			{
				if (o.transfer && stamp_[o.from] != epoch_)
				{
					stamp_[o.from] = epoch_;
					++payer_users[o.from];
					any_transfer = true;
				}
			}
			if (any_transfer)
			{
				++payer_users[pool_.owner[i]];
			}
		}
		std::vector<double> drone_share(n_d_, 0);
		for (std::size_t d = 0; d < n_d_; ++d)
		{
			if (drones_[d].trips > 0 || drone_users[d] == 0)
			{
				continue;
			}
			double cap = static_cast<double>(drone_users[d]);
			const auto& drone = pool_.drones[d];
			if (config_.daily_limit_scope == DailyLimitScope::per_drone && min_len[d] > 0)
			{
				cap = std::min(cap, std::floor((drone.daily_range + kTolerance) / min_len[d]));
			}
			if (min_hours[d] > 0)
			{
				cap = std::min(cap, std::floor((drone.work_hours + kTolerance) / min_hours[d]));
			}
			drone_share[d] = drone.initial_cost / std::max(cap, 1.0);
		}
		std::vector<double> payer_share(n_p_, 0);
		for (std::size_t p = 0; p < n_p_; ++p)
		{
			if (payer_refs_[p] == 0 && payer_users[p] > 0)
			{
				payer_share[p] = pool_.transfer_cost[p] / static_cast<double>(payer_users[p]);
			}
		}

		double lb = committed_;
		for (std::size_t k = depth; k < order_.size(); ++k)
		{
			const auto i = order_[k];
			double cheapest = std::numeric_limits<double>::infinity();
			for (const auto& o : options_[i])
			{
				double c = o.cost;
				if (!o.outsourced())
				{
					c += drone_share[o.drone];
					if (o.transfer)
					{
						c += payer_share[pool_.owner[i]] + payer_share[o.from];
					}
				}
				cheapest = std::min(cheapest, c);
			}
			lb += cheapest;
		}
		return lb;
	}

	bool balance_reachable(std::size_t depth) const
	{
		// Every remaining trip shifts the imbalance of one drone by at most 2.
		long total = 0;
		for (const auto& s : drones_)
		{
			for (int b : s.balance)
			{
				total += std::abs(b);
			}
		}
		return total <= 2L * static_cast<long>(order_.size() - depth);
	}

	bool leaf_feasible() const
	{
		for (const auto& s : drones_)
		{
			if (s.trips == 0)
			{
				continue;
			}
			for (int b : s.balance)
			{
				if (b != 0)
				{
					return false;
				}
			}
			if (s.loop_depots >= 2)
			{
				for (std::size_t p = 0; p < n_p_; ++p)
				{
					if (s.loops[p] > 0 && s.inter_out[p] == 0)
					{
						return false;
					}
				}
			}
		}
		return true;
	}

	/// Relabel identical drones so the trip list is lexicographically
	/// smallest: the lowest ids of each type carry the groups in order of
	/// their first customer.
	std::vector<std::size_t> canonical_choice() const
	{
		std::vector<std::size_t> relabel(n_d_);
		std::iota(relabel.begin(), relabel.end(), 0);
		for (const auto& members : class_members_)
		{
			std::vector<std::pair<std::size_t, std::size_t>> groups;  // (first customer, drone)
			for (auto d : members)
			{
				if (drones_[d].trips == 0)
				{
					continue;
				}
				std::size_t first = n_c_;
				for (std::size_t i = 0; i < n_c_; ++i)
				{
					const auto& o = options_[i][choice_[i]];
					if (!o.outsourced() && o.drone == d)
					{
						first = i;
						break;
					}
				}
				groups.emplace_back(first, d);
			}
			std::sort(groups.begin(), groups.end());
			for (std::size_t g = 0; g < groups.size(); ++g)
			{
				relabel[groups[g].second] = members[g];
			}
		}
		std::vector<std::size_t> out(choice_);
		for (std::size_t i = 0; i < n_c_; ++i)
		{
			const auto& o = options_[i][choice_[i]];
			if (o.outsourced() || relabel[o.drone] == o.drone)
			{
				continue;
			}
			for (std::size_t k = 0; k < options_[i].size(); ++k)
			{
				const auto& alt = options_[i][k];
				if (!alt.outsourced() && alt.drone == relabel[o.drone] && alt.from == o.from && alt.to == o.to)
				{
					out[i] = k;
					break;
				}
			}
		}
		return out;
	}

	void consider_leaf()
	{
		if (!leaf_feasible() || committed_ > best_.cost + kTolerance)
		{
			return;
		}
		auto canon = canonical_choice();
		auto key = detail::key_of(pool_, options_, canon, committed_);
		if (key.better_than(best_))
		{
			best_ = std::move(key);
			best_choice_ = std::move(canon);
		}
	}

	void search(std::size_t depth)
	{
		if (aborted_)
		{
			return;
		}
		++nodes_;
		if (out_of_budget())
		{
			aborted_ = true;
			open_bound_ = std::min(open_bound_, depth == 0 ? root_bound_ : bound(depth));
			return;
		}
		if (depth == order_.size())
		{
			consider_leaf();
			return;
		}
		if (!balance_reachable(depth))
		{
			return;
		}
		const double lb = depth == 0 ? root_bound_ : bound(depth);
		if (lb > best_.cost + kTolerance)
		{
			return;
		}
		if (lb >= best_.cost - kTolerance
			&& std::tie(used_drones_, transfers_) > std::tie(best_.drones, best_.transfers))
		{
			return;
		}

		const auto i = order_[depth];
		std::vector<std::pair<double, std::size_t>> children;
		for (std::size_t k = 0; k < options_[i].size(); ++k)
		{
			if (allowed(options_[i][k]))
			{
				children.emplace_back(incremental(i, options_[i][k]), k);
			}
		}
		std::sort(children.begin(), children.end());
		for (std::size_t c = 0; c < children.size(); ++c)
		{
			const auto k = children[c].second;
			choice_[i] = k;
			apply(i, k, +1);
			search(depth + 1);
			apply(i, k, -1);
			choice_[i] = 0;
			if (aborted_)
			{
				if (c + 1 < children.size())
				{
					open_bound_ = std::min(open_bound_, lb);
				}
				return;
			}
		}
	}

	const PoolInstance& pool_;
	const SolverConfig& config_;
	OptionTable options_;
	std::size_t n_c_, n_d_, n_p_;

	std::vector<std::size_t> order_;
	std::vector<std::size_t> drone_class_;
	std::vector<std::vector<std::size_t>> class_members_;

	std::vector<DroneState> drones_;
	std::vector<int> payer_refs_;
	std::vector<std::size_t> class_used_;
	std::vector<std::size_t> choice_;
	double committed_ = 0;
	std::size_t used_drones_ = 0;
	std::size_t transfers_ = 0;

	std::vector<std::uint64_t> stamp_;
	std::uint64_t epoch_ = 0;

	PlanKey best_;
	std::vector<std::size_t> best_choice_;
	double root_bound_ = 0;
	double open_bound_ = std::numeric_limits<double>::infinity();
	bool aborted_ = false;
	std::uint64_t nodes_ = 0;
	std::chrono::steady_clock::time_point start_;
};

} // namespace detail

/// Minimum-cost delivery plan for a pool. With a time or node budget the
/// result may carry status `budget_exhausted`, the best plan found and a
/// valid lower bound on the optimum.
inline DeliveryPlan solve(const PoolInstance& pool, const SolverConfig& config = {})
{
	if (config.option_cap == 0)
	{
		throw invalid_input("option cap must be positive");
	}
	if (config.mode == SolveMode::exhaustive)
	{
		return detail::solve_exhaustive(pool, config);
	}
	detail::BranchAndBound bnb(pool, config);
	return bnb.run();
}

} // namespace codd
