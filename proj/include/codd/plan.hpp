#pragma once

#include <codd/pooling.hpp>

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace codd {

/// One drone sortie: depot `from` -> customer -> depot `to`.
struct Trip
{
	std::string drone;
	std::string customer;
	std::string from;
	std::string to;
	double length = 0;    ///< km
	double duration = 0;  ///< hours, flight plus service

	friend bool operator==(const Trip&, const Trip&) = default;
};

/// A package moved from its owner's depot to another pool depot.
struct Transfer
{
	std::string customer;
	std::string from;
	std::string to;

	friend bool operator==(const Transfer&, const Transfer&) = default;
};

/// Marks a drone that makes a round trip at a depot.
struct DepotLoop
{
	std::string depot;
	std::string drone;

	friend bool operator==(const DepotLoop&, const DepotLoop&) = default;
};

struct CostBreakdown
{
	double initial = 0;
	double routing = 0;
	double transfer = 0;
	double outsource = 0;
	double total = 0;

	friend bool operator==(const CostBreakdown&, const CostBreakdown&) = default;
};

enum class SolveStatus
{
	optimal,
	budget_exhausted
};

/// One assignment-model solution, keyed by ids so it can be stored and
/// re-checked against a pool independently of the solver.
struct DeliveryPlan
{
	std::vector<std::string> coalition;
	std::vector<std::string> used_drones;        ///< W
	std::vector<Trip> trips;                     ///< Y = 1 entries
	std::vector<std::string> outsourced;         ///< Z
	std::vector<Transfer> transfers;             ///< M
	std::vector<std::string> transfer_payers;    ///< T
	std::vector<DepotLoop> same_depot_flags;     ///< B
	CostBreakdown cost;
	SolveStatus status = SolveStatus::optimal;
	double lower_bound = 0;

	friend bool operator==(const DeliveryPlan&, const DeliveryPlan&) = default;
};

enum class SolveMode
{
	exhaustive,
	branch_and_bound
};

enum class DailyLimitScope
{
	per_drone,  ///< l_d bounds all of a drone's trips
	per_depot   ///< l_d bounds the trips departing each depot
};

struct SolverConfig
{
	SolveMode mode = SolveMode::branch_and_bound;
	std::uint64_t option_cap = 1'000'000;  ///< max option combinations in exhaustive mode
	std::optional<std::chrono::milliseconds> time_budget;
	std::optional<std::uint64_t> node_limit;
	DailyLimitScope daily_limit_scope = DailyLimitScope::per_drone;
	std::optional<std::size_t> depot_visit_cap = 3;
	bool transfers_enabled = true;
};

/// A broken constraint. `constraint` is the model constraint number
/// ("2".."16") or one of "depot-cap", "transfer-origin", "connectivity".
struct Violation
{
	std::string constraint;
	std::string where;
	double slack = 0;    ///< amount by which the left side exceeds the right side
	bool fatal = true;   ///< false for advisory warnings

	friend bool operator==(const Violation&, const Violation&) = default;
};

namespace detail {

template <typename Fn>
std::size_t resolve(Fn&& find, std::string_view id, std::string_view what)
{
	auto ix = find(id);
	if (!ix)
	{
		throw invalid_input("plan references unknown " + std::string(what) + " '" + std::string(id) + "'");
	}
	return *ix;
}

/// Plan with ids resolved to pool indices.
struct IndexedPlan
{
	struct T { std::size_t drone, customer, from, to; };
	struct M { std::size_t customer, from, to; };
	std::vector<T> trips;
	std::vector<bool> used;        // W per drone
	std::vector<bool> outsourced;  // Z per customer
	std::vector<M> transfers;
	std::vector<bool> payer;       // T per depot
	std::vector<std::vector<bool>> loop_flag;  // B[depot][drone]
};

inline IndexedPlan index_plan(const DeliveryPlan& plan, const PoolInstance& pool)
{
	auto depot = [&](std::string_view id) { return pool.depot_index(id); };
	auto customer = [&](std::string_view id) { return pool.customer_index(id); };
	auto drone = [&](std::string_view id) { return pool.drone_index(id); };

	IndexedPlan ix;
	ix.used.assign(pool.drones.size(), false);
	ix.outsourced.assign(pool.customers.size(), false);
	ix.payer.assign(pool.depots.size(), false);
	ix.loop_flag.assign(pool.depots.size(), std::vector<bool>(pool.drones.size(), false));
	for (const auto& t : plan.trips)
	{
		ix.trips.push_back({resolve(drone, t.drone, "drone"), resolve(customer, t.customer, "customer"),
							resolve(depot, t.from, "depot"), resolve(depot, t.to, "depot")});
	}
	for (const auto& d : plan.used_drones)
	{
		ix.used[resolve(drone, d, "drone")] = true;
	}
	for (const auto& c : plan.outsourced)
	{
		ix.outsourced[resolve(customer, c, "customer")] = true;
	}
	for (const auto& m : plan.transfers)
	{
		ix.transfers.push_back({resolve(customer, m.customer, "customer"), resolve(depot, m.from, "depot"),
								resolve(depot, m.to, "depot")});
	}
	for (const auto& p : plan.transfer_payers)
	{
		ix.payer[resolve(depot, p, "depot")] = true;
	}
	for (const auto& b : plan.same_depot_flags)
	{
		ix.loop_flag[resolve(depot, b.depot, "depot")][resolve(drone, b.drone, "drone")] = true;
	}
	return ix;
}

} // namespace detail

/// Objective terms recomputed from the plan's W, Y, Z and T sets.
inline CostBreakdown cost_breakdown(const DeliveryPlan& plan, const PoolInstance& pool)
{
	const auto ix = detail::index_plan(plan, pool);
	CostBreakdown c;
	for (std::size_t d = 0; d < pool.drones.size(); ++d)
	{
		if (ix.used[d])
		{
			c.initial += pool.drones[d].initial_cost;
		}
	}
	for (const auto& t : ix.trips)
	{
		c.routing += pool.trip_routing(t.customer, t.from, t.to);
	}
	for (std::size_t p = 0; p < pool.depots.size(); ++p)
	{
		if (ix.payer[p])
		{
			c.transfer += pool.transfer_cost[p];
		}
	}
	for (std::size_t i = 0; i < pool.customers.size(); ++i)
	{
		if (ix.outsourced[i])
		{
			c.outsource += pool.outsource_cost(i);
		}
	}
	c.total = c.initial + c.routing + c.transfer + c.outsource;
	return c;
}

/// Check a plan against every constraint of the assignment model.
/// Returns an empty list iff the plan is feasible; non-fatal entries are
/// warnings (a drone whose depot graph is disconnected).
inline std::vector<Violation> validate(const DeliveryPlan& plan, const PoolInstance& pool,
									   const SolverConfig& config = {})
{
	const auto ix = detail::index_plan(plan, pool);
	const std::size_t n_c = pool.customers.size();
	const std::size_t n_d = pool.drones.size();
	const std::size_t n_p = pool.depots.size();
	const double big_c = static_cast<double>(std::max<std::size_t>(n_c, 1));
	const double big_p = static_cast<double>(std::max<std::size_t>(n_p, 1));

	std::vector<Violation> out;
	auto report = [&](std::string constraint, std::string where, double slack, bool fatal = true) {
		out.push_back({std::move(constraint), std::move(where), slack, fatal});
	};
	auto cid = [&](std::size_t i) { return pool.customers[i].id; };
	auto did = [&](std::size_t d) { return pool.drones[d].id; };
	auto pid = [&](std::size_t p) { return pool.depot_ids[p]; };

	// Aggregates over Y.
	std::vector<int> served(n_c, 0);
	std::vector<int> trips_on(n_d, 0);
	std::vector<std::vector<int>> departs(n_d, std::vector<int>(n_p, 0));
	std::vector<std::vector<int>> lands(n_d, std::vector<int>(n_p, 0));
	std::vector<std::vector<int>> loops(n_d, std::vector<int>(n_p, 0));
	std::vector<std::vector<int>> inter_out(n_d, std::vector<int>(n_p, 0));
	std::vector<double> day_len(n_d, 0);
	std::vector<std::vector<double>> depot_len(n_d, std::vector<double>(n_p, 0));
	std::vector<double> hours(n_d, 0);
	std::vector<std::vector<int>> departs_customer(n_c, std::vector<int>(n_p, 0));

	for (const auto& t : ix.trips)
	{
		const auto& drone = pool.drones[t.drone];
		const auto& cust = pool.customers[t.customer];
		const double len = pool.trip_length(t.customer, t.from, t.to);
		++served[t.customer];
		++trips_on[t.drone];
		++departs[t.drone][t.from];
		++lands[t.drone][t.to];
		++departs_customer[t.customer][t.from];
		if (t.from == t.to)
		{
			++loops[t.drone][t.from];
		}
		else
		{
			++inter_out[t.drone][t.from];
		}
		day_len[t.drone] += len;
		depot_len[t.drone][t.from] += len;
		hours[t.drone] += pool.trip_duration(t.customer, t.drone, t.from, t.to);

		const std::string where = did(t.drone) + "/" + cid(t.customer) + "/" + pid(t.from) + "->" + pid(t.to);
		if (cust.weight > drone.capacity + kTolerance)
		{
			report("7", where, cust.weight - drone.capacity);
		}
		if (len > drone.trip_range + kTolerance)
		{
			report("8", where, len - drone.trip_range);
		}
	}

	for (std::size_t d = 0; d < n_d; ++d)
	{
		if (trips_on[d] > big_c * (ix.used[d] ? 1 : 0))
		{
			report("2", did(d), trips_on[d] - big_c * (ix.used[d] ? 1 : 0));
		}
	}
	for (std::size_t i = 0; i < n_c; ++i)
	{
		const int lhs = served[i] + (ix.outsourced[i] ? 1 : 0);
		if (lhs != 1)
		{
			report("3", cid(i), lhs - 1.0);
		}
	}
	for (std::size_t d = 0; d < n_d; ++d)
	{
		for (std::size_t q = 0; q < n_p; ++q)
		{
			if (lands[d][q] != departs[d][q])
			{
				report("4", did(d) + "@" + pid(q), static_cast<double>(lands[d][q] - departs[d][q]));
			}
		}
	}
	for (std::size_t d = 0; d < n_d; ++d)
	{
		double flagged = 0;
		for (std::size_t r = 0; r < n_p; ++r)
		{
			flagged += ix.loop_flag[r][d] ? 1 : 0;
		}
		for (std::size_t p = 0; p < n_p; ++p)
		{
			const double b = ix.loop_flag[p][d] ? 1 : 0;
			if (loops[d][p] > big_c * b)
			{
				report("5", did(d) + "@" + pid(p), loops[d][p] - big_c * b);
			}
			// Linearized B_pd * (sum_r B_rd - 1) <= D * sum_{q != p} Y_idpq.
			const double lhs = flagged - 1;
			const double rhs = big_p * inter_out[d][p] + big_p * (1 - b);
			if (lhs > rhs + kTolerance)
			{
				report("6", did(d) + "@" + pid(p), lhs - rhs);
			}
		}
	}
	for (std::size_t d = 0; d < n_d; ++d)
	{
		const auto& drone = pool.drones[d];
		if (config.daily_limit_scope == DailyLimitScope::per_drone)
		{
			if (day_len[d] > drone.daily_range + kTolerance)
			{
				report("9", did(d), day_len[d] - drone.daily_range);
			}
		}
		else
		{
			for (std::size_t p = 0; p < n_p; ++p)
			{
				if (depot_len[d][p] > drone.daily_range + kTolerance)
				{
					report("9", did(d) + "@" + pid(p), depot_len[d][p] - drone.daily_range);
				}
			}
		}
		if (hours[d] > drone.work_hours + kTolerance)
		{
			report("10", did(d), hours[d] - drone.work_hours);
		}
	}

	std::vector<std::vector<int>> moved(n_c, std::vector<int>(n_p, 0));  // sum_q M_ipq
	std::vector<int> sends(n_p, 0);
	std::vector<int> receives(n_p, 0);
	for (const auto& m : ix.transfers)
	{
		++moved[m.customer][m.from];
		++sends[m.from];
		++receives[m.to];
		const std::string where = cid(m.customer) + "/" + pid(m.from) + "->" + pid(m.to);
		if (m.from == m.to)
		{
			report("14", where, 1);
		}
		// (12): the package must leave from the depot it was moved to.
		if (departs_customer[m.customer][m.to] < 1)
		{
			report("12", where, 1.0 - departs_customer[m.customer][m.to]);
		}
		if (m.from != pool.owner[m.customer])
		{
			report("transfer-origin", where, 1);
		}
	}
	for (std::size_t i = 0; i < n_c; ++i)
	{
		for (std::size_t p = 0; p < n_p; ++p)
		{
			// (11) with the outsourcing indicator on the right side.
			const double lhs = (pool.owns(i, p) ? 1.0 : 0.0) - moved[i][p];
			const double rhs = departs_customer[i][p] + (ix.outsourced[i] ? 1.0 : 0.0);
			if (lhs > rhs + kTolerance)
			{
				report("11", cid(i) + "@" + pid(p), lhs - rhs);
			}
			if (moved[i][p] > 1)
			{
				report("13", cid(i) + "@" + pid(p), moved[i][p] - 1.0);
			}
		}
	}
	const double big_cp = big_c * big_p;
	for (std::size_t p = 0; p < n_p; ++p)
	{
		const double t = ix.payer[p] ? 1 : 0;
		if (sends[p] > big_cp * t)
		{
			report("15", pid(p), sends[p] - big_cp * t);
		}
		if (receives[p] > big_cp * t)
		{
			report("16", pid(p), receives[p] - big_cp * t);
		}
	}

	for (std::size_t d = 0; d < n_d; ++d)
	{
		std::vector<std::size_t> parent(n_p);
		for (std::size_t p = 0; p < n_p; ++p)
		{
			parent[p] = p;
		}
		auto find = [&](std::size_t x) {
			while (parent[x] != x)
			{
				x = parent[x] = parent[parent[x]];
			}
			return x;
		};
		std::set<std::size_t> endpoints;
		for (const auto& t : ix.trips)
		{
			if (t.drone == d)
			{
				endpoints.insert(t.from);
				endpoints.insert(t.to);
				parent[find(t.from)] = find(t.to);
			}
		}
		if (config.depot_visit_cap && endpoints.size() > *config.depot_visit_cap)
		{
			report("depot-cap", did(d), static_cast<double>(endpoints.size() - *config.depot_visit_cap));
		}
		std::set<std::size_t> roots;
		for (auto p : endpoints)
		{
			roots.insert(find(p));
		}
		if (roots.size() > 1)
		{
			report("connectivity", did(d), static_cast<double>(roots.size() - 1), false);
		}
	}
	return out;
}

inline bool has_fatal(const std::vector<Violation>& v)
{
	for (const auto& x : v)
	{
		if (x.fatal)
		{
			return true;
		}
	}
	return false;
}

} // namespace codd
