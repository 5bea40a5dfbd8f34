#pragma once

#include <codd/codd.hpp>

#include <random>
#include <string>
#include <vector>

namespace codd::fixtures {

inline Drone standard_drone(std::string id, std::string owner, double initial_cost = 0)
{
	Drone d;
	d.id = std::move(id);
	d.owner = std::move(owner);
	d.initial_cost = initial_cost;
	return d;
}

/// Two suppliers on a line. Each owns one customer the other serves more
/// cheaply: c1 sits next to p2's depot, c2 near p1's.
inline Instance micro2(double initial_cost = 0)
{
	std::vector<Supplier> s{{"p1", {0, 0, Metric::planar}, 30, {}}, {"p2", {6, 0, Metric::planar}, 30, {}}};
	std::vector<Customer> c{{"c1", {7, 0, Metric::planar}, 3, 5, "p1"}, {"c2", {3, 1, Metric::planar}, 3, 5, "p2"}};
	std::vector<Drone> d{standard_drone("d1", "p1", initial_cost), standard_drone("d2", "p2", initial_cost)};
	return Instance(Metric::planar, std::move(s), std::move(c), std::move(d), CostParams{});
}

/// One supplier whose 15 customers all lie beyond drone reach.
inline Instance unreachable15()
{
	std::vector<Supplier> s{{"p1", {0, 0, Metric::planar}, 30, {}}};
	std::vector<Customer> c;
	for (int k = 1; k <= 15; ++k)
	{
		c.push_back({"c" + std::to_string(k), {10.0 + k, 2.0 * (k % 3), Metric::planar}, 3, 5, "p1"});
	}
	std::vector<Drone> d{standard_drone("d1", "p1", 100)};
	return Instance(Metric::planar, std::move(s), std::move(c), std::move(d), CostParams{});
}

struct PlannedInstance
{
	Instance instance;
	DeliveryPlan plan;  ///< cost left zeroed
};

/// Four suppliers with one S$100 drone each. Two drones fly out-and-back
/// trips from their own depots, 37 customers in all, 18 of them picked up
/// from a neighbor (p3 -> p1, p4 -> p2); 13 far customers are outsourced.
/// Trip radii are chosen so routing totals 30.827 at 0.105 per km.
inline PlannedInstance two_drone_pool_plan()
{
	constexpr double rate = 0.105;
	constexpr double b_radius = 3.9;
	const double a_radius = (30.827 / rate - 19 * 2 * b_radius) / (18 * 2);
	auto loc = [](double x, double y) { return Location{x, y, Metric::planar}; };

	std::vector<Supplier> sup{{"p1", loc(0, 0), 30, {}},
							  {"p2", loc(30, 0), 30, {}},
							  {"p3", loc(0, 30), 30, {}},
							  {"p4", loc(30, 30), 30, {}}};
	std::vector<Drone> drones;
	for (int k = 1; k <= 4; ++k)
	{
		drones.push_back(standard_drone("d" + std::to_string(k), "p" + std::to_string(k), 100));
	}

	std::vector<Customer> cust;
	DeliveryPlan plan;
	plan.coalition = {"p1", "p2", "p3", "p4"};
	plan.used_drones = {"d1", "d2"};
	plan.transfer_payers = {"p1", "p2", "p3", "p4"};
	plan.same_depot_flags = {{"p1", "d1"}, {"p2", "d2"}};

	auto ring = [&](std::size_t count, double radius, const Location& depot, const std::string& depot_id,
					const std::string& drone, const std::string& home, const std::string& other,
					std::size_t home_count) {
		for (std::size_t k = 0; k < count; ++k)
		{
			const double angle = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
			const auto id = "c" + std::to_string(cust.size() + 1);
			const auto owner = k < home_count ? home : other;
			cust.push_back({id, loc(depot.x + radius * std::cos(angle), depot.y + radius * std::sin(angle)), 3, 5,
							owner});
			const double len = 2 * distance(depot, cust.back().location);
			plan.trips.push_back({drone, id, depot_id, depot_id, len, len / 30 + 5.0 / 3600});
			if (owner != home)
			{
				plan.transfers.push_back({id, owner, depot_id});
			}
		}
	};
	ring(18, a_radius, sup[0].depot, "p1", "d1", "p1", "p3", 9);
	ring(19, b_radius, sup[1].depot, "p2", "d2", "p2", "p4", 10);
	for (int k = 0; k < 13; ++k)
	{
		const auto id = "c" + std::to_string(cust.size() + 1);
		cust.push_back({id, loc(15 + 0.3 * k, 15), 3, 5, "p" + std::to_string(k % 4 + 1)});
		plan.outsourced.push_back(id);
	}
	CostParams cost;
	cost.routing_rate = rate;
	return {Instance(Metric::planar, std::move(sup), std::move(cust), std::move(drones), cost), std::move(plan)};
}

struct RandomSpec
{
	std::size_t max_suppliers = 3;
	std::size_t max_customers = 6;
	std::size_t max_drones = 2;
	/// Product of per-customer option counts in the grand pool must stay
	/// below this so the exhaustive oracle stays fast.
	std::uint64_t max_combinations = 20'000;
	std::size_t min_suppliers = 1;
};

inline std::uint64_t grand_combinations(const Instance& inst)
{
	const auto pool = build_pool(inst, Coalition::all(inst.supplier_count()));
	const auto options = enumerate_options(pool);
	std::uint64_t product = 1;
	for (const auto& per : options)
	{
		product *= per.size();
		if (product > (1ull << 40))
		{
			break;
		}
	}
	return product;
}

/// A small random instance on an 8x8 km square with prices drawn so that
/// drones, transfers and outsourcing all compete. Deterministic in `rng`.
inline Instance random_instance(std::mt19937_64& rng, const RandomSpec& spec = {})
{
	auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
	auto pick = [&](std::size_t lo, std::size_t hi) {
		return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
	};
	auto choose = [&](std::initializer_list<double> xs) { return *(xs.begin() + pick(0, xs.size() - 1)); };

	while (true)
	{
		const auto n_sup = pick(spec.min_suppliers, spec.max_suppliers);
		const auto n_cust = pick(1, spec.max_customers);
		const auto n_drone = pick(1, spec.max_drones);

		std::vector<Supplier> sup;
		for (std::size_t p = 0; p < n_sup; ++p)
		{
			sup.push_back({"p" + std::to_string(p + 1), {uniform(0, 8), uniform(0, 8), Metric::planar},
						   choose({0.05, 0.3, 1.0, 30.0}), {}});
		}
		std::vector<Customer> cust;
		for (std::size_t i = 0; i < n_cust; ++i)
		{
			cust.push_back({"c" + std::to_string(i + 1), {uniform(0, 8), uniform(0, 8), Metric::planar},
							choose({1.0, 3.0, 5.0}), choose({5.0, 600.0}), sup[pick(0, n_sup - 1)].id});
		}
		std::vector<Drone> dr;
		for (std::size_t k = 0; k < n_drone; ++k)
		{
			Drone d = standard_drone("d" + std::to_string(k + 1), sup[pick(0, n_sup - 1)].id,
									 choose({0.0, 0.2, 1.5}));
			d.trip_range = choose({8.0, 10.0, 14.0});
			d.daily_range = choose({15.0, 25.0, 150.0});
			d.capacity = choose({3.0, 4.0});
			d.work_hours = choose({0.4, 8.0});
			d.speed = choose({30.0, 50.0});
			dr.push_back(std::move(d));
		}
		CostParams cost;
		cost.routing_rate = choose({0.05, 0.105, 0.3});
		cost.outsource_cost = choose({0.6, 1.2, 2.5, 16.0});
		Instance inst(Metric::planar, std::move(sup), std::move(cust), std::move(dr), cost);
		if (grand_combinations(inst) <= spec.max_combinations)
		{
			return inst;
		}
	}
}

inline SolverConfig exhaustive_config()
{
	SolverConfig c;
	c.mode = SolveMode::exhaustive;
	return c;
}

} // namespace codd::fixtures
