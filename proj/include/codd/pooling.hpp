#pragma once

#include <codd/model.hpp>

#include <bit>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace codd {

/// A set of suppliers, stored as a mask over instance supplier indices.
/// The mask is the canonical key: member order never matters.
class Coalition
{
public:
	constexpr Coalition() = default;
	constexpr explicit Coalition(std::uint64_t bits) : bits_(bits) {}

	static Coalition singleton(std::size_t p) { return Coalition(std::uint64_t{1} << p); }

	static Coalition all(std::size_t n)
	{
		return Coalition(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
	}

	/// Resolve supplier ids; throws on unknown or duplicate ids.
	static Coalition of(const Instance& inst, std::span<const std::string> ids)
	{
		Coalition c;
		for (const auto& id : ids)
		{
			auto p = inst.supplier_index(id);
			if (!p)
			{
				throw invalid_input("unknown supplier '" + id + "'");
			}
			if (c.contains(*p))
			{
				throw invalid_input("supplier '" + id + "' listed twice in coalition");
			}
			c = c.with(*p);
		}
		return c;
	}

	constexpr std::uint64_t bits() const noexcept { return bits_; }
	constexpr bool empty() const noexcept { return bits_ == 0; }
	constexpr std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }
	constexpr bool contains(std::size_t p) const noexcept { return (bits_ >> p) & 1U; }
	constexpr Coalition with(std::size_t p) const noexcept { return Coalition(bits_ | (std::uint64_t{1} << p)); }
	constexpr Coalition without(std::size_t p) const noexcept { return Coalition(bits_ & ~(std::uint64_t{1} << p)); }
	constexpr bool subset_of(Coalition o) const noexcept { return (bits_ & ~o.bits_) == 0; }
	constexpr bool disjoint(Coalition o) const noexcept { return (bits_ & o.bits_) == 0; }
	constexpr Coalition operator|(Coalition o) const noexcept { return Coalition(bits_ | o.bits_); }
	constexpr Coalition operator&(Coalition o) const noexcept { return Coalition(bits_ & o.bits_); }

	/// Member indices, ascending.
	std::vector<std::size_t> members() const
	{
		std::vector<std::size_t> out;
		for (std::uint64_t b = bits_; b != 0; b &= b - 1)
		{
			out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
		}
		return out;
	}

	std::vector<std::string> ids(const Instance& inst) const
	{
		std::vector<std::string> out;
		for (auto p : members())
		{
			out.push_back(inst.suppliers().at(p).id);
		}
		return out;
	}

	/// "p1,p2" in instance order.
	std::string label(const Instance& inst) const
	{
		std::string s;
		for (const auto& id : ids(inst))
		{
			if (!s.empty())
			{
				s += ',';
			}
			s += id;
		}
		return s;
	}

	friend constexpr bool operator==(Coalition, Coalition) = default;
	friend constexpr auto operator<=>(Coalition, Coalition) = default;

private:
	std::uint64_t bits_ = 0;
};

/// A coalition's merged problem: pooled customers, drones and depots.
/// Depot k belongs to supplier `suppliers[k]`; everything keeps instance order.
struct PoolInstance
{
	Coalition coalition;
	Metric metric = Metric::planar;
	CostParams cost;
	std::vector<std::size_t> suppliers;  ///< instance indices
	std::vector<std::string> depot_ids;  ///< supplier id per depot
	std::vector<Location> depots;
	std::vector<double> transfer_cost;   ///< per depot
	std::vector<Customer> customers;
	std::vector<std::size_t> owner;      ///< depot index owning each customer (matrix O)
	std::vector<Drone> drones;

	bool owns(std::size_t customer, std::size_t depot) const { return owner.at(customer) == depot; }

	std::optional<std::size_t> depot_index(std::string_view supplier_id) const
	{
		return find_id(depot_ids, supplier_id);
	}

	std::optional<std::size_t> customer_index(std::string_view id) const
	{
		for (std::size_t i = 0; i < customers.size(); ++i)
		{
			if (customers[i].id == id)
			{
				return i;
			}
		}
		return std::nullopt;
	}

	std::optional<std::size_t> drone_index(std::string_view id) const
	{
		for (std::size_t i = 0; i < drones.size(); ++i)
		{
			if (drones[i].id == id)
			{
				return i;
			}
		}
		return std::nullopt;
	}

	double outsource_cost(std::size_t customer) const
	{
		return cost.outsource_for(customers.at(customer).weight);
	}

	double trip_length(std::size_t customer, std::size_t from, std::size_t to) const
	{
		return codd::trip_length(depots.at(from), customers.at(customer).location, depots.at(to));
	}

	/// Routing term of the objective for one trip: C(p,i) + C(i,q).
	double trip_routing(std::size_t customer, std::size_t from, std::size_t to) const
	{
		const auto& at = customers.at(customer).location;
		return routing_cost(depots.at(from), at, cost) + routing_cost(at, depots.at(to), cost);
	}

	/// Hours spent by `drone` on one trip, flight plus service.
	double trip_duration(std::size_t customer, std::size_t drone, std::size_t from, std::size_t to) const
	{
		return trip_length(customer, from, to) / drones.at(drone).speed
			+ customers.at(customer).service_time / 3600.0;
	}

private:
	static std::optional<std::size_t> find_id(const std::vector<std::string>& v, std::string_view id)
	{
		for (std::size_t i = 0; i < v.size(); ++i)
		{
			if (v[i] == id)
			{
				return i;
			}
		}
		return std::nullopt;
	}
};

inline PoolInstance build_pool(const Instance& inst, Coalition coalition)
{
	if (coalition.empty())
	{
		throw invalid_input("cannot build a pool for an empty coalition");
	}
	if (!coalition.subset_of(Coalition::all(inst.supplier_count())))
	{
		throw invalid_input("coalition references an unknown supplier");
	}

	PoolInstance pool;
	pool.coalition = coalition;
	pool.metric = inst.metric();
	pool.cost = inst.cost();
	std::vector<std::ptrdiff_t> depot_of(inst.supplier_count(), -1);
	for (auto p : coalition.members())
	{
		const auto& s = inst.suppliers()[p];
		depot_of[p] = static_cast<std::ptrdiff_t>(pool.suppliers.size());
		pool.suppliers.push_back(p);
		pool.depot_ids.push_back(s.id);
		pool.depots.push_back(s.depot);
		pool.transfer_cost.push_back(s.transfer_cost);
	}
	for (const auto& c : inst.customers())
	{
		auto p = *inst.supplier_index(c.owner);
		if (depot_of[p] >= 0)
		{
			pool.customers.push_back(c);
			pool.owner.push_back(static_cast<std::size_t>(depot_of[p]));
		}
	}
	for (const auto& d : inst.drones())
	{
		if (depot_of[*inst.supplier_index(d.owner)] >= 0)
		{
			pool.drones.push_back(d);
		}
	}
	return pool;
}

inline PoolInstance build_pool(const Instance& inst, std::span<const std::string> supplier_ids)
{
	return build_pool(inst, Coalition::of(inst, supplier_ids));
}

struct DepotPair
{
	std::size_t from = 0;
	std::size_t to = 0;
	double length = 0;
};

/// Depot pairs from which `drone` can serve `customer` in one trip.
/// Empty means the customer is out of the drone's serving area in this pool.
inline std::vector<DepotPair> serving_area(const PoolInstance& pool, std::size_t customer, std::size_t drone)
{
	if (customer >= pool.customers.size() || drone >= pool.drones.size())
	{
		throw invalid_input("serving_area: index out of range");
	}
	std::vector<DepotPair> out;
	const auto& d = pool.drones[drone];
	if (pool.customers[customer].weight > d.capacity + kTolerance)
	{
		return out;
	}
	for (std::size_t p = 0; p < pool.depots.size(); ++p)
	{
		for (std::size_t q = 0; q < pool.depots.size(); ++q)
		{
			const double len = pool.trip_length(customer, p, q);
			if (len <= d.trip_range + kTolerance)
			{
				out.push_back({p, q, len});
			}
		}
	}
	return out;
}

inline std::vector<DepotPair> serving_area(const PoolInstance& pool, std::string_view customer_id,
										   std::string_view drone_id)
{
	auto i = pool.customer_index(customer_id);
	auto d = pool.drone_index(drone_id);
	if (!i || !d)
	{
		throw invalid_input("serving_area: unknown customer or drone id");
	}
	return serving_area(pool, *i, *d);
}

} // namespace codd
