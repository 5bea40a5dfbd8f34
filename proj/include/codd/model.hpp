#pragma once

#include <codd/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace codd {

/// Slack used for every limit comparison (km, hours, currency).
inline constexpr double kTolerance = 1e-9;

/// Mean Earth radius used by the geodesic metric.
inline constexpr double kEarthRadiusKm = 6371.0;

/// Upper bound on suppliers; coalitions are stored as 64-bit member masks.
inline constexpr std::size_t kMaxSuppliers = 64;

enum class Metric
{
	planar,   ///< x, y in kilometers, Euclidean distance
	geodesic  ///< x = latitude, y = longitude in degrees, haversine distance
};

inline std::string_view to_string(Metric m)
{
	return m == Metric::planar ? "planar" : "geodesic";
}

inline Metric metric_from_string(std::string_view s)
{
	if (s == "planar")
	{
		return Metric::planar;
	}
	if (s == "geodesic")
	{
		return Metric::geodesic;
	}
	throw invalid_input("unknown metric '" + std::string(s) + "'");
}

struct Location
{
	double x = 0;
	double y = 0;
	Metric metric = Metric::planar;

	friend bool operator==(const Location&, const Location&) = default;
};

inline void check_location(const Location& l)
{
	if (!std::isfinite(l.x) || !std::isfinite(l.y))
	{
		throw invalid_input("location coordinates must be finite");
	}
	if (l.metric == Metric::geodesic && (std::abs(l.x) > 90 || std::abs(l.y) > 180))
	{
		throw invalid_input("geodesic location out of range (lat in [-90,90], lon in [-180,180])");
	}
}

/// Flying distance in km.
inline double distance(const Location& a, const Location& b)
{
	if (a.metric != b.metric)
	{
		throw invalid_input("distance between locations with different metrics");
	}
	if (a.metric == Metric::planar)
	{
		return std::hypot(a.x - b.x, a.y - b.y);
	}
	constexpr double rad = std::numbers::pi / 180.0;
	const double lat1 = a.x * rad;
	const double lat2 = b.x * rad;
	const double s_lat = std::sin((b.x - a.x) * rad / 2);
	const double s_lon = std::sin((b.y - a.y) * rad / 2);
	const double h = s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon;
	return 2 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

/// Depot -> customer -> depot length.
inline double trip_length(const Location& from_depot, const Location& customer, const Location& to_depot)
{
	return distance(from_depot, customer) + distance(customer, to_depot);
}

struct OutsourceTier
{
	double max_weight = 0;  ///< inclusive upper bound, kg
	double cost = 0;

	friend bool operator==(const OutsourceTier&, const OutsourceTier&) = default;
};

struct CostParams
{
	double routing_rate = 0.105;  ///< currency per km
	double outsource_cost = 16;   ///< flat per-package carrier price
	/// Optional weight tiers, ascending by max_weight. A package heavier
	/// than every tier falls back to the flat price.
	std::vector<OutsourceTier> outsource_tiers;

	double outsource_for(double weight) const
	{
		for (const auto& t : outsource_tiers)
		{
			if (weight <= t.max_weight + kTolerance)
			{
				return t.cost;
			}
		}
		return outsource_cost;
	}

	friend bool operator==(const CostParams&, const CostParams&) = default;
};

inline double routing_cost(const Location& a, const Location& b, const CostParams& params)
{
	return distance(a, b) * params.routing_rate;
}

struct Customer
{
	std::string id;
	Location location;
	double weight = 3;        ///< kg
	double service_time = 5;  ///< seconds
	std::string owner;

	friend bool operator==(const Customer&, const Customer&) = default;
};

struct Drone
{
	std::string id;
	std::string owner;
	double daily_range = 150;  ///< km
	double trip_range = 10;    ///< km
	double capacity = 4;       ///< kg
	double work_hours = 8;
	double speed = 30;         ///< km/h
	double initial_cost = 0;

	/// Drones with equal limits and price are interchangeable in a plan.
	bool same_type(const Drone& o) const
	{
		return daily_range == o.daily_range && trip_range == o.trip_range && capacity == o.capacity
			&& work_hours == o.work_hours && speed == o.speed && initial_cost == o.initial_cost;
	}

	friend bool operator==(const Drone&, const Drone&) = default;
};

struct Supplier
{
	std::string id;
	Location depot;
	double transfer_cost = 30;
	std::vector<std::string> drones;  ///< filled by Instance from drone owners

	friend bool operator==(const Supplier&, const Supplier&) = default;
};

/// The whole world: suppliers, their customers and drones, and prices.
/// Validated on construction and immutable afterwards.
class Instance
{
public:
	Instance() = default;

	Instance(Metric metric,
			 std::vector<Supplier> suppliers,
			 std::vector<Customer> customers,
			 std::vector<Drone> drones,
			 CostParams cost)
	: metric_(metric),
	  suppliers_(std::move(suppliers)),
	  customers_(std::move(customers)),
	  drones_(std::move(drones)),
	  cost_(std::move(cost))
	{
		validate_and_index();
	}

	Metric metric() const noexcept { return metric_; }
	const std::vector<Supplier>& suppliers() const noexcept { return suppliers_; }
	const std::vector<Customer>& customers() const noexcept { return customers_; }
	const std::vector<Drone>& drones() const noexcept { return drones_; }
	const CostParams& cost() const noexcept { return cost_; }

	std::optional<std::size_t> supplier_index(std::string_view id) const
	{
		return lookup(supplier_ix_, id);
	}

	std::optional<std::size_t> customer_index(std::string_view id) const
	{
		return lookup(customer_ix_, id);
	}

	std::optional<std::size_t> drone_index(std::string_view id) const
	{
		return lookup(drone_ix_, id);
	}

	std::size_t supplier_count() const noexcept { return suppliers_.size(); }

	friend bool operator==(const Instance& a, const Instance& b)
	{
		return a.metric_ == b.metric_ && a.suppliers_ == b.suppliers_ && a.customers_ == b.customers_
			&& a.drones_ == b.drones_ && a.cost_ == b.cost_;
	}

private:
	using index_map = std::unordered_map<std::string, std::size_t>;

	static std::optional<std::size_t> lookup(const index_map& m, std::string_view id)
	{
		auto it = m.find(std::string(id));
		if (it == m.end())
		{
			return std::nullopt;
		}
		return it->second;
	}

	template <typename T>
	static index_map index_ids(const std::vector<T>& items, std::string_view what)
	{
		index_map m;
		for (std::size_t i = 0; i < items.size(); ++i)
		{
			if (items[i].id.empty())
			{
				throw invalid_input(std::string(what) + " with empty id");
			}
			if (!m.emplace(items[i].id, i).second)
			{
				throw invalid_input("duplicate " + std::string(what) + " id '" + items[i].id + "'");
			}
		}
		return m;
	}

	static void require_finite(double v, std::string_view what, const std::string& id)
	{
		if (!std::isfinite(v))
		{
			throw invalid_input(std::string(what) + " of '" + id + "' must be finite");
		}
	}

	void validate_and_index()
	{
		if (suppliers_.size() > kMaxSuppliers)
		{
			throw invalid_input("at most 64 suppliers are supported");
		}
		supplier_ix_ = index_ids(suppliers_, "supplier");
		customer_ix_ = index_ids(customers_, "customer");
		drone_ix_ = index_ids(drones_, "drone");

		if (!(cost_.routing_rate >= 0) || !std::isfinite(cost_.routing_rate))
		{
			throw invalid_input("routing rate must be finite and >= 0");
		}
		if (!(cost_.outsource_cost >= 0) || !std::isfinite(cost_.outsource_cost))
		{
			throw invalid_input("outsource cost must be finite and >= 0");
		}
		for (std::size_t k = 1; k < cost_.outsource_tiers.size(); ++k)
		{
			if (cost_.outsource_tiers[k].max_weight < cost_.outsource_tiers[k - 1].max_weight)
			{
				throw invalid_input("outsource tiers must be ascending by max_weight");
			}
		}

		std::vector<std::vector<std::string>> listed(suppliers_.size());
		for (std::size_t p = 0; p < suppliers_.size(); ++p)
		{
			auto& s = suppliers_[p];
			if (s.depot.metric != metric_)
			{
				throw invalid_input("depot of '" + s.id + "' uses a different metric");
			}
			check_location(s.depot);
			if (!(s.transfer_cost >= 0) || !std::isfinite(s.transfer_cost))
			{
				throw invalid_input("transfer cost of '" + s.id + "' must be finite and >= 0");
			}
			listed[p] = std::move(s.drones);
			s.drones.clear();
		}

		for (const auto& c : customers_)
		{
			if (c.location.metric != metric_)
			{
				throw invalid_input("customer '" + c.id + "' uses a different metric");
			}
			check_location(c.location);
			require_finite(c.weight, "weight", c.id);
			require_finite(c.service_time, "service time", c.id);
			if (!(c.weight > 0))
			{
				throw invalid_input("weight of '" + c.id + "' must be > 0");
			}
			if (c.service_time < 0)
			{
				throw invalid_input("service time of '" + c.id + "' must be >= 0");
			}
			if (!supplier_ix_.contains(c.owner))
			{
				throw invalid_input("customer '" + c.id + "' has unknown owner '" + c.owner + "'");
			}
		}

		for (const auto& d : drones_)
		{
			auto owner = supplier_ix_.find(d.owner);
			if (owner == supplier_ix_.end())
			{
				throw invalid_input("drone '" + d.id + "' has unknown owner '" + d.owner + "'");
			}
			for (double v : {d.daily_range, d.trip_range, d.capacity, d.work_hours, d.speed})
			{
				require_finite(v, "limit", d.id);
				if (!(v > 0))
				{
					throw invalid_input("drone '" + d.id + "' limits and speed must be > 0");
				}
			}
			require_finite(d.initial_cost, "initial cost", d.id);
			if (d.initial_cost < 0)
			{
				throw invalid_input("initial cost of '" + d.id + "' must be >= 0");
			}
			if (d.trip_range > d.daily_range)
			{
				throw invalid_input("drone '" + d.id + "' trip range exceeds its daily range");
			}
			suppliers_[owner->second].drones.push_back(d.id);
		}

		for (std::size_t p = 0; p < suppliers_.size(); ++p)
		{
			for (const auto& id : listed[p])
			{
				auto d = drone_ix_.find(id);
				if (d == drone_ix_.end() || drones_[d->second].owner != suppliers_[p].id)
				{
					throw invalid_input("supplier '" + suppliers_[p].id + "' lists drone '" + id
										+ "' it does not own");
				}
			}
		}
	}

	Metric metric_ = Metric::planar;
	std::vector<Supplier> suppliers_;
	std::vector<Customer> customers_;
	std::vector<Drone> drones_;
	CostParams cost_;
	index_map supplier_ix_;
	index_map customer_ix_;
	index_map drone_ix_;
};

} // namespace codd
