#include <support/fixtures.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace codd;

namespace {

Instance c101_four_suppliers()
{
	return synthesize(parse_solomon(read_text(CODD_DATA_DIR "/c101.txt")), SynthesisParams{});
}

std::set<std::tuple<std::string, std::string, double>> pairs_of(const PoolInstance& pool,
																 const std::vector<DepotPair>& v)
{
	std::set<std::tuple<std::string, std::string, double>> out;
	for (const auto& p : v)
	{
		out.insert({pool.depot_ids[p.from], pool.depot_ids[p.to], p.length});
	}
	return out;
}

} // namespace

TEST(Coalition, MaskOperations)
{
	const auto inst = c101_four_suppliers();
	const std::vector<std::string> ids{"p3", "p1"};
	const auto c = Coalition::of(inst, ids);
	EXPECT_EQ(c.bits(), 0b101u);
	EXPECT_EQ(c.size(), 2u);
	EXPECT_EQ(c.label(inst), "p1,p3");
	EXPECT_EQ(c.members(), (std::vector<std::size_t>{0, 2}));
	EXPECT_TRUE(c.subset_of(Coalition::all(4)));
	EXPECT_TRUE(c.disjoint(Coalition(0b1010)));
	EXPECT_EQ(c.with(1).without(0).bits(), 0b110u);

	const std::vector<std::string> unknown{"p9"};
	EXPECT_THROW(Coalition::of(inst, unknown), invalid_input);
	const std::vector<std::string> twice{"p1", "p1"};
	EXPECT_THROW(Coalition::of(inst, twice), invalid_input);
}

TEST(BuildPool, GrandCoalitionOfSixtyCustomers)
{
	const auto inst = c101_four_suppliers();
	const auto pool = build_pool(inst, Coalition::all(4));
	EXPECT_EQ(pool.customers.size(), 60u);
	EXPECT_EQ(pool.drones.size(), 4u);
	EXPECT_EQ(pool.depots.size(), 4u);
}

TEST(BuildPool, SingletonKeepsOwnData)
{
	const auto inst = c101_four_suppliers();
	const auto pool = build_pool(inst, Coalition::singleton(1));
	EXPECT_EQ(pool.depot_ids, std::vector<std::string>{"p2"});
	EXPECT_EQ(pool.customers.size(), 15u);
	for (std::size_t i = 0; i < pool.customers.size(); ++i)
	{
		EXPECT_EQ(pool.customers[i].owner, "p2");
		EXPECT_EQ(pool.owner[i], 0u);
	}
	ASSERT_EQ(pool.drones.size(), 1u);
	EXPECT_EQ(pool.drones[0].owner, "p2");
}

TEST(BuildPool, MicroTwoIdentityOwnership)
{
	const auto inst = fixtures::micro2();
	const auto pool = build_pool(inst, Coalition::all(2));
	ASSERT_EQ(pool.customers.size(), 2u);
	EXPECT_EQ(pool.drones.size(), 2u);
	EXPECT_EQ(pool.depots.size(), 2u);
	EXPECT_EQ(pool.owner, (std::vector<std::size_t>{0, 1}));
}

TEST(BuildPool, RejectsEmptyAndUnknown)
{
	const auto inst = fixtures::micro2();
	EXPECT_THROW(build_pool(inst, Coalition{}), invalid_input);
	EXPECT_THROW(build_pool(inst, Coalition(0b100)), invalid_input);
	const std::vector<std::string> ids{"p7"};
	EXPECT_THROW(build_pool(inst, ids), invalid_input);
}

TEST(BuildPool, SizesAreSumsOverMembers)
{
	std::mt19937_64 rng(5);
	for (int k = 0; k < 50; ++k)
	{
		const auto inst = fixtures::random_instance(rng);
		const auto n = inst.supplier_count();
		for (std::uint64_t m = 1; m < (1u << n); ++m)
		{
			const auto pool = build_pool(inst, Coalition(m));
			std::size_t customers = 0, drones = 0;
			for (auto p : Coalition(m).members())
			{
				const auto& id = inst.suppliers()[p].id;
				customers += std::count_if(inst.customers().begin(), inst.customers().end(),
										   [&](const auto& c) { return c.owner == id; });
				drones += inst.suppliers()[p].drones.size();
			}
			EXPECT_EQ(pool.customers.size(), customers);
			EXPECT_EQ(pool.drones.size(), drones);
			for (std::size_t i = 0; i < pool.customers.size(); ++i)
			{
				EXPECT_EQ(pool.depot_ids[pool.owner[i]], pool.customers[i].owner);
			}
		}
	}
}

TEST(BuildPool, IndependentOfMemberOrder)
{
	const auto inst = c101_four_suppliers();
	const std::vector<std::string> a{"p4", "p2", "p1"};
	const std::vector<std::string> b{"p1", "p2", "p4"};
	const auto x = build_pool(inst, a);
	const auto y = build_pool(inst, b);
	EXPECT_EQ(x.depot_ids, y.depot_ids);
	EXPECT_EQ(x.customers, y.customers);
	EXPECT_EQ(x.drones, y.drones);
	EXPECT_EQ(x.owner, y.owner);
}

TEST(ServingArea, OutAndBackBeyondRange)
{
	std::vector<Supplier> s{{"p1", {0, 0, Metric::planar}, 30, {}}};
	std::vector<Customer> c{{"c1", {8, 0, Metric::planar}, 3, 5, "p1"}};
	std::vector<Drone> d{fixtures::standard_drone("d1", "p1")};
	const Instance inst(Metric::planar, s, c, d, CostParams{});
	EXPECT_TRUE(serving_area(build_pool(inst, Coalition::all(1)), "c1", "d1").empty());
}

TEST(ServingArea, MicroTwoCustomerOne)
{
	const auto pool = build_pool(fixtures::micro2(), Coalition::all(2));
	const auto got = pairs_of(pool, serving_area(pool, "c1", "d1"));
	const std::set<std::tuple<std::string, std::string, double>> want{
		{"p1", "p2", 8.0}, {"p2", "p2", 2.0}, {"p2", "p1", 8.0}};
	EXPECT_EQ(got, want);
}

TEST(ServingArea, OverweightPackageHasNoPairs)
{
	std::vector<Supplier> s{{"p1", {0, 0, Metric::planar}, 30, {}}};
	std::vector<Customer> c{{"c1", {1, 0, Metric::planar}, 5, 5, "p1"}};
	std::vector<Drone> d{fixtures::standard_drone("d1", "p1")};
	const Instance inst(Metric::planar, s, c, d, CostParams{});
	EXPECT_TRUE(serving_area(build_pool(inst, Coalition::all(1)), "c1", "d1").empty());
}

TEST(ServingArea, UnknownIdsRejected)
{
	const auto pool = build_pool(fixtures::micro2(), Coalition::all(2));
	EXPECT_THROW(serving_area(pool, "c9", "d1"), invalid_input);
	EXPECT_THROW(serving_area(pool, "c1", "d9"), invalid_input);
}

TEST(ServingArea, GrowsWithCoalition)
{
	std::mt19937_64 rng(9);
	for (int k = 0; k < 60; ++k)
	{
		const auto inst = fixtures::random_instance(rng, {.max_suppliers = 4});
		const auto n = inst.supplier_count();
		for (std::uint64_t m = 1; m < (1u << n); ++m)
		{
			const auto small = build_pool(inst, Coalition(m));
			for (std::size_t extra = 0; extra < n; ++extra)
			{
				const auto large = build_pool(inst, Coalition(m).with(extra));
				for (const auto& cust : small.customers)
				{
					for (const auto& dr : small.drones)
					{
						const auto a = pairs_of(small, serving_area(small, cust.id, dr.id));
						const auto b = pairs_of(large, serving_area(large, cust.id, dr.id));
						EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
					}
				}
			}
		}
	}
}
