#pragma once

#include <codd/formation.hpp>

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace codd {

using json = nlohmann::json;

// ---------------------------------------------------------------- Solomon

struct SolomonRecord
{
	int number = 0;
	double x = 0;
	double y = 0;
	double demand = 0;
	double ready_time = 0;
	double due_date = 0;
	double service_time = 0;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line)
{
	std::vector<std::string_view> out;
	std::size_t i = 0;
	while (i < line.size())
	{
		while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
		{
			++i;
		}
		const auto start = i;
		while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
		{
			++i;
		}
		if (i > start)
		{
			out.push_back(line.substr(start, i - start));
		}
	}
	return out;
}

inline bool parse_number(std::string_view tok, double& out)
{
	auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
	return ec == std::errc() && ptr == tok.data() + tok.size() && std::isfinite(out);
}

} // namespace detail

/// Parse the CUSTOMER table of a Solomon VRPTW file. Record 0 is the
/// original depot. Blank lines and trailing whitespace are ignored.
inline std::vector<SolomonRecord> parse_solomon(std::string_view text)
{
	std::vector<SolomonRecord> out;
	std::set<int> numbers;
	bool in_table = false;
	bool header_skipped = false;
	std::size_t line_no = 0;
	std::size_t pos = 0;
	while (pos <= text.size())
	{
		auto end = text.find('\n', pos);
		if (end == std::string_view::npos)
		{
			end = text.size();
		}
		const auto line = text.substr(pos, end - pos);
		pos = end + 1;
		++line_no;

		const auto tok = detail::split_ws(line);
		if (tok.empty())
		{
			continue;
		}
		if (!in_table)
		{
			if (tok.size() == 1 && tok[0] == "CUSTOMER")
			{
				in_table = true;
			}
			continue;
		}
		if (!header_skipped && std::isalpha(static_cast<unsigned char>(tok[0][0])))
		{
			header_skipped = true;
			continue;
		}
		header_skipped = true;
		if (tok.size() != 7)
		{
			throw parse_error(line_no, "expected 7 fields in customer row, found " + std::to_string(tok.size()));
		}
		double v[7];
		for (std::size_t k = 0; k < 7; ++k)
		{
			if (!detail::parse_number(tok[k], v[k]))
			{
				throw parse_error(line_no, "non-numeric field '" + std::string(tok[k]) + "'");
			}
		}
		if (v[0] != std::floor(v[0]) || v[0] < 0)
		{
			throw parse_error(line_no, "customer number must be a non-negative integer");
		}
		const int number = static_cast<int>(v[0]);
		if (!numbers.insert(number).second)
		{
			throw parse_error(line_no, "duplicate customer number " + std::to_string(number));
		}
		out.push_back({number, v[1], v[2], v[3], v[4], v[5], v[6]});
	}
	if (!in_table)
	{
		throw parse_error(0, "no CUSTOMER section found");
	}
	return out;
}

inline std::string read_text(const std::string& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
	{
		throw std::runtime_error("cannot open '" + path + "'");
	}
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

inline void write_text(const std::string& path, std::string_view text)
{
	std::ofstream out(path, std::ios::binary);
	if (!out)
	{
		throw std::runtime_error("cannot write '" + path + "'");
	}
	out << text;
	if (!out)
	{
		throw std::runtime_error("write to '" + path + "' failed");
	}
}

// ------------------------------------------------------------- synthesis

struct DepotSpec
{
	std::string supplier_id;  ///< empty: "p<k>"
	Location location;
};

struct SynthesisParams
{
	std::size_t suppliers = 4;
	std::size_t customers = 60;
	std::vector<DepotSpec> depots;  ///< empty: default_depots()
	Drone drone_template = [] {
		Drone d;
		d.initial_cost = 100;
		return d;
	}();                            ///< id and owner are overwritten
	CostParams cost;
	double transfer_cost = 30;
	double weight = 3;
	double service_time = 5;        ///< seconds
	bool weights_from_demand = false;
};

/// Default depot placement: the corners of the customers' bounding box,
/// inset by 25% of its width and height, taken counter-clockwise from the
/// lower-left. Each side of that inset rectangle spans an equal share of
/// the k positions, so four suppliers land exactly on its corners. One
/// supplier sits at the box center.
inline std::vector<Location> default_depots(const std::vector<SolomonRecord>& customers, std::size_t k)
{
	if (customers.empty())
	{
		throw invalid_input("default_depots: no customers");
	}
	double x0 = customers[0].x, x1 = x0, y0 = customers[0].y, y1 = y0;
	for (const auto& r : customers)
	{
		x0 = std::min(x0, r.x);
		x1 = std::max(x1, r.x);
		y0 = std::min(y0, r.y);
		y1 = std::max(y1, r.y);
	}
	const double w = x1 - x0;
	const double h = y1 - y0;
	std::vector<Location> out;
	if (k == 1)
	{
		out.push_back({x0 + w / 2, y0 + h / 2, Metric::planar});
		return out;
	}
	const double corner_x[5] = {x0 + 0.25 * w, x1 - 0.25 * w, x1 - 0.25 * w, x0 + 0.25 * w, x0 + 0.25 * w};
	const double corner_y[5] = {y0 + 0.25 * h, y0 + 0.25 * h, y1 - 0.25 * h, y1 - 0.25 * h, y0 + 0.25 * h};
	for (std::size_t j = 0; j < k; ++j)
	{
		const double t = 4.0 * static_cast<double>(j) / static_cast<double>(k);
		const auto side = static_cast<std::size_t>(t);
		const double f = t - static_cast<double>(side);
		out.push_back({corner_x[side] + f * (corner_x[side + 1] - corner_x[side]),
					   corner_y[side] + f * (corner_y[side + 1] - corner_y[side]), Metric::planar});
	}
	return out;
}

/// Build a multi-supplier instance from Solomon records: the first
/// `customers` non-depot records in file order, owned round-robin
/// (customer j goes to supplier ((j-1) mod k) + 1), one template drone
/// per supplier.
inline Instance synthesize(const std::vector<SolomonRecord>& records, const SynthesisParams& params)
{
	if (params.suppliers == 0)
	{
		throw invalid_input("synthesize: need at least one supplier");
	}
	std::vector<SolomonRecord> picked;
	for (const auto& r : records)
	{
		if (r.number == 0)
		{
			continue;
		}
		if (picked.size() == params.customers)
		{
			break;
		}
		picked.push_back(r);
	}
	if (picked.size() < params.customers)
	{
		throw invalid_input("synthesize: asked for " + std::to_string(params.customers) + " customers but only "
							+ std::to_string(picked.size()) + " records are available");
	}

	std::vector<DepotSpec> depots = params.depots;
	if (depots.empty())
	{
		if (picked.empty())
		{
			throw invalid_input("synthesize: no customers to place default depots around");
		}
		for (const auto& l : default_depots(picked, params.suppliers))
		{
			depots.push_back({"", l});
		}
	}
	if (depots.size() != params.suppliers)
	{
		throw invalid_input("synthesize: " + std::to_string(depots.size()) + " depot locations for "
							+ std::to_string(params.suppliers) + " suppliers");
	}

	std::vector<Supplier> suppliers;
	std::vector<Drone> drones;
	std::set<std::string> ids;
	for (std::size_t k = 0; k < depots.size(); ++k)
	{
		auto id = depots[k].supplier_id.empty() ? "p" + std::to_string(k + 1) : depots[k].supplier_id;
		if (!ids.insert(id).second)
		{
			throw invalid_input("synthesize: duplicate depot id '" + id + "'");
		}
		suppliers.push_back({id, depots[k].location, params.transfer_cost, {}});
		Drone d = params.drone_template;
		d.id = "d" + std::to_string(k + 1);
		d.owner = id;
		drones.push_back(d);
	}

	std::vector<Customer> customers;
	for (std::size_t j = 0; j < picked.size(); ++j)
	{
		const auto& r = picked[j];
		Customer c;
		c.id = "c" + std::to_string(r.number);
		c.location = {r.x, r.y, Metric::planar};
		c.weight = params.weights_from_demand ? r.demand : params.weight;
		c.service_time = params.service_time;
		c.owner = suppliers[j % suppliers.size()].id;
		customers.push_back(std::move(c));
	}
	return Instance(Metric::planar, std::move(suppliers), std::move(customers), std::move(drones), params.cost);
}

// ------------------------------------------------------------------ JSON

enum class Strictness
{
	strict,  ///< unknown fields are errors
	lenient  ///< unknown fields are reported as warnings
};

struct ReadOptions
{
	Strictness strictness = Strictness::strict;
	std::vector<std::string>* warnings = nullptr;
};

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline void check_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where,
					   const ReadOptions& opt)
{
	if (!j.is_object())
	{
		throw parse_error(0, std::string(where) + ": expected an object");
	}
	for (const auto& [key, value] : j.items())
	{
		if (std::find(allowed.begin(), allowed.end(), key) != allowed.end())
		{
			continue;
		}
		const auto msg = std::string(where) + ": unknown field '" + key + "'";
		if (opt.strictness == Strictness::strict)
		{
			throw parse_error(0, msg);
		}
		if (opt.warnings)
		{
			opt.warnings->push_back(msg);
		}
	}
}

template <typename T>
T get(const json& j, const char* key, std::string_view where)
{
	if (!j.contains(key))
	{
		throw parse_error(0, std::string(where) + ": missing field '" + key + "'");
	}
	try
	{
		return j.at(key).get<T>();
	}
	catch (const json::exception& e)
	{
		throw parse_error(0, std::string(where) + ": field '" + key + "': " + e.what());
	}
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, std::string_view where)
{
	return j.contains(key) ? get<T>(j, key, where) : fallback;
}

inline void check_header(const json& j, std::string_view format)
{
	const auto f = get<std::string>(j, "format", "document");
	if (f != format)
	{
		throw parse_error(0, "expected format '" + std::string(format) + "', found '" + f + "'");
	}
	const auto v = get<int>(j, "version", "document");
	if (v != kSchemaVersion)
	{
		throw parse_error(0, "unsupported " + std::string(format) + " version " + std::to_string(v));
	}
}

inline json header(std::string_view format)
{
	return json{{"format", format}, {"version", kSchemaVersion}};
}

} // namespace detail

inline json to_json(const Instance& inst)
{
	auto j = detail::header("codd-instance");
	j["metric"] = to_string(inst.metric());
	json cost{{"routing_rate", inst.cost().routing_rate}, {"outsource_cost", inst.cost().outsource_cost},
			  {"outsource_tiers", json::array()}};
	for (const auto& t : inst.cost().outsource_tiers)
	{
		cost["outsource_tiers"].push_back({{"max_weight", t.max_weight}, {"cost", t.cost}});
	}
	j["cost"] = cost;
	j["suppliers"] = json::array();
	for (const auto& s : inst.suppliers())
	{
		j["suppliers"].push_back({{"id", s.id},
								  {"depot", {{"x", s.depot.x}, {"y", s.depot.y}}},
								  {"transfer_cost", s.transfer_cost}});
	}
	j["drones"] = json::array();
	for (const auto& d : inst.drones())
	{
		j["drones"].push_back({{"id", d.id},
							   {"owner", d.owner},
							   {"daily_range", d.daily_range},
							   {"trip_range", d.trip_range},
							   {"capacity", d.capacity},
							   {"work_hours", d.work_hours},
							   {"speed", d.speed},
							   {"initial_cost", d.initial_cost}});
	}
	j["customers"] = json::array();
	for (const auto& c : inst.customers())
	{
		j["customers"].push_back({{"id", c.id},
								  {"x", c.location.x},
								  {"y", c.location.y},
								  {"weight", c.weight},
								  {"service_time", c.service_time},
								  {"owner", c.owner}});
	}
	return j;
}

inline Instance instance_from_json(const json& j, const ReadOptions& opt = {})
{
	using detail::get;
	detail::check_keys(j, {"format", "version", "metric", "cost", "suppliers", "drones", "customers"}, "instance",
					   opt);
	detail::check_header(j, "codd-instance");
	const auto metric = metric_from_string(get<std::string>(j, "metric", "instance"));

	const auto& jc = j.at("cost");
	detail::check_keys(jc, {"routing_rate", "outsource_cost", "outsource_tiers"}, "cost", opt);
	CostParams cost;
	cost.routing_rate = get<double>(jc, "routing_rate", "cost");
	cost.outsource_cost = get<double>(jc, "outsource_cost", "cost");
	if (jc.contains("outsource_tiers"))
	{
		for (const auto& t : jc.at("outsource_tiers"))
		{
			detail::check_keys(t, {"max_weight", "cost"}, "outsource tier", opt);
			cost.outsource_tiers.push_back({get<double>(t, "max_weight", "tier"), get<double>(t, "cost", "tier")});
		}
	}

	std::vector<Supplier> suppliers;
	for (const auto& s : get<json>(j, "suppliers", "instance"))
	{
		detail::check_keys(s, {"id", "depot", "transfer_cost"}, "supplier", opt);
		const auto& dp = s.at("depot");
		detail::check_keys(dp, {"x", "y"}, "depot", opt);
		suppliers.push_back({get<std::string>(s, "id", "supplier"),
							 {get<double>(dp, "x", "depot"), get<double>(dp, "y", "depot"), metric},
							 get<double>(s, "transfer_cost", "supplier"),
							 {}});
	}
	std::vector<Drone> drones;
	for (const auto& d : get<json>(j, "drones", "instance"))
	{
		detail::check_keys(d,
						   {"id", "owner", "daily_range", "trip_range", "capacity", "work_hours", "speed",
							"initial_cost"},
						   "drone", opt);
		drones.push_back({get<std::string>(d, "id", "drone"), get<std::string>(d, "owner", "drone"),
						  get<double>(d, "daily_range", "drone"), get<double>(d, "trip_range", "drone"),
						  get<double>(d, "capacity", "drone"), get<double>(d, "work_hours", "drone"),
						  get<double>(d, "speed", "drone"), get<double>(d, "initial_cost", "drone")});
	}
	std::vector<Customer> customers;
	for (const auto& c : get<json>(j, "customers", "instance"))
	{
		detail::check_keys(c, {"id", "x", "y", "weight", "service_time", "owner"}, "customer", opt);
		customers.push_back({get<std::string>(c, "id", "customer"),
							 {get<double>(c, "x", "customer"), get<double>(c, "y", "customer"), metric},
							 get<double>(c, "weight", "customer"),
							 get<double>(c, "service_time", "customer"),
							 get<std::string>(c, "owner", "customer")});
	}
	return Instance(metric, std::move(suppliers), std::move(customers), std::move(drones), std::move(cost));
}

inline std::string_view to_string(SolveStatus s)
{
	return s == SolveStatus::optimal ? "optimal" : "budget_exhausted";
}

inline json to_json(const DeliveryPlan& plan)
{
	auto j = detail::header("codd-plan");
	j["coalition"] = plan.coalition;
	j["status"] = to_string(plan.status);
	j["lower_bound"] = plan.lower_bound;
	j["used_drones"] = plan.used_drones;
	j["trips"] = json::array();
	for (const auto& t : plan.trips)
	{
		j["trips"].push_back({{"drone", t.drone},
							  {"customer", t.customer},
							  {"from", t.from},
							  {"to", t.to},
							  {"length", t.length},
							  {"duration", t.duration}});
	}
	j["outsourced"] = plan.outsourced;
	j["transfers"] = json::array();
	for (const auto& m : plan.transfers)
	{
		j["transfers"].push_back({{"customer", m.customer}, {"from", m.from}, {"to", m.to}});
	}
	j["transfer_payers"] = plan.transfer_payers;
	j["same_depot_flags"] = json::array();
	for (const auto& b : plan.same_depot_flags)
	{
		j["same_depot_flags"].push_back({{"depot", b.depot}, {"drone", b.drone}});
	}
	j["cost"] = {{"initial", plan.cost.initial},
				 {"routing", plan.cost.routing},
				 {"transfer", plan.cost.transfer},
				 {"outsource", plan.cost.outsource},
				 {"total", plan.cost.total}};
	return j;
}

inline DeliveryPlan plan_from_json(const json& j, const ReadOptions& opt = {})
{
	using detail::get;
	detail::check_keys(j,
					   {"format", "version", "coalition", "status", "lower_bound", "used_drones", "trips",
						"outsourced", "transfers", "transfer_payers", "same_depot_flags", "cost"},
					   "plan", opt);
	detail::check_header(j, "codd-plan");
	DeliveryPlan p;
	p.coalition = get<std::vector<std::string>>(j, "coalition", "plan");
	const auto status = get<std::string>(j, "status", "plan");
	if (status == "optimal")
	{
		p.status = SolveStatus::optimal;
	}
	else if (status == "budget_exhausted")
	{
		p.status = SolveStatus::budget_exhausted;
	}
	else
	{
		throw parse_error(0, "plan: unknown status '" + status + "'");
	}
	p.lower_bound = get<double>(j, "lower_bound", "plan");
	p.used_drones = get<std::vector<std::string>>(j, "used_drones", "plan");
	for (const auto& t : get<json>(j, "trips", "plan"))
	{
		detail::check_keys(t, {"drone", "customer", "from", "to", "length", "duration"}, "trip", opt);
		p.trips.push_back({get<std::string>(t, "drone", "trip"), get<std::string>(t, "customer", "trip"),
						   get<std::string>(t, "from", "trip"), get<std::string>(t, "to", "trip"),
						   get<double>(t, "length", "trip"), get<double>(t, "duration", "trip")});
	}
	p.outsourced = get<std::vector<std::string>>(j, "outsourced", "plan");
	for (const auto& m : get<json>(j, "transfers", "plan"))
	{
		detail::check_keys(m, {"customer", "from", "to"}, "transfer", opt);
		p.transfers.push_back({get<std::string>(m, "customer", "transfer"), get<std::string>(m, "from", "transfer"),
							   get<std::string>(m, "to", "transfer")});
	}
	p.transfer_payers = get<std::vector<std::string>>(j, "transfer_payers", "plan");
	for (const auto& b : get<json>(j, "same_depot_flags", "plan"))
	{
		detail::check_keys(b, {"depot", "drone"}, "same-depot flag", opt);
		p.same_depot_flags.push_back({get<std::string>(b, "depot", "flag"), get<std::string>(b, "drone", "flag")});
	}
	const auto& c = get<json>(j, "cost", "plan");
	detail::check_keys(c, {"initial", "routing", "transfer", "outsource", "total"}, "cost", opt);
	p.cost = {get<double>(c, "initial", "cost"), get<double>(c, "routing", "cost"), get<double>(c, "transfer", "cost"),
			  get<double>(c, "outsource", "cost"), get<double>(c, "total", "cost")};
	return p;
}

inline json to_json(const Allocation& a)
{
	auto j = detail::header("codd-allocation");
	j["coalition"] = a.coalition;
	j["value"] = a.value;
	j["shares"] = json::array();
	for (const auto& s : a.shares)
	{
		j["shares"].push_back({{"supplier", s.supplier}, {"share", s.amount}});
	}
	return j;
}

inline Allocation allocation_from_json(const json& j, const ReadOptions& opt = {})
{
	using detail::get;
	detail::check_keys(j, {"format", "version", "coalition", "value", "shares"}, "allocation", opt);
	detail::check_header(j, "codd-allocation");
	Allocation a;
	a.coalition = get<std::vector<std::string>>(j, "coalition", "allocation");
	a.value = get<double>(j, "value", "allocation");
	for (const auto& s : get<json>(j, "shares", "allocation"))
	{
		detail::check_keys(s, {"supplier", "share"}, "share", opt);
		a.shares.push_back({get<std::string>(s, "supplier", "share"), get<double>(s, "share", "share")});
	}
	return a;
}

namespace detail {

inline json structure_json(const CoalitionStructure& s, const Instance& inst)
{
	json out = json::array();
	for (auto c : s.coalitions())
	{
		out.push_back(c.ids(inst));
	}
	return out;
}

inline CoalitionStructure structure_from(const json& j, const Instance& inst)
{
	std::vector<Coalition> blocks;
	for (const auto& c : j)
	{
		blocks.push_back(Coalition::of(inst, c.get<std::vector<std::string>>()));
	}
	return CoalitionStructure(std::move(blocks));
}

} // namespace detail

/// Formation audit trail: final structure, history sets and every move.
inline json to_json(const FormationState& state, const Instance& inst)
{
	auto j = detail::header("codd-trace");
	j["final"] = detail::structure_json(state.current, inst);
	j["history"] = json::object();
	for (std::size_t p = 0; p < state.history.size(); ++p)
	{
		json h = json::array();
		for (auto c : state.history[p])
		{
			h.push_back(c.ids(inst));
		}
		j["history"][inst.suppliers()[p].id] = h;
	}
	j["moves"] = json::array();
	for (const auto& m : state.log)
	{
		j["moves"].push_back({{"iteration", m.iteration},
							  {"mover", inst.suppliers()[m.mover].id},
							  {"from", m.from.ids(inst)},
							  {"to", m.to.ids(inst)},
							  {"old_share", m.old_share},
							  {"new_share", m.new_share},
							  {"before", detail::structure_json(m.before, inst)},
							  {"after", detail::structure_json(m.after, inst)}});
	}
	return j;
}

inline FormationState trace_from_json(const json& j, const Instance& inst, const ReadOptions& opt = {})
{
	using detail::get;
	detail::check_keys(j, {"format", "version", "final", "history", "moves"}, "trace", opt);
	detail::check_header(j, "codd-trace");
	FormationState s;
	s.current = detail::structure_from(get<json>(j, "final", "trace"), inst);
	s.history.assign(inst.supplier_count(), {});
	const auto history = get<json>(j, "history", "trace");
	for (const auto& [id, list] : history.items())
	{
		auto p = inst.supplier_index(id);
		if (!p)
		{
			throw parse_error(0, "trace: unknown supplier '" + id + "'");
		}
		for (const auto& c : list)
		{
			s.history[*p].push_back(Coalition::of(inst, c.get<std::vector<std::string>>()));
		}
	}
	for (const auto& m : get<json>(j, "moves", "trace"))
	{
		detail::check_keys(m, {"iteration", "mover", "from", "to", "old_share", "new_share", "before", "after"},
						   "move", opt);
		MoveRecord r;
		r.iteration = get<std::size_t>(m, "iteration", "move");
		auto p = inst.supplier_index(get<std::string>(m, "mover", "move"));
		if (!p)
		{
			throw parse_error(0, "trace: unknown mover");
		}
		r.mover = *p;
		r.from = Coalition::of(inst, get<std::vector<std::string>>(m, "from", "move"));
		r.to = Coalition::of(inst, get<std::vector<std::string>>(m, "to", "move"));
		r.old_share = get<double>(m, "old_share", "move");
		r.new_share = get<double>(m, "new_share", "move");
		r.before = detail::structure_from(get<json>(m, "before", "move"), inst);
		r.after = detail::structure_from(get<json>(m, "after", "move"), inst);
		s.log.push_back(std::move(r));
	}
	return s;
}

/// Canonical text form of a document: two-space indent, newline-terminated.
inline std::string dump(const json& j)
{
	return j.dump(2) + "\n";
}

inline json load_json(const std::string& path)
{
	const auto text = read_text(path);
	try
	{
		return json::parse(text);
	}
	catch (const json::parse_error& e)
	{
		throw parse_error(0, path + ": " + e.what());
	}
}

inline Instance load_instance(const std::string& path, const ReadOptions& opt = {})
{
	return instance_from_json(load_json(path), opt);
}

inline DeliveryPlan load_plan(const std::string& path, const ReadOptions& opt = {})
{
	return plan_from_json(load_json(path), opt);
}

inline Allocation load_allocation(const std::string& path, const ReadOptions& opt = {})
{
	return allocation_from_json(load_json(path), opt);
}

inline void save_instance(const std::string& path, const Instance& inst)
{
	write_text(path, dump(to_json(inst)));
}

inline void save_plan(const std::string& path, const DeliveryPlan& plan)
{
	write_text(path, dump(to_json(plan)));
}

inline void save_allocation(const std::string& path, const Allocation& a)
{
	write_text(path, dump(to_json(a)));
}

// ------------------------------------------------------- plan exports

namespace detail {

inline std::string fmt_full(double v)
{
	std::ostringstream ss;
	ss << std::setprecision(17) << v;
	return ss.str();
}

} // namespace detail

/// One trip per row.
inline std::string plan_to_csv(const DeliveryPlan& plan, const PoolInstance& pool)
{
	std::string out = "drone,customer,from,to,length_km,duration_h,routing_cost\n";
	for (const auto& t : plan.trips)
	{
		auto i = pool.customer_index(t.customer);
		auto p = pool.depot_index(t.from);
		auto q = pool.depot_index(t.to);
		if (!i || !p || !q)
		{
			throw invalid_input("plan_to_csv: trip references ids outside the pool");
		}
		out += t.drone + "," + t.customer + "," + t.from + "," + t.to + "," + detail::fmt_full(t.length) + ","
			+ detail::fmt_full(t.duration) + "," + detail::fmt_full(pool.trip_routing(*i, *p, *q)) + "\n";
	}
	return out;
}

/// Each trip as a LineString depot -> customer -> depot. Planar
/// coordinates are emitted as [x, y]; geodesic ones as [lon, lat].
inline json plan_to_geojson(const DeliveryPlan& plan, const PoolInstance& pool)
{
	auto point = [&](const Location& l) {
		return l.metric == Metric::geodesic ? json::array({l.y, l.x}) : json::array({l.x, l.y});
	};
	json fc{{"type", "FeatureCollection"}, {"features", json::array()}};
	for (const auto& t : plan.trips)
	{
		auto i = pool.customer_index(t.customer);
		auto p = pool.depot_index(t.from);
		auto q = pool.depot_index(t.to);
		if (!i || !p || !q)
		{
			throw invalid_input("plan_to_geojson: trip references ids outside the pool");
		}
		fc["features"].push_back(
			{{"type", "Feature"},
			 {"geometry",
			  {{"type", "LineString"},
			   {"coordinates",
				json::array({point(pool.depots[*p]), point(pool.customers[*i].location), point(pool.depots[*q])})}}},
			 {"properties", {{"drone", t.drone}, {"customer", t.customer}, {"from", t.from}, {"to", t.to}}}});
	}
	return fc;
}

} // namespace codd
