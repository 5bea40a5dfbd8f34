#pragma once

#include <codd/codd.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace codd::cli {

enum ExitCode : int
{
	ok = 0,
	usage = 1,
	validation_failed = 2,
	budget_exhausted = 3,
};

class usage_error : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

struct SolverFlags
{
	std::string mode = "bnb";
	std::uint64_t option_cap = 1'000'000;
	std::optional<std::uint64_t> time_budget_ms;
	std::optional<std::uint64_t> node_limit;
	std::string daily_limit_scope = "per-drone";
	std::size_t depot_cap = 3;
	bool no_depot_cap = false;
	bool no_transfers = false;
	unsigned threads = 1;

	void attach(CLI::App& app)
	{
		app.add_option("--mode", mode, "Solver: bnb or exhaustive")
			->check(CLI::IsMember({"bnb", "exhaustive"}))
			->capture_default_str();
		app.add_option("--option-cap", option_cap, "Max option combinations for exhaustive mode")
			->capture_default_str();
		app.add_option("--time-budget", time_budget_ms, "Wall-clock budget per solve, milliseconds");
		app.add_option("--node-limit", node_limit, "Branch-and-bound node budget per solve");
		app.add_option("--daily-limit-scope", daily_limit_scope, "Daily range limit: per-drone or per-depot")
			->check(CLI::IsMember({"per-drone", "per-depot"}))
			->capture_default_str();
		auto* cap = app.add_option("--depot-cap", depot_cap, "Max distinct depots one drone may touch")
						->capture_default_str();
		app.add_flag("--no-depot-cap", no_depot_cap, "Drop the per-depot departure cap")->excludes(cap);
		app.add_flag("--no-transfers", no_transfers, "Forbid package transfers between depots");
		app.add_option("--threads", threads, "Parallel subset solves")->check(CLI::Range(1u, 256u));
	}

	SolverConfig config() const
	{
		SolverConfig c;
		c.mode = mode == "exhaustive" ? SolveMode::exhaustive : SolveMode::branch_and_bound;
		c.option_cap = option_cap;
		if (time_budget_ms)
		{
			c.time_budget = std::chrono::milliseconds(*time_budget_ms);
		}
		c.node_limit = node_limit;
		c.daily_limit_scope = daily_limit_scope == "per-depot" ? DailyLimitScope::per_depot : DailyLimitScope::per_drone;
		c.depot_visit_cap = no_depot_cap ? std::nullopt : std::optional<std::size_t>(depot_cap);
		c.transfers_enabled = !no_transfers;
		return c;
	}
};

/// "p1,p3" -> coalition; empty spec means every supplier.
inline Coalition parse_coalition(const Instance& inst, const std::optional<std::string>& spec)
{
	if (!spec)
	{
		return Coalition::all(inst.supplier_count());
	}
	std::vector<std::string> ids;
	std::stringstream ss(*spec);
	for (std::string id; std::getline(ss, id, ',');)
	{
		id.erase(0, id.find_first_not_of(" \t"));
		id.erase(id.find_last_not_of(" \t") + 1);
		if (id.empty())
		{
			throw usage_error("empty supplier id in coalition '" + *spec + "'");
		}
		ids.push_back(id);
	}
	if (ids.empty())
	{
		throw usage_error("coalition must name at least one supplier");
	}
	try
	{
		return Coalition::of(inst, ids);
	}
	catch (const invalid_input& e)
	{
		throw usage_error(e.what());
	}
}

/// "p1,p3;p2;p4" -> structure over the named suppliers.
inline CoalitionStructure parse_structure(const Instance& inst, const std::string& spec)
{
	std::vector<Coalition> blocks;
	std::stringstream ss(spec);
	for (std::string part; std::getline(ss, part, ';');)
	{
		blocks.push_back(parse_coalition(inst, part));
	}
	try
	{
		return CoalitionStructure(std::move(blocks));
	}
	catch (const invalid_input& e)
	{
		throw usage_error(e.what());
	}
}

namespace detail {

struct Output
{
	std::optional<std::string> path;
	std::ostream& out;

	void write(const std::string& text) const
	{
		if (path)
		{
			write_text(*path, text);
		}
		else
		{
			out << text;
		}
	}
};

inline ReadOptions read_options(bool lenient, std::vector<std::string>& warnings)
{
	return {lenient ? Strictness::lenient : Strictness::strict, &warnings};
}

inline void flush_warnings(std::vector<std::string>& warnings, std::ostream& err)
{
	for (const auto& w : warnings)
	{
		err << "warning: " << w << "\n";
	}
	warnings.clear();
}

inline json formation_json(const Instance& inst, const FormationResult& r, const std::vector<StructureRow>* matrix)
{
	json j = codd::detail::header("codd-formation");
	j["stable"] = json::array();
	for (auto c : r.stable.coalitions())
	{
		j["stable"].push_back(c.ids(inst));
	}
	j["allocations"] = json::array();
	for (const auto& a : r.allocations)
	{
		j["allocations"].push_back(to_json(a));
	}
	j["trace"] = to_json(r.state, inst);
	if (matrix)
	{
		j["matrix"] = json::array();
		for (const auto& row : *matrix)
		{
			json structure = json::array();
			for (auto c : row.structure.coalitions())
			{
				structure.push_back(c.ids(inst));
			}
			json shares = json::object();
			for (std::size_t p = 0; p < row.shares.size(); ++p)
			{
				shares[inst.suppliers()[p].id] = row.shares[p];
			}
			j["matrix"].push_back({{"structure", structure}, {"shares", shares}, {"total", row.total}});
		}
	}
	return j;
}

} // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
	CLI::App app{"Cooperative drone delivery planner: plans, cost shares and stable supplier coalitions."};
	app.require_subcommand(1);
	app.set_help_all_flag("--help-all", "Show help for every subcommand");

	bool lenient = false;
	app.add_flag("--lenient", lenient, "Warn about unknown JSON fields instead of rejecting them");

	// convert
	auto* convert = app.add_subcommand("convert", "Build an instance from a Solomon benchmark file");
	std::string solomon_path;
	SynthesisParams synth;
	double initial_cost = synth.drone_template.initial_cost;
	std::vector<std::string> depot_specs;
	std::optional<std::string> convert_out;
	convert->add_option("solomon", solomon_path, "Solomon text file")->required()->check(CLI::ExistingFile);
	convert->add_option("--suppliers", synth.suppliers, "Number of suppliers")->capture_default_str();
	convert->add_option("--customers", synth.customers, "Customers taken in file order")->capture_default_str();
	convert->add_option("--depot", depot_specs, "Depot as id:x,y (repeat once per supplier)");
	convert->add_option("--initial-cost", initial_cost, "Drone initial cost")->capture_default_str();
	convert->add_option("--trip-range", synth.drone_template.trip_range, "Drone range per trip, km")
		->capture_default_str();
	convert->add_option("--daily-range", synth.drone_template.daily_range, "Drone range per day, km")
		->capture_default_str();
	convert->add_option("--capacity", synth.drone_template.capacity, "Drone capacity, kg")->capture_default_str();
	convert->add_option("--work-hours", synth.drone_template.work_hours, "Drone working hours")
		->capture_default_str();
	convert->add_option("--speed", synth.drone_template.speed, "Drone speed, km/h")->capture_default_str();
	convert->add_option("--transfer-cost", synth.transfer_cost, "Transfer charge per supplier")
		->capture_default_str();
	convert->add_option("--outsource-cost", synth.cost.outsource_cost, "Carrier price per package")
		->capture_default_str();
	convert->add_option("--routing-rate", synth.cost.routing_rate, "Routing cost per km")->capture_default_str();
	convert->add_option("--weight", synth.weight, "Package weight, kg")->capture_default_str();
	convert->add_option("--service-time", synth.service_time, "Loading time per package, seconds")
		->capture_default_str();
	convert->add_flag("--weights-from-demand", synth.weights_from_demand, "Use the demand column as weight");
	convert->add_option("-o,--output", convert_out, "Instance JSON path (default stdout)");

	// solve
	auto* solve_cmd = app.add_subcommand("solve", "Optimal delivery plan for one coalition");
	std::string instance_path;
	std::optional<std::string> coalition_spec;
	std::string format = "table";
	std::optional<std::string> output_path;
	std::optional<std::string> plan_path;
	SolverFlags solver;
	solve_cmd->add_option("instance", instance_path, "Instance JSON")->required()->check(CLI::ExistingFile);
	solve_cmd->add_option("--coalition", coalition_spec, "Comma-separated supplier ids (default all)");
	solve_cmd->add_option("--format", format, "table, json, csv or geojson")
		->check(CLI::IsMember({"table", "json", "csv", "geojson"}))
		->capture_default_str();
	solve_cmd->add_option("-o,--output", output_path, "Write the report here instead of stdout");
	solve_cmd->add_option("--plan", plan_path, "Also write the plan JSON here");
	solver.attach(*solve_cmd);

	// shapley
	auto* shapley_cmd = app.add_subcommand("shapley", "Shapley cost shares within one coalition");
	bool allow_approximate = false;
	shapley_cmd->add_option("instance", instance_path, "Instance JSON")->required()->check(CLI::ExistingFile);
	shapley_cmd->add_option("--coalition", coalition_spec, "Comma-separated supplier ids (default all)");
	shapley_cmd->add_option("--format", format, "table or json")
		->check(CLI::IsMember({"table", "json"}))
		->capture_default_str();
	shapley_cmd->add_option("-o,--output", output_path, "Write the report here instead of stdout");
	shapley_cmd->add_flag("--allow-approximate", allow_approximate,
						  "Accept characteristic values that are not proven optimal");
	solver.attach(*shapley_cmd);

	// form
	auto* form = app.add_subcommand("form", "Stable coalition structure by merge-and-split");
	bool exhaustive = false;
	std::optional<std::size_t> iteration_cap;
	std::optional<std::string> trace_path;
	form->add_option("instance", instance_path, "Instance JSON")->required()->check(CLI::ExistingFile);
	form->add_flag("--exhaustive", exhaustive, "Also print shares under every coalition structure");
	form->add_option("--iteration-cap", iteration_cap, "Max accepted moves (default 10 * Bell(n))");
	form->add_option("--trace", trace_path, "Write the formation trace JSON here");
	form->add_option("--format", format, "table or json")
		->check(CLI::IsMember({"table", "json"}))
		->capture_default_str();
	form->add_option("-o,--output", output_path, "Write the report here instead of stdout");
	form->add_flag("--allow-approximate", allow_approximate,
				   "Accept characteristic values that are not proven optimal");
	solver.attach(*form);

	// validate
	auto* validate_cmd = app.add_subcommand("validate", "Check a plan against every model constraint");
	std::string plan_in;
	validate_cmd->add_option("plan", plan_in, "Plan JSON")->required()->check(CLI::ExistingFile);
	validate_cmd->add_option("instance", instance_path, "Instance JSON")->required()->check(CLI::ExistingFile);
	validate_cmd->add_option("--format", format, "table or json")
		->check(CLI::IsMember({"table", "json"}))
		->capture_default_str();
	solver.attach(*validate_cmd);

	// report
	auto* report_cmd = app.add_subcommand("report", "Share matrix, stable structure and plan checks in one run");
	std::optional<std::string> structure_spec;
	report_cmd->add_option("instance", instance_path, "Instance JSON")->required()->check(CLI::ExistingFile);
	report_cmd->add_option("--structure", structure_spec, "Also report this structure, e.g. \"p1,p3;p2;p4\"");
	report_cmd->add_option("-o,--output", output_path, "Write the report here instead of stdout");
	solver.attach(*report_cmd);

	std::reverse(args.begin(), args.end());
	try
	{
		app.parse(args);
	}
	catch (const CLI::CallForHelp&)
	{
		out << app.help();
		return ok;
	}
	catch (const CLI::CallForAllHelp&)
	{
		out << app.help("", CLI::AppFormatMode::All);
		return ok;
	}
	catch (const CLI::ParseError& e)
	{
		err << "error: " << e.what() << "\n";
		return usage;
	}

	std::vector<std::string> warnings;
	const auto read_opt = detail::read_options(lenient, warnings);
	const detail::Output sink{output_path, out};

	try
	{
		if (convert->parsed())
		{
			synth.drone_template.initial_cost = initial_cost;
			for (const auto& d : depot_specs)
			{
				const auto colon = d.find(':');
				const auto comma = d.find(',', colon == std::string::npos ? 0 : colon);
				if (colon == std::string::npos || comma == std::string::npos)
				{
					throw usage_error("depot '" + d + "' is not of the form id:x,y");
				}
				try
				{
					synth.depots.push_back({d.substr(0, colon),
											{std::stod(d.substr(colon + 1, comma - colon - 1)),
											 std::stod(d.substr(comma + 1)), Metric::planar}});
				}
				catch (const std::logic_error&)
				{
					throw usage_error("depot '" + d + "' has non-numeric coordinates");
				}
			}
			const auto inst = synthesize(parse_solomon(read_text(solomon_path)), synth);
			detail::Output{convert_out, out}.write(dump(to_json(inst)));
			return ok;
		}

		const auto inst = load_instance(instance_path, read_opt);
		detail::flush_warnings(warnings, err);
		const auto config = solver.config();

		if (solve_cmd->parsed())
		{
			const auto coalition = parse_coalition(inst, coalition_spec);
			const auto pool = build_pool(inst, coalition);
			const auto plan = solve(pool, config);
			if (plan_path)
			{
				save_plan(*plan_path, plan);
			}
			if (format == "table")
			{
				sink.write(format_breakdown(plan));
			}
			else if (format == "json")
			{
				sink.write(dump(to_json(plan)));
			}
			else if (format == "csv")
			{
				sink.write(plan_to_csv(plan, pool));
			}
			else
			{
				sink.write(dump(plan_to_geojson(plan, pool)));
			}
			if (plan.status == SolveStatus::budget_exhausted)
			{
				err << "solver budget exhausted: incumbent " << plan.cost.total << ", lower bound "
					<< plan.lower_bound << "\n";
				return budget_exhausted;
			}
			return ok;
		}

		if (shapley_cmd->parsed())
		{
			const auto coalition = parse_coalition(inst, coalition_spec);
			CharacteristicCache cache;
			evaluate_subsets(inst, coalition, cache, config, solver.threads);
			const auto a = shapley(inst, coalition, cache, allow_approximate);
			sink.write(format == "json" ? dump(to_json(a)) : format_allocation(a));
			return ok;
		}

		if (form->parsed())
		{
			CharacteristicCache cache;
			ShareBook book(inst, config, cache, solver.threads, allow_approximate);
			FormationOptions fo;
			fo.iteration_cap = iteration_cap;
			const auto r = stabilize(book, fo);
			if (trace_path)
			{
				write_text(*trace_path, dump(to_json(r.state, inst)));
			}
			std::optional<std::vector<StructureRow>> matrix;
			if (exhaustive)
			{
				matrix = share_matrix(book, 8);
			}
			if (format == "json")
			{
				sink.write(dump(detail::formation_json(inst, r, matrix ? &*matrix : nullptr)));
				return ok;
			}
			std::string text = "stable " + r.stable.label(inst) + " after " + std::to_string(r.state.log.size())
				+ " move(s)\n";
			for (const auto& a : r.allocations)
			{
				text += "\n" + format_allocation(a);
			}
			if (matrix)
			{
				text += "\n" + format_share_matrix(inst, *matrix, &r.stable);
			}
			sink.write(text);
			return ok;
		}

		if (validate_cmd->parsed())
		{
			const auto plan = load_plan(plan_in, read_opt);
			detail::flush_warnings(warnings, err);
			std::vector<std::string> ids = plan.coalition;
			const auto pool = build_pool(inst, ids);
			const auto violations = validate(plan, pool, config);
			if (format == "json")
			{
				json j = json::array();
				for (const auto& v : violations)
				{
					j.push_back({{"constraint", v.constraint}, {"where", v.where}, {"slack", v.slack},
								 {"fatal", v.fatal}});
				}
				out << dump(j);
			}
			else if (violations.empty())
			{
				out << "plan is valid\n";
			}
			else
			{
				for (const auto& v : violations)
				{
					out << (v.fatal ? "violation " : "warning   ") << "(" << v.constraint << ") " << v.where
						<< " by " << v.slack << "\n";
				}
			}
			return has_fatal(violations) ? validation_failed : ok;
		}

		if (report_cmd->parsed())
		{
			CharacteristicCache cache;
			ShareBook book(inst, config, cache, solver.threads);
			const auto r = stabilize(book);
			const auto rows = share_matrix(book, 8);
			std::string text = format_share_matrix(inst, rows, &r.stable);
			bool clean = true;

			text += "\nstable " + r.stable.label(inst) + "\n";
			if (structure_spec)
			{
				const auto phi = parse_structure(inst, *structure_spec);
				if (phi.cover() != Coalition::all(inst.supplier_count()))
				{
					throw usage_error("structure must cover every supplier");
				}
				auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& row) { return row.structure == phi; });
				if (it != rows.end())
				{
					text += "requested " + phi.label(inst) + " total " + codd::detail::fixed(it->total) + "\n";
				}
			}

			std::size_t invalid = 0;
			for (std::uint64_t m = 1; m < Coalition::all(inst.supplier_count()).bits() + 1; ++m)
			{
				const Coalition c(m);
				const auto e = cache.find(c);
				if (!e)
				{
					continue;
				}
				if (has_fatal(validate(e->plan, build_pool(inst, c), config)))
				{
					++invalid;
				}
			}
			text += "plans validated " + std::to_string(cache.size()) + ", with violations "
				+ std::to_string(invalid) + "\n";
			clean = clean && invalid == 0;

			double singles = 0;
			for (std::size_t p = 0; p < inst.supplier_count(); ++p)
			{
				singles += cache.find(Coalition::singleton(p))->value;
			}
			const double grand = cache.find(Coalition::all(inst.supplier_count()))->value;
			const bool subadditive = grand <= singles + kTolerance;
			text += "grand coalition " + codd::detail::fixed(grand) + " vs singletons "
				+ codd::detail::fixed(singles) + (subadditive ? " ok" : " FAILED") + "\n";
			clean = clean && subadditive;

			double worst = 0;
			for (const auto& a : r.allocations)
			{
				worst = std::max(worst, std::abs(a.total() - a.value));
			}
			const bool efficient = worst <= 1e-6;
			text += "efficiency gap " + std::to_string(worst) + (efficient ? " ok" : " FAILED") + "\n";
			clean = clean && efficient;

			sink.write(text);
			return clean ? ok : validation_failed;
		}
	}
	catch (const usage_error& e)
	{
		err << "error: " << e.what() << "\n";
		return usage;
	}
	catch (const formation_error& e)
	{
		err << "error: " << e.what() << "\n";
		return budget_exhausted;
	}
	catch (const approximate_value& e)
	{
		err << "error: " << e.what() << " (pass --allow-approximate to use it anyway)\n";
		return budget_exhausted;
	}
	catch (const std::exception& e)
	{
		detail::flush_warnings(warnings, err);
		err << "error: " << e.what() << "\n";
		return usage;
	}
	return usage;
}

} // namespace codd::cli
