#pragma once

#include <codd/formation.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace codd {

namespace detail {

inline std::string fixed(double v, int digits = 2)
{
	// Avoid printing "-0.00".
	if (std::abs(v) < 0.5 * std::pow(10.0, -digits))
	{
		v = 0;
	}
	char buf[64];
	std::snprintf(buf, sizeof buf, "%.*f", digits, v);
	return buf;
}

inline std::string pad(std::string s, std::size_t width, bool left = false)
{
	if (s.size() >= width)
	{
		return s;
	}
	const std::string fill(width - s.size(), ' ');
	return left ? s + fill : fill + s;
}

} // namespace detail

/// One row per coalition structure with every supplier's share and the
/// structure's total. The row equal to `stable` is marked with '*'.
inline std::string format_share_matrix(const Instance& inst, const std::vector<StructureRow>& rows,
									   const CoalitionStructure* stable = nullptr)
{
	std::vector<std::string> labels;
	std::size_t label_width = 9;
	for (std::size_t k = 0; k < rows.size(); ++k)
	{
		auto l = "Phi_" + std::to_string(k + 1) + " = " + rows[k].structure.label(inst);
		label_width = std::max(label_width, l.size() + 2);
		labels.push_back(std::move(l));
	}
	const std::size_t col = 10;
	std::string out = detail::pad("Structure", label_width, true);
	for (const auto& s : inst.suppliers())
	{
		out += detail::pad(s.id, col);
	}
	out += detail::pad("Total", col) + "\n";
	for (std::size_t k = 0; k < rows.size(); ++k)
	{
		const bool mark = stable && rows[k].structure == *stable;
		out += detail::pad((mark ? "* " : "  ") + labels[k], label_width, true);
		for (double v : rows[k].shares)
		{
			out += detail::pad(detail::fixed(v), col);
		}
		out += detail::pad(detail::fixed(rows[k].total), col) + "\n";
	}
	return out;
}

inline std::string format_breakdown(const DeliveryPlan& plan)
{
	const auto& c = plan.cost;
	std::string out;
	out += "coalition  {";
	for (std::size_t k = 0; k < plan.coalition.size(); ++k)
	{
		out += (k ? "," : "") + plan.coalition[k];
	}
	out += "}\n";
	out += "status     " + std::string(plan.status == SolveStatus::optimal ? "optimal" : "budget exhausted") + "\n";
	out += "initial    " + detail::fixed(c.initial, 6) + "\n";
	out += "routing    " + detail::fixed(c.routing, 6) + "\n";
	out += "transfer   " + detail::fixed(c.transfer, 6) + "\n";
	out += "outsource  " + detail::fixed(c.outsource, 6) + "\n";
	out += "total      " + detail::fixed(c.total, 6) + "\n";
	if (plan.status != SolveStatus::optimal)
	{
		out += "bound      " + detail::fixed(plan.lower_bound, 6) + "\n";
	}
	out += "trips      " + std::to_string(plan.trips.size()) + "\n";
	for (const auto& t : plan.trips)
	{
		out += "  " + t.drone + ": " + t.from + " -> " + t.customer + " -> " + t.to + "  "
			+ detail::fixed(t.length, 3) + " km\n";
	}
	out += "outsourced " + std::to_string(plan.outsourced.size());
	for (const auto& id : plan.outsourced)
	{
		out += " " + id;
	}
	out += "\n";
	return out;
}

inline std::string format_allocation(const Allocation& a)
{
	std::string out;
	for (const auto& s : a.shares)
	{
		out += detail::pad(s.supplier, 6, true) + detail::pad(detail::fixed(s.amount, 6), 14) + "\n";
	}
	out += detail::pad("V", 6, true) + detail::pad(detail::fixed(a.value, 6), 14) + "\n";
	return out;
}

} // namespace codd
