#pragma once

#include <codd/allocation.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace codd {

/// Bell number via the Bell triangle. Defined for n <= 25 (fits 64 bits).
inline std::uint64_t bell_count(std::size_t n)
{
	if (n > 25)
	{
		throw invalid_input("bell_count: n > 25 overflows 64 bits");
	}
	std::vector<std::uint64_t> row{1};
	for (std::size_t i = 1; i <= n; ++i)
	{
		std::vector<std::uint64_t> next{row.back()};
		for (auto x : row)
		{
			next.push_back(next.back() + x);
		}
		row = std::move(next);
	}
	return row.front();
}

/// A partition of the suppliers into non-empty, pairwise disjoint coalitions.
///
/// Coalitions are kept in canonical order: larger first, then by member
/// list. Structures compare by their sorted block sizes, then by the
/// member lists, which lists all-singletons first and the grand coalition last.
class CoalitionStructure
{
public:
	CoalitionStructure() = default;

	explicit CoalitionStructure(std::vector<Coalition> blocks) : blocks_(std::move(blocks))
	{
		Coalition seen;
		for (auto b : blocks_)
		{
			if (b.empty())
			{
				throw invalid_input("coalition structure with an empty coalition");
			}
			if (!b.disjoint(seen))
			{
				throw invalid_input("coalition structure with overlapping coalitions");
			}
			seen = seen | b;
		}
		std::sort(blocks_.begin(), blocks_.end(), block_less);
	}

	static CoalitionStructure singletons(std::size_t n)
	{
		std::vector<Coalition> b;
		for (std::size_t p = 0; p < n; ++p)
		{
			b.push_back(Coalition::singleton(p));
		}
		return CoalitionStructure(std::move(b));
	}

	static CoalitionStructure grand(std::size_t n)
	{
		return n == 0 ? CoalitionStructure() : CoalitionStructure({Coalition::all(n)});
	}

	const std::vector<Coalition>& coalitions() const noexcept { return blocks_; }

	Coalition cover() const
	{
		Coalition c;
		for (auto b : blocks_)
		{
			c = c | b;
		}
		return c;
	}

	Coalition coalition_of(std::size_t p) const
	{
		for (auto b : blocks_)
		{
			if (b.contains(p))
			{
				return b;
			}
		}
		throw invalid_input("supplier not covered by coalition structure");
	}

	/// "{{p1,p2},{p3}}"
	std::string label(const Instance& inst) const
	{
		std::string s = "{";
		for (std::size_t k = 0; k < blocks_.size(); ++k)
		{
			s += (k ? ",{" : "{") + blocks_[k].label(inst) + "}";
		}
		return s + "}";
	}

	friend bool operator==(const CoalitionStructure&, const CoalitionStructure&) = default;

	friend bool operator<(const CoalitionStructure& a, const CoalitionStructure& b)
	{
		auto sizes = [](const CoalitionStructure& s) {
			std::vector<std::size_t> v;
			for (auto c : s.blocks_)
			{
				v.push_back(c.size());
			}
			return v;
		};
		const auto sa = sizes(a);
		const auto sb = sizes(b);
		if (sa != sb)
		{
			return sa < sb;
		}
		return std::lexicographical_compare(a.blocks_.begin(), a.blocks_.end(), b.blocks_.begin(), b.blocks_.end(),
											block_less);
	}

private:
	static bool block_less(Coalition a, Coalition b)
	{
		if (a.size() != b.size())
		{
			return a.size() > b.size();
		}
		return a.members() < b.members();
	}

	std::vector<Coalition> blocks_;
};

/// Every partition of suppliers 0..n-1, in canonical order.
inline std::vector<CoalitionStructure> enumerate_structures(std::size_t n, std::size_t cap = 6)
{
	if (n > cap)
	{
		throw invalid_input("enumerate_structures: " + std::to_string(n) + " suppliers exceeds the cap of "
							+ std::to_string(cap));
	}
	std::vector<CoalitionStructure> out;
	if (n == 0)
	{
		out.emplace_back();
		return out;
	}
	// Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
	std::vector<std::size_t> a(n, 0);
	while (true)
	{
		std::vector<Coalition> blocks;
		for (std::size_t i = 0; i < n; ++i)
		{
			if (a[i] >= blocks.size())
			{
				blocks.resize(a[i] + 1);
			}
			blocks[a[i]] = blocks[a[i]].with(i);
		}
		out.emplace_back(std::move(blocks));

		std::size_t i = n;
		while (--i > 0)
		{
			const auto prefix_max = *std::max_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(i));
			if (a[i] <= prefix_max)
			{
				++a[i];
				std::fill(a.begin() + static_cast<std::ptrdiff_t>(i) + 1, a.end(), 0);
				break;
			}
		}
		if (i == 0)
		{
			break;
		}
	}
	std::sort(out.begin(), out.end());
	return out;
}

/// A neighbor structure and the suppliers whose single move produces it.
struct NeighborMove
{
	CoalitionStructure structure;
	std::vector<std::size_t> movers;  ///< ascending
};

/// Structures reachable by moving one supplier into another existing
/// coalition or out on its own, deduplicated, in canonical order.
inline std::vector<NeighborMove> neighbor_moves(const CoalitionStructure& phi)
{
	std::map<CoalitionStructure, std::vector<std::size_t>> found;
	const auto& blocks = phi.coalitions();
	for (auto p : phi.cover().members())
	{
		const auto source = phi.coalition_of(p);
		auto move_to = [&](std::optional<std::size_t> target) {
			std::vector<Coalition> next;
			for (std::size_t k = 0; k < blocks.size(); ++k)
			{
				auto b = blocks[k];
				if (b == source)
				{
					b = b.without(p);
				}
				if (target && *target == k)
				{
					b = b.with(p);
				}
				if (!b.empty())
				{
					next.push_back(b);
				}
			}
			if (!target)
			{
				next.push_back(Coalition::singleton(p));
			}
			found[CoalitionStructure(std::move(next))].push_back(p);
		};
		for (std::size_t k = 0; k < blocks.size(); ++k)
		{
			if (blocks[k] != source)
			{
				move_to(k);
			}
		}
		if (source.size() > 1)
		{
			move_to(std::nullopt);
		}
	}
	std::vector<NeighborMove> out;
	for (auto& [s, movers] : found)
	{
		out.push_back({s, std::move(movers)});
	}
	return out;
}

inline std::vector<CoalitionStructure> neighbors(const CoalitionStructure& phi)
{
	std::vector<CoalitionStructure> out;
	for (auto& m : neighbor_moves(phi))
	{
		out.push_back(std::move(m.structure));
	}
	return out;
}

/// Solver-backed Shapley shares per coalition, memoized.
class ShareBook
{
public:
	ShareBook(const Instance& inst, SolverConfig config, CharacteristicCache& cache, unsigned threads = 1,
			  bool allow_approximate = false)
	: inst_(inst), config_(config), cache_(cache), threads_(threads), allow_approximate_(allow_approximate)
	{
	}

	const Instance& instance() const noexcept { return inst_; }
	CharacteristicCache& cache() noexcept { return cache_; }
	const SolverConfig& config() const noexcept { return config_; }

	const Allocation& allocation(Coalition c)
	{
		auto it = memo_.find(c);
		if (it == memo_.end())
		{
			evaluate_subsets(inst_, c, cache_, config_, threads_);
			it = memo_.emplace(c, shapley(inst_, c, cache_, allow_approximate_)).first;
		}
		return it->second;
	}

	double share(std::size_t p, Coalition c) { return allocation(c).share_of(inst_.suppliers().at(p).id); }

private:
	const Instance& inst_;
	SolverConfig config_;
	CharacteristicCache& cache_;
	unsigned threads_;
	bool allow_approximate_;
	std::map<Coalition, Allocation> memo_;
};

/// A preference value; `blocked` stands for a move the rules forbid and
/// never compares as better than anything.
struct Preference
{
	bool blocked = false;
	double value = 0;

	static Preference block() { return {true, 0}; }

	/// Strictly lower cost than `current`.
	bool improves_on(double current) const { return !blocked && value < current - kTolerance; }
};

/// Supplier `p`'s preference for ending up in `candidate` (which contains p):
/// its Shapley share there, unless `candidate` is in p's history or an
/// incumbent member would pay more with p than without.
inline Preference preference(std::size_t p, Coalition candidate, const std::vector<Coalition>& history,
							 ShareBook& book)
{
	if (!candidate.contains(p))
	{
		throw invalid_input("preference: candidate coalition does not contain the supplier");
	}
	if (std::find(history.begin(), history.end(), candidate) != history.end())
	{
		return Preference::block();
	}
	const auto before = candidate.without(p);
	if (!before.empty())
	{
		for (auto q : before.members())
		{
			if (book.share(q, candidate) > book.share(q, before) + kTolerance)
			{
				return Preference::block();
			}
		}
	}
	return {false, book.share(p, candidate)};
}

struct MoveRecord
{
	std::size_t iteration = 0;
	std::size_t mover = 0;
	Coalition from;
	Coalition to;
	double old_share = 0;
	double new_share = 0;
	CoalitionStructure before;
	CoalitionStructure after;
};

struct FormationState
{
	CoalitionStructure current;
	std::vector<std::vector<Coalition>> history;  ///< h(p), in order of joining
	std::vector<MoveRecord> log;
};

class formation_error : public std::runtime_error
{
public:
	formation_error(const std::string& what, FormationState state)
	: std::runtime_error(what), state_(std::move(state))
	{
	}

	const FormationState& state() const noexcept { return state_; }

private:
	FormationState state_;
};

struct FormationOptions
{
	std::optional<std::size_t> iteration_cap;  ///< default 10 * Bell(n)
};

struct FormationResult
{
	CoalitionStructure stable;
	std::vector<Allocation> allocations;  ///< per coalition of `stable`
	std::vector<DeliveryPlan> plans;      ///< per coalition of `stable`
	FormationState state;
};

namespace detail {

inline std::optional<MoveRecord> first_improving_move(const FormationState& state, ShareBook& book)
{
	for (const auto& nm : neighbor_moves(state.current))
	{
		for (auto p : nm.movers)
		{
			const auto from = state.current.coalition_of(p);
			const auto to = nm.structure.coalition_of(p);
			const double now = book.share(p, from);
			const auto pref = preference(p, to, state.history[p], book);
			if (pref.improves_on(now))
			{
				return MoveRecord{state.log.size() + 1, p, from, to, now, pref.value, state.current, nm.structure};
			}
		}
	}
	return std::nullopt;
}

} // namespace detail

/// Merge-and-split formation from all-singletons: repeatedly apply the
/// first single-supplier move (neighbors in canonical order, movers by
/// index) that strictly lowers the mover's share and is not blocked,
/// restarting the scan after each move.
inline FormationResult stabilize(ShareBook& book, const FormationOptions& options = {})
{
	const auto& inst = book.instance();
	const auto n = inst.supplier_count();
	FormationState state;
	state.current = CoalitionStructure::singletons(n);
	state.history.assign(n, {});
	const std::size_t cap = options.iteration_cap.value_or(
		static_cast<std::size_t>(10 * bell_count(std::min<std::size_t>(n, 25))));

	while (auto move = detail::first_improving_move(state, book))
	{
		if (state.log.size() >= cap)
		{
			throw formation_error("formation exceeded the iteration cap of " + std::to_string(cap), state);
		}
		state.history[move->mover].push_back(move->to);
		state.current = move->after;
		state.log.push_back(std::move(*move));
	}

	FormationResult r;
	r.stable = state.current;
	for (auto c : r.stable.coalitions())
	{
		r.allocations.push_back(book.allocation(c));
		r.plans.push_back(book.cache().find(c)->plan);
	}
	r.state = std::move(state);
	return r;
}

inline FormationResult stabilize(const Instance& inst, const SolverConfig& config, const FormationOptions& options = {},
								 unsigned threads = 1)
{
	CharacteristicCache cache;
	ShareBook book(inst, config, cache, threads);
	return stabilize(book, options);
}

/// Every single-supplier move out of `phi` that the mover would accept.
/// Empty for a stable structure.
inline std::vector<MoveRecord> stability_violations(const CoalitionStructure& phi,
													const std::vector<std::vector<Coalition>>& history,
													ShareBook& book)
{
	std::vector<MoveRecord> out;
	for (auto p : phi.cover().members())
	{
		const auto from = phi.coalition_of(p);
		const double now = book.share(p, from);
		std::vector<Coalition> targets;
		for (auto b : phi.coalitions())
		{
			if (b != from)
			{
				targets.push_back(b.with(p));
			}
		}
		if (from.size() > 1)
		{
			targets.push_back(Coalition::singleton(p));
		}
		for (auto to : targets)
		{
			const auto pref = preference(p, to, history.at(p), book);
			if (pref.improves_on(now))
			{
				out.push_back({0, p, from, to, now, pref.value, phi, phi});
			}
		}
	}
	return out;
}

/// Shares of every supplier under one structure, with the structure's total cost.
struct StructureRow
{
	CoalitionStructure structure;
	std::vector<double> shares;  ///< by supplier index
	double total = 0;
};

inline std::vector<StructureRow> share_matrix(ShareBook& book, std::size_t cap = 6)
{
	const auto n = book.instance().supplier_count();
	std::vector<StructureRow> rows;
	for (auto& s : enumerate_structures(n, cap))
	{
		StructureRow row{s, std::vector<double>(n, 0), 0};
		for (auto c : s.coalitions())
		{
			const auto& a = book.allocation(c);
			row.total += a.value;
			for (auto p : c.members())
			{
				row.shares[p] = a.share_of(book.instance().suppliers()[p].id);
			}
		}
		rows.push_back(std::move(row));
	}
	return rows;
}

} // namespace codd
