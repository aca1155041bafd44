#pragma once

#include "json.hpp"

#include <iosfwd>

#include "miqubo/bench.hpp"
#include "miqubo/data.hpp"
#include "miqubo/infotheory.hpp"
#include "miqubo/qubo.hpp"
#include "miqubo/solve.hpp"
#include "miqubo/svr.hpp"

// JSON and CSV encodings of the public types. Doubles are written with
// round-trip precision so reruns are byte-identical.

namespace miqubo {

using json = nlohmann::ordered_json;

void to_json(json& j, const CategoricalSpec& c);
void from_json(const json& j, CategoricalSpec& c);
void to_json(json& j, const SyntheticProfile& p);
void from_json(const json& j, SyntheticProfile& p);

void to_json(json& j, const MiReport& r);
void to_json(json& j, const CmiTensor& c);
void from_json(const json& j, CmiTensor& c);

void to_json(json& j, const QuboProblem& q);
void from_json(const json& j, QuboProblem& q);

/// `include_timing` adds wall_time, which makes the payload run-dependent.
json solver_result_json(const SolverResult& r, bool include_timing = false);
void from_json(const json& j, SolverResult& r);

void to_json(json& j, const KernelParams& p);
void from_json(const json& j, KernelParams& p);
void to_json(json& j, const SvrModel& m);
void from_json(const json& j, SvrModel& m);
void to_json(json& j, const SvrParams& p);
void from_json(const json& j, SvrParams& p);

void to_json(json& j, const SelectionMatrix& s);
void from_json(const json& j, SelectionMatrix& s);
void to_json(json& j, const SplitConfig& s);
void from_json(const json& j, SplitConfig& s);
void to_json(json& j, const R2Sweep& s);

void to_json(json& j, const AnnealSchedule& s);
void from_json(const json& j, AnnealSchedule& s);
void to_json(json& j, const TabuParams& p);
void from_json(const json& j, TabuParams& p);
void to_json(json& j, const HybridConfig& h);
void from_json(const json& j, HybridConfig& h);
void to_json(json& j, const SolverConfig& c);
void from_json(const json& j, SolverConfig& c);

void write_mi_report_csv(std::ostream& out, const MiReport& r);
void write_cmi_tensor_csv(std::ostream& out, const CmiTensor& c);
/// One row per (method, k, selected feature index).
void write_selection_csv(std::ostream& out, const std::vector<SelectionMatrix>& selections,
                         const std::vector<std::string>& names);
/// One row per (method, k, split).
void write_r2_sweep_csv(std::ostream& out, const R2Sweep& s);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace miqubo
