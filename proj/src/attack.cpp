#include "dske/attack.hpp"

#include <algorithm>
#include <sstream>

namespace dske {

AttackerKnowledge build_attacker_view(
    const SessionTranscript& transcript, LayerState layers,
    const std::optional<SessionInternals>& internals,
    std::optional<int> assumed_k) {
  const bool any_layer =
      layers.layer1_known || layers.layer2_known || layers.layer3_known;
  if (any_layer && !internals)
    throw Error(errc::invalid_config,
                "granted layers need session internals to reveal");
  if (!internals && !assumed_k)
    throw Error(errc::invalid_config,
                "window size required when no internals are given");

  const WireFrame* hello = nullptr;
  const WireFrame* labels = nullptr;
  for (const WireFrame& f : transcript.frames) {
    if (f.type == FrameType::hello && !hello) hello = &f;
    if (f.type == FrameType::labels && !labels) labels = &f;
  }
  if (!hello || !labels)
    throw Error(errc::malformed_transcript,
                "transcript lacks a hello or labels frame");

  AttackerKnowledge k;
  k.layers = layers;
  k.k = internals ? internals->selections.k : *assumed_k;
  try {
    HelloFields h = parse_hello(*hello);
    k.nonce = h.nonce;
    k.key_len = h.key_len;
    for (Label l : parse_labels(*labels)) {
      auto cell = s2_cell_of(l);
      if (!cell)
        throw Error(errc::malformed_transcript,
                    "label " + l.str() + " is not a standard s2 label");
      k.observed.push_back(ObservedLabel{l, cell->first, cell->second});
    }
  } catch (const Error& e) {
    if (e.code() == errc::malformed_payload)
      throw Error(errc::malformed_transcript, e.what());
    throw;
  }
  if (k.observed.size() != k.key_len)
    throw Error(errc::malformed_transcript,
                "label count disagrees with the hello frame");

  if (layers.layer1_known) k.params = internals->params;
  if (layers.layer2_known) k.s1_window = internals->s1_window;
  if (layers.layer3_known) k.s2_sel = internals->selections.s2_sel;
  return k;
}

namespace {

bool origin_contains_all(const SubBoxSelection& o,
                         const std::vector<ObservedLabel>& observed) {
  for (const ObservedLabel& cell : observed) {
    if (cell.row < o.row || cell.row >= o.row + o.k || cell.col < o.col ||
        cell.col >= o.col + o.k)
      return false;
  }
  return true;
}

std::vector<std::uint8_t> key_bytes_for(const Window<std::uint32_t>& window,
                                        const SubBoxSelection& s2_origin,
                                        const std::vector<ObservedLabel>& observed) {
  SessionKey key;
  key.residues.reserve(observed.size());
  for (const ObservedLabel& cell : observed)
    key.residues.push_back(
        window.at(cell.row - s2_origin.row, cell.col - s2_origin.col));
  return derive_key_bytes(key);
}

// All valid (p, q, n) triples inside the bounds.
std::vector<SecretParams> params_in_bounds(const ParamBounds& bounds) {
  std::vector<SecretParams> out;
  for (std::int64_t q = 3; q <= bounds.q_max; ++q) {
    if (!is_prime(q)) continue;
    for (std::int64_t p = 2; p < q && p <= bounds.p_max; ++p) {
      if (!is_prime(p)) continue;
      for (std::int64_t n = 1; n <= bounds.n_max && n < q; ++n)
        out.push_back(SecretParams{static_cast<std::uint32_t>(p),
                                   static_cast<std::uint32_t>(q),
                                   static_cast<std::uint32_t>(n)});
    }
  }
  return out;
}

void collect_duplicate_free_windows(const SBoxS1& box, int k,
                                    std::vector<Window<std::uint32_t>>& out) {
  const int m = kGridSize - k + 1;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      Window<std::uint32_t> w = extract_window(box, SubBoxSelection{r, c, k});
      if (is_duplicate_free(w)) out.push_back(std::move(w));
    }
  }
}

}  // namespace

std::set<std::vector<std::uint8_t>> enumerate_candidate_keys(
    const AttackerKnowledge& knowledge, const EnumerationOptions& options) {
  const int k = knowledge.k;
  const int m = kGridSize - k + 1;

  std::vector<SubBoxSelection> origins;
  if (knowledge.layers.layer3_known) {
    origins.push_back(*knowledge.s2_sel);
  } else {
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c)
        if (origin_contains_all(SubBoxSelection{r, c, k}, knowledge.observed))
          origins.push_back(SubBoxSelection{r, c, k});
  }

  // Bound the raw assignment space before materializing anything large.
  std::uint64_t window_sets = 0;
  std::vector<SecretParams> grids;
  if (knowledge.layers.layer2_known) {
    window_sets = 1;
  } else if (knowledge.layers.layer1_known) {
    window_sets = static_cast<std::uint64_t>(m) * m;
  } else {
    if (!options.bounds)
      throw Error(errc::bounds_required,
                  "parameter bounds required when layers 1 and 2 are dark");
    grids = params_in_bounds(*options.bounds);
    window_sets = grids.size() * static_cast<std::uint64_t>(m) * m;
  }
  const std::uint64_t assignments = window_sets * origins.size();
  if (assignments > options.max_assignments)
    throw Error(errc::search_space_too_large,
                std::to_string(assignments) + " assignments exceed the cap of " +
                    std::to_string(options.max_assignments));

  std::vector<Window<std::uint32_t>> windows;
  if (knowledge.layers.layer2_known) {
    windows.push_back(*knowledge.s1_window);
  } else if (knowledge.layers.layer1_known) {
    collect_duplicate_free_windows(generate_s1(*knowledge.params), k, windows);
  } else {
    for (const SecretParams& params : grids)
      collect_duplicate_free_windows(generate_s1(params), k, windows);
  }

  std::set<std::vector<std::uint8_t>> keys;
  for (const Window<std::uint32_t>& w : windows)
    for (const SubBoxSelection& o : origins)
      keys.insert(key_bytes_for(w, o, knowledge.observed));
  return keys;
}

std::vector<SecretParams> enumerate_consistent_params(
    const AttackerKnowledge& knowledge, const ParamBounds& bounds) {
  if (!knowledge.layers.layer2_known || !knowledge.s1_window)
    throw Error(errc::invalid_config,
                "parameter search needs the layer-2 window");
  const Window<std::uint32_t>& window = *knowledge.s1_window;
  std::vector<SecretParams> out;
  for (const SecretParams& params : params_in_bounds(bounds)) {
    const SBoxS1 box = generate_s1(params);
    if (extract_window(box, window.origin) == window) out.push_back(params);
  }
  return out;
}

LayerState layers_for_case(CaseId id) {
  switch (id) {
    case CaseId::case1:
      return LayerState{false, true, true};
    case CaseId::case2:
      return LayerState{true, true, false};
    case CaseId::case3_layer1:
      return LayerState{true, false, false};
    case CaseId::case3_layer2:
      return LayerState{false, true, false};
    case CaseId::case3_layer3:
      return LayerState{false, false, true};
  }
  throw Error(errc::invalid_config, "unknown case");
}

ScriptedSession run_scripted_session(const SecretParams& params,
                                     std::uint64_t nonce, int key_len,
                                     std::optional<int> requested_k,
                                     std::uint64_t seed) {
  SessionConfig config{params, key_len, requested_k};
  SessionState initiator(Role::initiator, config, nonce);
  SessionState responder(Role::responder, config, nonce);

  const std::vector<Label> labels = initiator.pick_key(seeded_index_source(seed));
  const std::vector<Label> confirm = responder.receive(labels);
  if (!initiator.verify_confirm(confirm) ||
      initiator.key() != responder.key())
    throw Error(errc::confirm_mismatch, "scripted session failed to agree");

  ScriptedSession out;
  out.transcript.frames = {
      make_hello(nonce, static_cast<std::uint8_t>(key_len)),
      make_labels(labels), make_confirm(confirm)};
  out.internals = SessionInternals{params, initiator.selections(),
                                   initiator.codebook().s1_window(), nonce};
  out.key = initiator.key();
  return out;
}

CompromiseReport case_report(CaseId id, bool fresh_session_demo,
                             const CaseScenario& scenario) {
  const ScriptedSession session =
      run_scripted_session(scenario.params, scenario.nonce, scenario.key_len,
                           scenario.requested_k, scenario.seed);

  EnumerationOptions options;
  options.bounds = scenario.bounds;
  options.max_assignments = scenario.max_assignments;

  const LayerState layers = layers_for_case(id);
  const AttackerKnowledge knowledge =
      build_attacker_view(session.transcript, layers, session.internals);
  const auto candidates = enumerate_candidate_keys(knowledge, options);

  CompromiseReport report;
  report.case_id = id;
  report.candidate_key_count = candidates.size();
  report.current_session_unique = candidates.size() == 1;

  if (fresh_session_demo) {
    // Next session: new nonce, rotated selections. Skip nonces whose derived
    // selections happen to coincide with the compromised session's.
    std::uint64_t fresh_nonce = scenario.nonce;
    DerivedSelections fresh_sel = session.internals.selections;
    do {
      ++fresh_nonce;
      fresh_sel = derive_selections(scenario.params, fresh_nonce,
                                    scenario.requested_k);
    } while (fresh_sel == session.internals.selections);

    const ScriptedSession fresh =
        run_scripted_session(scenario.params, fresh_nonce, scenario.key_len,
                             scenario.requested_k, scenario.seed + 1);
    // Layer-1 knowledge is long-term and survives the rotation; the
    // per-session layers 2 and 3 go dark again.
    LayerState stale = layers;
    stale.layer2_known = false;
    stale.layer3_known = false;
    const AttackerKnowledge fresh_knowledge =
        build_attacker_view(fresh.transcript, stale, fresh.internals);
    const auto fresh_candidates =
        enumerate_candidate_keys(fresh_knowledge, options);
    report.next_session_unique_under_fresh_layers = fresh_candidates.size() == 1;
  }
  return report;
}

static const char* case_token(CaseId id) {
  switch (id) {
    case CaseId::case1: return "I";
    case CaseId::case2: return "II";
    case CaseId::case3_layer1: return "III_layer1";
    case CaseId::case3_layer2: return "III_layer2";
    case CaseId::case3_layer3: return "III_layer3";
  }
  return "?";
}

std::string to_text(const CompromiseReport& report) {
  std::ostringstream out;
  out << "case=" << case_token(report.case_id) << "\n";
  out << "candidate_key_count=" << report.candidate_key_count << "\n";
  out << "current_session_unique="
      << (report.current_session_unique ? "true" : "false") << "\n";
  if (report.next_session_unique_under_fresh_layers)
    out << "next_session_unique_under_fresh_layers="
        << (*report.next_session_unique_under_fresh_layers ? "true" : "false")
        << "\n";
  return out.str();
}

}  // namespace dske
