#include "ldq/assess.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <json.hpp>
#include <limits>
#include <random>
#include <set>

#include "ldq/errors.hpp"

namespace ldq {

namespace {

const std::string& rdf_type() {
  static const std::string iri = ns::rdf_("type");
  return iri;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

// Triples of one subject grouped by predicate text.
std::map<std::string, std::vector<const Triple*>> by_predicate(const Graph& g,
                                                               const Term& s) {
  std::map<std::string, std::vector<const Triple*>> out;
  auto [begin, end] = g.subject_range(s);
  for (auto it = begin; it != end; ++it) out[it->predicate.value()].push_back(&*it);
  return out;
}

std::vector<const Triple*> objects_of(
    const std::map<std::string, std::vector<const Triple*>>& index,
    const std::string& predicate) {
  auto it = index.find(predicate);
  return it == index.end() ? std::vector<const Triple*>{} : it->second;
}

// The single unit entry a subject declares, if it resolves.
const UnitEntry* subject_unit(
    const std::map<std::string, std::vector<const Triple*>>& index,
    const UnitTable& units) {
  auto unit_triples = objects_of(index, vocab::unit());
  if (unit_triples.size() != 1 || !unit_triples[0]->object.is_literal())
    return nullptr;
  return units.find(unit_triples[0]->object.value());
}

std::set<std::string> distinct_subjects_text(const Graph& g,
                                             std::size_t* blank_count = nullptr) {
  std::set<std::string> subjects;
  std::size_t blanks = 0;
  const Term* last = nullptr;
  for (const auto& t : g) {
    if (last && *last == t.subject) continue;
    last = &t.subject;
    subjects.insert(t.subject.text());
    if (t.subject.is_blank()) ++blanks;
  }
  if (blank_count) *blank_count = blanks;
  return subjects;
}

// Distinct predicate IRIs and rdf:type class IRIs.
std::set<std::string> vocabulary_terms(const Graph& g) {
  std::set<std::string> used;
  for (const auto& t : g) {
    used.insert(t.predicate.value());
    if (t.predicate.value() == rdf_type() && t.object.is_iri())
      used.insert(t.object.value());
  }
  return used;
}

Rational median_of(const std::vector<Rational>& sorted, std::size_t begin,
                   std::size_t end) {
  std::size_t n = end - begin;
  std::size_t mid = begin + n / 2;
  if (n % 2 == 1) return sorted[mid];
  Rational m = (sorted[mid - 1] + sorted[mid]) / 2;
  m.canonicalize();
  return m;
}

// Rejection-sampled uniform draw in [0, bound).
std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t bound) {
  std::uint64_t threshold = (std::numeric_limits<std::uint64_t>::max() - bound + 1) % bound;
  for (;;) {
    std::uint64_t x = gen();
    if (x >= threshold) return x % bound;
  }
}

struct Observations {
  std::vector<NumericObservation> items;
  std::vector<bool> outlier;
};

Observations collect_observations(const Graph& g,
                                  const std::vector<ShapeRequirement>& shapes,
                                  const UnitTable& units) {
  Observations out;
  for (const auto& shape : shapes) {
    std::vector<Term> instances = instances_of(g, shape.class_iri);
    std::vector<std::map<std::string, std::vector<const Triple*>>> indexes;
    indexes.reserve(instances.size());
    for (const auto& inst : instances) indexes.push_back(by_predicate(g, inst));

    for (const auto& prop : shape.properties) {
      if (!prop.is_numeric()) continue;
      std::size_t first = out.items.size();
      for (const auto& index : indexes) {
        const UnitEntry* unit =
            prop.unit_dimension ? subject_unit(index, units) : nullptr;
        for (const Triple* t : objects_of(index, prop.predicate)) {
          if (!t->object.is_literal()) continue;
          auto value = parse_decimal(t->object.value());
          if (!value) continue;
          Rational canonical = *value;
          if (unit && unit->dimension == *prop.unit_dimension)
            canonical = convert_unit(*value, *unit, unit->dimension);
          out.items.push_back({*t, shape.class_iri, canonical});
        }
      }
      std::size_t n = out.items.size() - first;
      out.outlier.resize(out.items.size(), false);
      if (prop.range) {
        for (std::size_t i = first; i < out.items.size(); ++i) {
          const Rational& v = out.items[i].canonical;
          out.outlier[i] = v < prop.range->first || v > prop.range->second;
        }
      } else if (n >= 8) {
        std::vector<Rational> sorted;
        sorted.reserve(n);
        for (std::size_t i = first; i < out.items.size(); ++i)
          sorted.push_back(out.items[i].canonical);
        std::sort(sorted.begin(), sorted.end());
        auto [q1, q3] = quartiles(sorted);
        Rational spread = (q3 - q1) * ratio(3, 2);
        Rational lo = q1 - spread, hi = q3 + spread;
        for (std::size_t i = first; i < out.items.size(); ++i) {
          const Rational& v = out.items[i].canonical;
          out.outlier[i] = v < lo || v > hi;
        }
      }
    }
  }
  return out;
}

}  // namespace

Measurement ratio_measurement(std::string metric_id, DimensionCategory category,
                              const BigInt& numerator, const BigInt& denominator) {
  Measurement m;
  m.metric_id = std::move(metric_id);
  m.category = category;
  m.numerator = numerator;
  m.denominator = denominator;
  m.value = denominator == 0 ? Rational(1) : ratio(numerator, denominator);
  return m;
}

// ---------------------------------------------------------------------------
// Probes and sampling

FixtureProbe FixtureProbe::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("probe", e.what());
  }
  if (!doc.is_object()) throw ConfigError("probe", "expected an object");
  std::map<std::string, ProbeResult> table;
  for (const auto& [iri, entry] : doc.items()) {
    std::string path = "probe." + iri;
    ProbeResult r;
    if (entry.is_number_integer()) {
      r.status = entry.get<int>();
    } else if (entry.is_object()) {
      auto status = entry.find("status");
      if (status == entry.end() || !status->is_number_integer())
        throw ConfigError(path + ".status", "expected an integer");
      r.status = status->get<int>();
      if (auto lat = entry.find("latencyMs"); lat != entry.end()) {
        if (!lat->is_number_integer() || lat->get<std::int64_t>() < 0)
          throw ConfigError(path + ".latencyMs", "expected a nonnegative integer");
        r.latency_ms = lat->get<std::int64_t>();
      }
    } else {
      throw ConfigError(path, "expected a status code or an object");
    }
    table[iri] = r;
  }
  return FixtureProbe(std::move(table));
}

ProbeResult FixtureProbe::fetch(const std::string& iri) const {
  auto it = table_.find(iri);
  return it == table_.end() ? ProbeResult{} : it->second;
}

std::vector<std::string> seeded_sample(std::vector<std::string> population,
                                       std::size_t k, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::size_t n = population.size();
  k = std::min(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(bounded(gen, n - i));
    std::swap(population[i], population[j]);
  }
  population.resize(k);
  return population;
}

std::vector<std::string> dereferenceable_population(const Graph& g) {
  std::set<std::string> iris;
  auto consider = [&](const Term& t) {
    if (t.is_iri() && (starts_with(t.value(), "http://") ||
                       starts_with(t.value(), "https://")))
      iris.insert(t.value());
  };
  for (const auto& t : g) {
    consider(t.subject);
    consider(t.object);
  }
  return {iris.begin(), iris.end()};
}

// ---------------------------------------------------------------------------
// Metrics

Measurement metric_availability(const Graph& g, const DereferenceProbe* probe,
                                std::size_t sample_size, std::uint64_t seed,
                                std::vector<std::int64_t>* latencies) {
  if (!probe) throw ProbeUnavailable();
  if (sample_size == 0) throw ConfigError("availability.sampleSize", "must be >= 1");
  auto sample = seeded_sample(dereferenceable_population(g), sample_size, seed);
  std::size_t ok = 0;
  for (const auto& iri : sample) {
    ProbeResult r = probe->fetch(iri);
    if (r.status >= 200 && r.status <= 299) ++ok;
    if (latencies) latencies->push_back(r.latency_ms);
  }
  return ratio_measurement(std::string(metric::availability),
                           DimensionCategory::Accessibility, ok, sample.size());
}

Measurement metric_interlinking(const Graph& g, const QualityPolicy& policy) {
  std::set<std::string> linking(policy.linking_predicates.begin(),
                                policy.linking_predicates.end());
  std::set<std::string> subjects, linked;
  for (const auto& t : g) {
    subjects.insert(t.subject.text());
    if (linking.count(t.predicate.value())) linked.insert(t.subject.text());
  }
  return ratio_measurement(std::string(metric::interlinking),
                           DimensionCategory::Accessibility, linked.size(),
                           subjects.size());
}

Measurement metric_performance(std::vector<std::int64_t> latencies_ms,
                               std::int64_t l_max_ms) {
  if (l_max_ms <= 0) throw ConfigError("performance.lMax", "must be > 0");
  const std::string id(metric::performance);
  const auto category = DimensionCategory::Accessibility;
  if (latencies_ms.empty()) return ratio_measurement(id, category, 0, 0);
  std::sort(latencies_ms.begin(), latencies_ms.end());
  std::int64_t median = latencies_ms[(latencies_ms.size() - 1) / 2];
  if (median <= l_max_ms) return ratio_measurement(id, category, 1, 1);
  return ratio_measurement(id, category, BigInt(std::to_string(l_max_ms)),
                           BigInt(std::to_string(median)));
}

std::vector<Term> instances_of(const Graph& g, const std::string& class_iri) {
  std::vector<Term> out;
  for (const auto& t : match(g, {std::nullopt, Term::iri(rdf_type()),
                                 Term::iri(class_iri)}))
    out.push_back(t.subject);
  return out;
}

Measurement metric_completeness(const Graph& g,
                                const std::vector<ShapeRequirement>& shapes) {
  std::size_t present = 0, total = 0;
  for (const auto& shape : shapes) {
    for (const auto& inst : instances_of(g, shape.class_iri)) {
      auto index = by_predicate(g, inst);
      for (const auto& prop : shape.properties) {
        ++total;
        if (index.count(prop.predicate)) ++present;
      }
    }
  }
  return ratio_measurement(std::string(metric::completeness),
                           DimensionCategory::Intrinsic, present, total);
}

Measurement metric_consistency(const Graph& g,
                               const std::vector<ShapeRequirement>& shapes,
                               const UnitTable& units) {
  std::size_t checks = 0, violations = 0;
  auto check = [&](bool ok) {
    ++checks;
    if (!ok) ++violations;
  };
  for (const auto& shape : shapes) {
    for (const auto& inst : instances_of(g, shape.class_iri)) {
      auto index = by_predicate(g, inst);
      auto unit_triples = objects_of(index, vocab::unit());
      for (const auto& prop : shape.properties) {
        auto occurrences = objects_of(index, prop.predicate);
        if (occurrences.empty()) continue;
        for (const Triple* t : occurrences) {
          // (d) literal where a datatype is expected, IRI where "@id" is.
          bool literal = t->object.is_literal();
          check(prop.expects_literal() ? literal : !literal);
          // (a) lexical form against the expected datatype.
          if (prop.expects_literal() && literal)
            check(lexical_conforms(t->object.value(), prop.datatype));
        }
        // (b) functional predicates at most once.
        if (prop.functional) check(occurrences.size() <= 1);
        // (c) declared unit matches the expected dimension.
        if (prop.unit_dimension) {
          for (const Triple* u : unit_triples) {
            const UnitEntry* e =
                u->object.is_literal() ? units.find(u->object.value()) : nullptr;
            check(e && e->dimension == *prop.unit_dimension);
          }
        }
      }
    }
  }
  return ratio_measurement(std::string(metric::consistency),
                           DimensionCategory::Intrinsic, checks - violations,
                           checks);
}

std::pair<Rational, Rational> quartiles(const std::vector<Rational>& sorted) {
  std::size_t n = sorted.size();
  std::size_t half = n / 2;
  return {median_of(sorted, 0, half), median_of(sorted, n - half, n)};
}

std::vector<NumericObservation> numeric_observations(
    const Graph& g, const std::vector<ShapeRequirement>& shapes,
    const UnitTable& units) {
  return collect_observations(g, shapes, units).items;
}

std::vector<Triple> outlier_triples(const Graph& g,
                                    const std::vector<ShapeRequirement>& shapes,
                                    const UnitTable& units) {
  Observations obs = collect_observations(g, shapes, units);
  std::set<Triple> out;
  for (std::size_t i = 0; i < obs.items.size(); ++i)
    if (obs.outlier[i]) out.insert(obs.items[i].triple);
  return {out.begin(), out.end()};
}

Measurement metric_semantic_accuracy(const Graph& g,
                                     const std::vector<ShapeRequirement>& shapes,
                                     const UnitTable& units) {
  Observations obs = collect_observations(g, shapes, units);
  std::size_t outliers = std::count(obs.outlier.begin(), obs.outlier.end(), true);
  return ratio_measurement(std::string(metric::semantic_accuracy),
                           DimensionCategory::Intrinsic,
                           obs.items.size() - outliers, obs.items.size());
}

Measurement metric_interpretability(const Graph& g, const Graph& declared_vocab) {
  std::set<std::string> declared;
  for (const auto& t : declared_vocab) {
    if (t.subject.is_iri()) declared.insert(t.subject.value());
    if (t.object.is_iri()) declared.insert(t.object.value());
  }
  const std::string_view core[] = {ns::rdf, ns::rdfs, ns::xsd, ns::dqv};
  std::set<std::string> used = vocabulary_terms(g);
  std::size_t ok = 0;
  for (const auto& iri : used) {
    bool is_core = std::any_of(std::begin(core), std::end(core),
                               [&](std::string_view p) { return starts_with(iri, p); });
    if (is_core || declared.count(iri)) ++ok;
  }
  return ratio_measurement(std::string(metric::interpretability),
                           DimensionCategory::RdfLevel, ok, used.size());
}

Measurement metric_interoperability(const Graph& g, const QualityPolicy& policy) {
  std::set<std::string> used = vocabulary_terms(g);
  std::size_t ok = 0;
  for (const auto& iri : used) {
    if (std::any_of(policy.standard_namespaces.begin(),
                    policy.standard_namespaces.end(),
                    [&](const std::string& p) { return starts_with(iri, p); }))
      ++ok;
  }
  return ratio_measurement(std::string(metric::interoperability),
                           DimensionCategory::RdfLevel, ok, used.size());
}

Measurement metric_compactness(const Graph& g) {
  const std::string id(metric::compactness);
  if (g.empty()) return ratio_measurement(id, DimensionCategory::RdfLevel, 0, 0);
  std::size_t blanks = 0;
  BigInt subjects = distinct_subjects_text(g, &blanks).size();
  BigInt triples = g.size();
  BigInt raw = std::max<std::uint64_t>(g.raw_statement_count(), g.size());
  // (T/R + (S-B)/S) / 2 over a common denominator.
  BigInt numerator = triples * subjects + (subjects - blanks) * raw;
  BigInt denominator = 2 * raw * subjects;
  return ratio_measurement(id, DimensionCategory::RdfLevel, numerator, denominator);
}

Measurement metric_provenance(const Graph& g) {
  std::size_t typed = 0, stamped = 0;
  for_each_subject(g, [&](const Term&, const std::vector<const Triple*>& ts) {
    bool has_type = false, has_source = false, has_generated = false;
    for (const Triple* t : ts) {
      const std::string& p = t->predicate.value();
      has_type |= p == rdf_type();
      has_source |= p == vocab::source();
      has_generated |= p == vocab::generated_at();
    }
    if (!has_type) return;
    ++typed;
    if (has_source && has_generated) ++stamped;
  });
  return ratio_measurement(std::string(metric::provenance),
                           DimensionCategory::TaskDependent, stamped, typed);
}

Measurement metric_freshness(const Graph& g, UnixSeconds now,
                             std::int64_t max_age_seconds) {
  if (max_age_seconds <= 0) throw ConfigError("maxAgeSeconds", "must be > 0");
  const std::string observed = vocab::observed_at();
  BigInt total = 0;
  std::size_t subjects = 0;
  for_each_subject(g, [&](const Term&, const std::vector<const Triple*>& ts) {
    std::optional<UnixSeconds> latest;
    bool any = false;
    for (const Triple* t : ts) {
      if (t->predicate.value() != observed) continue;
      any = true;
      if (!t->object.is_literal()) continue;
      if (auto when = parse_utc(t->object.value()))
        latest = latest ? std::max(*latest, *when) : *when;
    }
    if (!any) return;
    ++subjects;
    // A malformed timestamp scores 0 for its subject.
    if (!latest) return;
    std::int64_t age = std::max<std::int64_t>(0, now - *latest);
    std::int64_t remaining = std::clamp<std::int64_t>(max_age_seconds - age, 0,
                                                      max_age_seconds);
    total += BigInt(std::to_string(remaining));
  });
  BigInt denominator = BigInt(std::to_string(max_age_seconds)) * subjects;
  return ratio_measurement(std::string(metric::freshness),
                           DimensionCategory::TaskDependent, total, denominator);
}

Measurement metric_usability(const std::vector<Measurement>& measured,
                             const QualityPolicy& policy) {
  Rational weighted = 0, weights = 0;
  for (const auto& [id, w] : policy.usability_weights) {
    if (id == metric::usability) continue;
    auto it = std::find_if(measured.begin(), measured.end(),
                           [&](const Measurement& m) { return m.metric_id == id; });
    if (it == measured.end()) continue;
    weighted += w * it->value;
    weights += w;
  }
  const std::string uid(metric::usability);
  if (weights == 0) return ratio_measurement(uid, DimensionCategory::TaskDependent, 0, 0);
  Rational value = weighted / weights;
  value.canonicalize();
  return ratio_measurement(uid, DimensionCategory::TaskDependent,
                           value.get_num(), value.get_den());
}

// ---------------------------------------------------------------------------
// Assessment

const Measurement* AssessmentReport::find(std::string_view metric_id) const {
  for (const auto& m : measurements)
    if (m.metric_id == metric_id) return &m;
  return nullptr;
}

bool AssessmentReport::is_failing(std::string_view metric_id) const {
  return std::any_of(failing.begin(), failing.end(), [&](const FailingEntry& f) {
    return !f.is_category && f.id == metric_id;
  });
}

Graph declared_vocabulary(const QualityPolicy& policy) {
  Graph g = builtin_vocab();
  for (const auto& t : policy_vocab(policy)) g.add(t);
  return g;
}

namespace {

class Assessor {
 public:
  Assessor(const Graph& g, const QualityPolicy& policy, const AssessOptions& options)
      : g_(g), policy_(policy), options_(options) {}

  // Throws the metric's error; usability reads `measured`.
  Measurement run(const MetricDefinition& def, const std::vector<Measurement>& measured) {
    Measurement m = dispatch(def, measured);
    m.metric_id = def.id;
    m.category = def.category;
    m.computed_at = options_.now;
    return m;
  }

 private:
  struct ProbeSample {
    Measurement availability;
    std::vector<std::int64_t> latencies;
  };

  const ProbeSample& probe_sample() {
    if (!sample_) {
      const MetricDefinition* def = policy_.find_metric(metric::availability);
      std::size_t size = 50;
      std::uint64_t seed = options_.seed;
      if (def) {
        Rational n = def->number("sampleSize", 50);
        if (n < 1 || n.get_den() != 1 || !n.get_num().fits_ulong_p())
          throw ConfigError("availability.sampleSize", "expected a positive integer");
        size = n.get_num().get_ui();
      }
      ProbeSample s;
      s.availability = metric_availability(g_, options_.probe, size, seed, &s.latencies);
      sample_ = std::move(s);
    }
    return *sample_;
  }

  Measurement dispatch(const MetricDefinition& def,
                       const std::vector<Measurement>& measured) {
    const std::string& id = def.id;
    const UnitTable& units = UnitTable::builtin();
    for (const auto& custom : options_.custom_metrics)
      if (custom.id == id) return custom.fn(MetricContext{g_, policy_, def, options_.now});
    if (id == metric::availability) return probe_sample().availability;
    if (id == metric::performance) {
      Rational l_max = def.number("lMax", 1000);
      if (l_max.get_den() != 1 || !l_max.get_num().fits_slong_p())
        throw ConfigError("performance.lMax", "expected an integer");
      return metric_performance(probe_sample().latencies, l_max.get_num().get_si());
    }
    if (id == metric::interlinking) return metric_interlinking(g_, policy_);
    if (id == metric::completeness) return metric_completeness(g_, policy_.shapes);
    if (id == metric::consistency) return metric_consistency(g_, policy_.shapes, units);
    if (id == metric::semantic_accuracy)
      return metric_semantic_accuracy(g_, policy_.shapes, units);
    if (id == metric::interpretability) {
      if (!declared_) declared_ = declared_vocabulary(policy_);
      return metric_interpretability(g_, *declared_);
    }
    if (id == metric::interoperability) return metric_interoperability(g_, policy_);
    if (id == metric::compactness) return metric_compactness(g_);
    if (id == metric::provenance) return metric_provenance(g_);
    if (id == metric::freshness)
      return metric_freshness(g_, options_.now, policy_.max_age_seconds);
    if (id == metric::usability) return metric_usability(measured, policy_);
    throw Error("no implementation registered for metric '" + id + "'");
  }

  const Graph& g_;
  const QualityPolicy& policy_;
  const AssessOptions& options_;
  std::optional<ProbeSample> sample_;
  std::optional<Graph> declared_;
};

std::vector<MetricDefinition> effective_metrics(const QualityPolicy& policy,
                                                const AssessOptions& options) {
  std::vector<MetricDefinition> defs = policy.metrics;
  for (const auto& custom : options.custom_metrics) {
    if (policy.find_metric(custom.id)) continue;
    MetricDefinition d;
    d.id = custom.id;
    d.category = custom.category;
    d.weight = custom.weight;
    defs.push_back(std::move(d));
  }
  return defs;
}

}  // namespace

AssessmentReport assess(const Graph& g, const QualityPolicy& policy,
                        const AssessOptions& options) {
  AssessmentReport report;
  report.dataset_id = options.dataset_id;
  report.round = options.round;
  report.computed_at = options.now;

  std::vector<MetricDefinition> defs = effective_metrics(policy, options);
  Assessor assessor(g, policy, options);
  std::vector<std::optional<Measurement>> results(defs.size());
  std::vector<std::optional<std::string>> errors(defs.size());
  std::vector<Measurement> measured;

  // Usability reads the other measurements, so it runs last.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < defs.size(); ++i) {
      bool is_usability = defs[i].id == metric::usability;
      if (is_usability != (pass == 1)) continue;
      try {
        results[i] = assessor.run(defs[i], measured);
        measured.push_back(*results[i]);
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
  }

  std::array<Rational, 4> weighted_sum{}, weight_sum{};
  std::array<std::size_t, 4> members{};
  std::array<Rational, 4> plain_sum{};
  for (std::size_t i = 0; i < defs.size(); ++i) {
    if (!results[i]) {
      report.skipped.push_back({defs[i].id, *errors[i]});
      continue;
    }
    const Measurement& m = *results[i];
    report.measurements.push_back(m);
    std::size_t c = category_index(m.category);
    weighted_sum[c] += defs[i].weight * m.value;
    weight_sum[c] += defs[i].weight;
    plain_sum[c] += m.value;
    ++members[c];
  }

  Rational overall_sum = 0, overall_weight = 0, plain_overall = 0;
  std::size_t present = 0;
  for (auto c : kAllCategories) {
    std::size_t k = category_index(c);
    if (members[k] == 0) continue;
    Rational score = weight_sum[k] > 0 ? Rational(weighted_sum[k] / weight_sum[k])
                                       : Rational(plain_sum[k] / members[k]);
    score.canonicalize();
    report.category_scores[k] = score;
    overall_sum += policy.category_weights[k] * score;
    overall_weight += policy.category_weights[k];
    plain_overall += score;
    ++present;
  }
  if (present == 0) {
    report.overall = 1;
  } else if (overall_weight > 0) {
    report.overall = overall_sum / overall_weight;
  } else {
    report.overall = plain_overall / present;
  }
  report.overall.canonicalize();

  for (const auto& m : report.measurements) {
    auto it = policy.thresholds.find(m.metric_id);
    if (it != policy.thresholds.end() && m.value < it->second)
      report.failing.push_back({false, m.metric_id, it->second, m.value});
  }
  for (auto c : kAllCategories) {
    auto it = policy.category_thresholds.find(c);
    const auto& score = report.category_scores[category_index(c)];
    if (it != policy.category_thresholds.end() && score && *score < it->second)
      report.failing.push_back({true, std::string(category_name(c)), it->second, *score});
  }
  report.passed = report.failing.empty();
  return report;
}

Measurement measure_metric(const Graph& g, const QualityPolicy& policy,
                           const std::string& metric_id,
                           const AssessOptions& options) {
  std::vector<MetricDefinition> defs = effective_metrics(policy, options);
  auto it = std::find_if(defs.begin(), defs.end(),
                         [&](const MetricDefinition& d) { return d.id == metric_id; });
  MetricDefinition def;
  if (it != defs.end()) {
    def = *it;
  } else {
    auto category = builtin_metric_category(metric_id);
    if (!category) throw Error("unknown metric '" + metric_id + "'");
    def.id = metric_id;
    def.category = *category;
  }
  Assessor assessor(g, policy, options);
  std::vector<Measurement> measured;
  if (metric_id == metric::usability) {
    for (const auto& d : defs) {
      if (d.id == metric::usability) continue;
      try {
        measured.push_back(assessor.run(d, measured));
      } catch (const Error&) {
      }
    }
  }
  return assessor.run(def, measured);
}

std::string measurement_iri(const std::string& dataset_id, int round,
                            std::size_t seq) {
  return "urn:ldq:measurement:" + dataset_id + ":" + std::to_string(round) + ":" +
         std::to_string(seq);
}

std::string dataset_iri(const std::string& dataset_id) {
  return "urn:ldq:dataset:" + dataset_id;
}

Graph emit_report_graph(const AssessmentReport& report) {
  Graph g;
  Term of = Term::iri(ns::dqv_("isMeasurementOf"));
  Term value = Term::iri(ns::dqv_("value"));
  Term dimension = Term::iri(ns::dqv_("inDimension"));
  Term computed_on = Term::iri(ns::dqv_("computedOn"));
  Term dataset = Term::iri(dataset_iri(report.dataset_id));
  const std::string decimal = ns::xsd_("decimal");
  for (std::size_t seq = 0; seq < report.measurements.size(); ++seq) {
    const Measurement& m = report.measurements[seq];
    Term node = Term::iri(measurement_iri(report.dataset_id, report.round, seq));
    g.add(node, of, Term::iri(metric_iri(m.metric_id)));
    g.add(node, value, Term::literal(format_decimal(m.value), decimal));
    g.add(node, dimension, Term::iri(category_iri(m.category)));
    g.add(node, computed_on, dataset);
  }
  return g;
}

std::string report_to_json(const AssessmentReport& report) {
  using ojson = nlohmann::ordered_json;
  auto exact = [](const Rational& v) {
    return ojson{{"value", format_decimal(v)}, {"fraction", to_fraction_string(v)}};
  };
  ojson doc;
  doc["datasetId"] = report.dataset_id;
  doc["round"] = report.round;
  doc["computedAt"] = format_utc(report.computed_at);
  ojson measurements = ojson::array();
  for (const auto& m : report.measurements) {
    measurements.push_back({{"metric", m.metric_id},
                            {"category", category_name(m.category)},
                            {"value", format_decimal(m.value)},
                            {"fraction", to_fraction_string(m.value)},
                            {"numerator", m.numerator.get_str()},
                            {"denominator", m.denominator.get_str()}});
  }
  doc["measurements"] = std::move(measurements);
  ojson skipped = ojson::array();
  for (const auto& s : report.skipped)
    skipped.push_back({{"metric", s.metric_id}, {"reason", s.reason}});
  doc["skipped"] = std::move(skipped);
  ojson categories = ojson::object();
  for (auto c : kAllCategories) {
    const auto& score = report.category_scores[category_index(c)];
    categories[std::string(category_name(c))] = score ? exact(*score) : ojson(nullptr);
  }
  doc["categoryScores"] = std::move(categories);
  doc["overall"] = exact(report.overall);
  ojson failing = ojson::array();
  for (const auto& f : report.failing) {
    failing.push_back({{"kind", f.is_category ? "category" : "metric"},
                       {"id", f.id},
                       {"threshold", format_decimal(f.threshold)},
                       {"value", format_decimal(f.value)}});
  }
  doc["failing"] = std::move(failing);
  doc["passed"] = report.passed;
  return doc.dump(2) + "\n";
}

std::string sha256_prefix(std::string_view text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < 8 && i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string content_dataset_id(const Graph& g) {
  return sha256_prefix(serialize_ntriples(g));
}

}  // namespace ldq
