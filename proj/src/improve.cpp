#include "ldq/improve.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <numeric>

#include "ldq/errors.hpp"

namespace ldq {

namespace {

const std::string& rdf_type() {
  static const std::string iri = ns::rdf_("type");
  return iri;
}

using PredicateIndex = std::map<std::string, std::vector<const Triple*>>;

PredicateIndex by_predicate(const Graph& g, const Term& s) {
  PredicateIndex out;
  auto [begin, end] = g.subject_range(s);
  for (auto it = begin; it != end; ++it) out[it->predicate.value()].push_back(&*it);
  return out;
}

std::vector<const Triple*> objects_of(const PredicateIndex& index,
                                      const std::string& predicate) {
  auto it = index.find(predicate);
  return it == index.end() ? std::vector<const Triple*>{} : it->second;
}

const UnitEntry* subject_unit(const PredicateIndex& index, const UnitTable& units) {
  auto unit_triples = objects_of(index, vocab::unit());
  if (unit_triples.size() != 1 || !unit_triples[0]->object.is_literal()) return nullptr;
  return units.find(unit_triples[0]->object.value());
}

bool is_item_object(const Term& object) {
  return !(object.is_literal() && is_numeric_datatype(object.datatype()));
}

void add_if_absent(ImprovementAction& action, const Graph& g, Triple t) {
  if (!g.contains(t)) action.additions.insert(std::move(t));
}

Term annotation(const std::string& method_iri) { return Term::iri(method_iri); }

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool at_least(std::size_t count, std::size_t n, const Rational& fraction) {
  return BigInt(count) * fraction.get_den() >= fraction.get_num() * BigInt(n);
}

// Object term compatible with what the property expects.
bool fits_property(const Term& object, const PropertyRequirement& prop) {
  if (!prop.expects_literal()) return !object.is_literal();
  return object.is_literal() && lexical_conforms(object.value(), prop.datatype);
}

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 6 ? 2 : (c >> 4) == 14 ? 3 : (c >> 3) == 30 ? 4 : 1;
    if (i + len > s.size()) len = 1;
    char32_t cp = len == 1 ? c : len == 2 ? c & 0x1f : len == 3 ? c & 0x0f : c & 0x07;
    for (std::size_t k = 1; k < len; ++k)
      cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3f);
    out.push_back(cp);
    i += len;
  }
  return out;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

Term numeric_literal(const Rational& value, const std::string& datatype) {
  if (datatype == ns::xsd_("integer"))
    return Term::literal(round_half_even(value).get_str(), datatype);
  std::string dt = is_numeric_datatype(datatype) ? datatype : ns::xsd_("decimal");
  return Term::literal(format_fixed(value, 6), dt);
}

Term datetime_literal(UnixSeconds t) {
  return Term::literal(format_utc(t), ns::xsd_("dateTime"));
}

}  // namespace

// ---------------------------------------------------------------------------
// Association rules

std::string Item::text() const { return "(" + predicate + ", " + partner.text() + ")"; }

std::string AssociationRule::text() const {
  std::vector<std::string> parts;
  for (const auto& item : antecedent) parts.push_back(item.text());
  return "{" + join(parts, ", ") + "} => " + consequent.text();
}

std::vector<Transaction> build_transactions(const Graph& g, Orientation orientation) {
  std::map<std::string, std::set<Item>> keyed;
  for (const auto& t : g) {
    if (!is_item_object(t.object)) continue;
    if (orientation == Orientation::ObjectImputation)
      keyed[t.subject.text()].insert(Item{t.predicate.value(), t.object});
    else
      keyed[t.object.text()].insert(Item{t.predicate.value(), t.subject});
  }
  std::vector<Transaction> out;
  out.reserve(keyed.size());
  for (auto& [key, items] : keyed) out.push_back({key, std::move(items)});
  return out;
}

std::vector<AssociationRule> mine_apriori(const std::vector<Transaction>& transactions,
                                          const Rational& min_support,
                                          const Rational& min_confidence,
                                          Orientation orientation) {
  std::vector<AssociationRule> rules;
  const std::size_t n = transactions.size();
  if (n == 0) return rules;

  // Item ids follow item order, so sorted id vectors are sorted itemsets.
  std::set<Item> universe;
  for (const auto& tx : transactions) universe.insert(tx.items.begin(), tx.items.end());
  std::vector<Item> items(universe.begin(), universe.end());
  std::map<Item, int> id;
  for (std::size_t i = 0; i < items.size(); ++i) id[items[i]] = static_cast<int>(i);

  std::vector<std::vector<int>> tx_ids;
  tx_ids.reserve(n);
  for (const auto& tx : transactions) {
    std::vector<int> ids;
    for (const auto& item : tx.items) ids.push_back(id[item]);
    tx_ids.push_back(std::move(ids));
  }

  std::map<std::vector<int>, std::size_t> frequent;
  std::vector<std::vector<int>> level;
  {
    std::vector<std::size_t> counts(items.size(), 0);
    for (const auto& tx : tx_ids)
      for (int i : tx) ++counts[i];
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (at_least(counts[i], n, min_support)) {
        std::vector<int> set{static_cast<int>(i)};
        frequent[set] = counts[i];
        level.push_back(set);
      }
    }
  }

  while (level.size() > 1) {
    std::vector<std::vector<int>> candidates;
    for (std::size_t a = 0; a < level.size(); ++a) {
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        const auto& x = level[a];
        const auto& y = level[b];
        if (!std::equal(x.begin(), x.end() - 1, y.begin())) break;
        std::vector<int> c = x;
        c.push_back(y.back());
        bool pruned = false;
        for (std::size_t drop = 0; drop + 2 < c.size() && !pruned; ++drop) {
          std::vector<int> sub;
          for (std::size_t k = 0; k < c.size(); ++k)
            if (k != drop) sub.push_back(c[k]);
          pruned = !frequent.count(sub);
        }
        if (!pruned) candidates.push_back(std::move(c));
      }
    }
    std::vector<std::size_t> counts(candidates.size(), 0);
    for (const auto& tx : tx_ids) {
      if (tx.size() < (candidates.empty() ? 0 : candidates[0].size())) continue;
      for (std::size_t c = 0; c < candidates.size(); ++c)
        if (std::includes(tx.begin(), tx.end(), candidates[c].begin(), candidates[c].end()))
          ++counts[c];
    }
    std::vector<std::vector<int>> next;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (at_least(counts[c], n, min_support)) {
        frequent[candidates[c]] = counts[c];
        next.push_back(std::move(candidates[c]));
      }
    }
    level = std::move(next);
  }

  for (const auto& [set, count] : frequent) {
    if (set.size() < 2) continue;
    for (std::size_t j = 0; j < set.size(); ++j) {
      std::vector<int> ante;
      for (std::size_t k = 0; k < set.size(); ++k)
        if (k != j) ante.push_back(set[k]);
      Rational confidence = ratio(count, frequent.at(ante));
      if (confidence < min_confidence) continue;
      AssociationRule rule;
      for (int i : ante) rule.antecedent.push_back(items[i]);
      rule.consequent = items[set[j]];
      rule.support = ratio(count, n);
      rule.confidence = confidence;
      rule.orientation = orientation;
      rules.push_back(std::move(rule));
    }
  }

  std::vector<std::pair<std::string, std::size_t>> keyed;
  for (std::size_t i = 0; i < rules.size(); ++i) keyed.emplace_back(rules[i].text(), i);
  std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
    const auto& x = rules[a.second];
    const auto& y = rules[b.second];
    if (x.confidence != y.confidence) return x.confidence > y.confidence;
    if (x.support != y.support) return x.support > y.support;
    return a.first < b.first;
  });
  std::vector<AssociationRule> sorted;
  sorted.reserve(rules.size());
  for (const auto& k : keyed) sorted.push_back(std::move(rules[k.second]));
  return sorted;
}

// ---------------------------------------------------------------------------
// Actions

std::string_view action_kind_name(ActionKind kind) {
  switch (kind) {
    case ActionKind::ImputeTriple: return "ImputeTriple";
    case ActionKind::Interlink: return "Interlink";
    case ActionKind::RegressFill: return "RegressFill";
    case ActionKind::UnitNormalize: return "UnitNormalize";
    case ActionKind::Dedupe: return "Dedupe";
    case ActionKind::AlignTimestamp: return "AlignTimestamp";
    case ActionKind::FlagOutlier: return "FlagOutlier";
  }
  return "";
}

void apply_action(Graph& g, const ImprovementAction& action) {
  for (const auto& t : action.deletions) g.remove(t);
  for (const auto& t : action.additions)
    if (!g.contains(t)) g.add(t);
  if (action.kind == ActionKind::Dedupe) g.compact();
}

// ---------------------------------------------------------------------------
// Imputation

std::vector<AssociationRule> mine_clean_portion(const Graph& g,
                                                const std::vector<ShapeRequirement>& shapes,
                                                const ImprovementParams& params) {
  std::set<Term> gapped;
  for (const auto& shape : shapes) {
    for (const auto& inst : instances_of(g, shape.class_iri)) {
      auto index = by_predicate(g, inst);
      for (const auto& prop : shape.properties)
        if (!index.count(prop.predicate)) gapped.insert(inst);
    }
  }
  Graph clean;
  for (const auto& t : g)
    if (!gapped.count(t.subject)) clean.add(t);
  auto rules = mine_apriori(build_transactions(clean, Orientation::ObjectImputation),
                            params.min_support, params.min_confidence,
                            Orientation::ObjectImputation);
  auto subject_rules =
      mine_apriori(build_transactions(clean, Orientation::SubjectImputation),
                   params.min_support, params.min_confidence, Orientation::SubjectImputation);
  rules.insert(rules.end(), subject_rules.begin(), subject_rules.end());
  return rules;
}

ImprovementAction impute_missing(const Graph& g,
                                 const std::vector<ShapeRequirement>& shapes,
                                 const std::vector<AssociationRule>& rules) {
  ImprovementAction action;
  action.kind = ActionKind::ImputeTriple;
  action.method_iri = method::association_rule_mining();
  const Term imputed_by = Term::iri(vocab::imputed_by());
  const Term method_term = annotation(action.method_iri);

  std::map<std::string, std::size_t> declaring;
  for (const auto& shape : shapes)
    for (const auto& prop : shape.properties) ++declaring[prop.predicate];

  std::optional<std::vector<Transaction>> object_keyed;
  std::size_t filled = 0;

  for (const auto& shape : shapes) {
    for (const auto& inst : instances_of(g, shape.class_iri)) {
      auto index = by_predicate(g, inst);
      std::set<Item> items;
      for (const auto& [p, triples] : index)
        for (const Triple* t : triples)
          if (is_item_object(t->object)) items.insert(Item{p, t->object});

      for (const auto& prop : shape.properties) {
        if (index.count(prop.predicate)) continue;
        std::optional<Term> object;
        std::string why;
        for (const auto& rule : rules) {
          if (rule.orientation != Orientation::ObjectImputation) continue;
          if (rule.consequent.predicate != prop.predicate) continue;
          if (!fits_property(rule.consequent.partner, prop)) continue;
          if (!std::includes(items.begin(), items.end(), rule.antecedent.begin(),
                             rule.antecedent.end()))
            continue;
          object = rule.consequent.partner;
          why = rule.text();
          break;
        }
        if (!object && declaring[prop.predicate] == 1) {
          if (!object_keyed)
            object_keyed = build_transactions(g, Orientation::SubjectImputation);
          const Item wanted{prop.predicate, inst};
          std::vector<std::pair<Term, std::string>> candidates;
          for (const auto& tx : *object_keyed) {
            for (const auto& rule : rules) {
              if (rule.orientation != Orientation::SubjectImputation) continue;
              if (!(rule.consequent == wanted)) continue;
              if (!std::includes(tx.items.begin(), tx.items.end(), rule.antecedent.begin(),
                                 rule.antecedent.end()))
                continue;
              // The key is the object's N-Triples text; recover the term from
              // any triple that has it as object.
              const Item& any = *tx.items.begin();
              for (const auto& t : match(g, {any.partner, Term::iri(any.predicate),
                                             std::nullopt})) {
                if (t.object.text() == tx.key && fits_property(t.object, prop)) {
                  candidates.emplace_back(t.object, rule.text());
                  break;
                }
              }
              break;
            }
          }
          if (candidates.size() == 1) {
            object = candidates[0].first;
            why = candidates[0].second;
          }
        }
        if (!object) {
          action.findings.push_back("unresolved gap: " + inst.text() + " <" +
                                    prop.predicate + ">");
          continue;
        }
        add_if_absent(action, g, Triple(inst, Term::iri(prop.predicate), *object));
        add_if_absent(action, g, Triple(inst, imputed_by, method_term));
        ++filled;
        (void)why;
      }
    }
  }
  action.justification = "filled " + std::to_string(filled) + " completeness gaps from " +
                         std::to_string(rules.size()) + " association rules";
  return action;
}

// ---------------------------------------------------------------------------
// Interlinking

std::u32string canonical_label(std::string_view label) {
  std::u32string out;
  bool pending_space = false;
  for (char32_t c : decode_utf8(label)) {
    if (c == U'.' || c == U',' || c == U'_' || c == U'-') continue;
    if (c == U' ' || c == U'\t' || c == U'\n' || c == U'\r') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    if (c >= U'A' && c <= U'Z') c = c - U'A' + U'a';
    out.push_back(c);
  }
  return out;
}

std::size_t levenshtein(const std::u32string& a, const std::u32string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
      diag = up;
    }
  }
  return row[b.size()];
}

namespace {

Rational similarity(const std::u32string& a, const std::u32string& b) {
  std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1;
  return ratio(longest - levenshtein(a, b), longest);
}

}  // namespace

Rational label_similarity(std::string_view a, std::string_view b) {
  return similarity(canonical_label(a), canonical_label(b));
}

ImprovementAction interlink_clusters(const Graph& g, const std::string& label_predicate,
                                     const Rational& tau) {
  ImprovementAction action;
  action.kind = ActionKind::Interlink;
  action.method_iri = method::clustering_data_interlinking();

  // Entities are compared within the same set of rdf:type classes.
  struct Entity {
    Term subject;
    std::vector<std::u32string> labels;
  };
  std::map<std::string, std::vector<Entity>> groups;
  for_each_subject(g, [&](const Term& s, const std::vector<const Triple*>& triples) {
    Entity e{s, {}};
    std::vector<std::string> types;
    for (const Triple* t : triples) {
      if (t->predicate.value() == label_predicate && t->object.is_literal())
        e.labels.push_back(canonical_label(t->object.value()));
      if (t->predicate.value() == rdf_type()) types.push_back(t->object.text());
    }
    if (e.labels.empty()) return;
    std::sort(types.begin(), types.end());
    groups[join(types, " ")].push_back(std::move(e));
  });

  const Term same_as = Term::iri(ns::owl_("sameAs"));
  const Term imputed_by = Term::iri(vocab::imputed_by());
  const Term method_term = annotation(action.method_iri);
  std::size_t clusters = 0;

  for (auto& [key, entities] : groups) {
    std::map<std::u32string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < entities.size(); ++i)
      for (const auto& l : entities[i].labels) by_label[l].push_back(i);

    UnionFind uf(entities.size());
    std::vector<std::pair<const std::u32string*, std::size_t>> distinct;
    for (const auto& [label, members] : by_label) {
      for (std::size_t m : members) uf.unite(members[0], m);
      distinct.emplace_back(&label, members[0]);
    }
    for (std::size_t a = 0; a < distinct.size(); ++a) {
      for (std::size_t b = a + 1; b < distinct.size(); ++b) {
        const auto& x = *distinct[a].first;
        const auto& y = *distinct[b].first;
        std::size_t shortest = std::min(x.size(), y.size());
        std::size_t longest = std::max(x.size(), y.size());
        // similarity <= shortest / longest
        if (longest > 0 &&
            BigInt(shortest) * tau.get_den() < tau.get_num() * BigInt(longest))
          continue;
        if (similarity(x, y) >= tau) uf.unite(distinct[a].second, distinct[b].second);
      }
    }

    std::map<std::size_t, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < entities.size(); ++i) members[uf.find(i)].push_back(i);
    for (const auto& [root, cluster] : members) {
      if (cluster.size() < 2) continue;
      ++clusters;
      const Term* canonical = &entities[cluster[0]].subject;
      for (std::size_t i : cluster)
        if (entities[i].subject < *canonical) canonical = &entities[i].subject;
      for (std::size_t i : cluster) {
        const Term& s = entities[i].subject;
        if (s == *canonical) continue;
        add_if_absent(action, g, Triple(s, same_as, *canonical));
        add_if_absent(action, g, Triple(s, imputed_by, method_term));
      }
    }
  }
  action.justification = std::to_string(clusters) + " clusters at similarity >= " +
                         format_decimal(tau);
  return action;
}

// ---------------------------------------------------------------------------
// Regression

double RegressionModel::predict(UnixSeconds t) const {
  if (y_scale == 0) return y_mean;
  double x = static_cast<double>(t - t_min) / static_cast<double>(t_max - t_min);
  return (weight * x + bias) * y_scale + y_mean;
}

RegressionModel train_svr(const std::vector<SeriesPoint>& points,
                          const SvrHyperparameters& hyper) {
  if (points.size() < 5) throw Error("support vector regression needs at least 5 points");
  RegressionModel m;
  m.epsilon = hyper.epsilon;
  m.lambda = hyper.lambda;
  m.iterations = hyper.iterations;
  m.t_min = m.t_max = points[0].t;
  for (const auto& p : points) {
    m.t_min = std::min(m.t_min, p.t);
    m.t_max = std::max(m.t_max, p.t);
  }
  if (m.t_min == m.t_max) throw DegenerateTimeRange();

  const double n = static_cast<double>(points.size());
  double mean = 0;
  for (const auto& p : points) mean += p.y;
  mean /= n;
  double var = 0;
  for (const auto& p : points) var += (p.y - mean) * (p.y - mean);
  double scale = std::sqrt(var / n);
  m.y_mean = mean;
  if (scale <= 1e-12 * std::max(1.0, std::abs(mean))) {
    m.y_scale = 0;
    return m;
  }
  m.y_scale = scale;

  std::vector<double> xs, ys;
  const double span = static_cast<double>(m.t_max - m.t_min);
  for (const auto& p : points) {
    xs.push_back(static_cast<double>(p.t - m.t_min) / span);
    ys.push_back((p.y - mean) / scale);
  }
  double w = 0, b = 0;
  for (int it = 0; it < hyper.iterations; ++it) {
    double gw = 0, gb = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double r = ys[i] - (w * xs[i] + b);
      if (r > hyper.epsilon) {
        gw -= xs[i];
        gb -= 1;
      } else if (r < -hyper.epsilon) {
        gw += xs[i];
        gb += 1;
      }
    }
    gw = gw / n + 2 * hyper.lambda * w;
    gb /= n;
    double eta = hyper.eta0 / (1.0 + it);
    w -= eta * gw;
    b -= eta * gb;
  }
  m.weight = w;
  m.bias = b;
  return m;
}

namespace {

struct SeriesInstance {
  Term subject;
  UnixSeconds t;
  PredicateIndex index;
};

std::int64_t slot_of(UnixSeconds t, UnixSeconds origin, std::int64_t grid) {
  std::int64_t d = t - origin;
  std::int64_t k = d / grid;
  std::int64_t r = d - k * grid;
  return 2 * r > grid ? k + 1 : k;
}

}  // namespace

ImprovementAction regress_fill(const Graph& g, const std::vector<ShapeRequirement>& shapes,
                               std::int64_t grid_seconds, const SvrHyperparameters& hyper,
                               const UnitTable& units) {
  ImprovementAction action;
  action.kind = ActionKind::RegressFill;
  action.method_iri = method::support_vector_regression();
  if (grid_seconds <= 0) throw ConfigError("improvement.gridSeconds", "must be positive");
  const Term imputed_by = Term::iri(vocab::imputed_by());
  const Term method_term = annotation(action.method_iri);
  const Term unit_pred = Term::iri(vocab::unit());
  std::size_t filled = 0, minted = 0;

  for (const auto& shape : shapes) {
    // Series per source.
    std::map<std::string, std::pair<std::optional<Term>, std::vector<SeriesInstance>>> groups;
    for (const auto& inst : instances_of(g, shape.class_iri)) {
      auto index = by_predicate(g, inst);
      std::optional<UnixSeconds> t;
      for (const Triple* o : objects_of(index, vocab::observed_at()))
        if (o->object.is_literal() && (t = parse_utc(o->object.value()))) break;
      if (!t) continue;
      auto sources = objects_of(index, vocab::source());
      std::optional<Term> source;
      if (!sources.empty()) source = sources[0]->object;
      auto& group = groups[source ? source->text() : std::string()];
      group.first = source;
      group.second.push_back({inst, *t, std::move(index)});
    }

    for (auto& [key, group] : groups) {
      auto& series = group.second;
      if (series.size() < 2) continue;
      std::sort(series.begin(), series.end(), [](const auto& a, const auto& b) {
        return a.t != b.t ? a.t < b.t : a.subject < b.subject;
      });
      const UnixSeconds origin = series.front().t;
      const std::int64_t last_slot = slot_of(series.back().t, origin, grid_seconds);
      std::map<std::int64_t, std::vector<const SeriesInstance*>> occupied;
      for (const auto& s : series) occupied[slot_of(s.t, origin, grid_seconds)].push_back(&s);

      std::vector<std::int64_t> empty_slots;
      for (std::int64_t k = 0; k <= last_slot; ++k)
        if (!occupied.count(k)) empty_slots.push_back(k);
      if (empty_slots.size() > series.size()) {
        action.findings.push_back("series " + shape.class_iri + " " + key + " has " +
                                  std::to_string(empty_slots.size()) +
                                  " empty slots for " + std::to_string(series.size()) +
                                  " readings; not a gap series");
        continue;
      }

      struct Predictor {
        const PropertyRequirement* prop = nullptr;
        std::vector<std::pair<UnixSeconds, Rational>> points;
        std::optional<RegressionModel> model;
        const UnitEntry* out_unit = nullptr;
        bool usable = false;
      };
      std::vector<Predictor> predictors;
      for (const auto& prop : shape.properties) {
        if (!prop.is_numeric()) continue;
        Predictor pr;
        pr.prop = &prop;
        std::set<std::string> symbols;
        for (const auto& s : series) {
          const UnitEntry* unit = prop.unit_dimension ? subject_unit(s.index, units) : nullptr;
          for (const Triple* o : objects_of(s.index, prop.predicate)) {
            if (!o->object.is_literal()) continue;
            auto v = parse_decimal(o->object.value());
            if (!v) continue;
            Rational c = *v;
            if (unit && unit->dimension == *prop.unit_dimension) {
              c = convert_unit(*v, *unit, unit->dimension);
              symbols.insert(unit->symbol);
            } else if (prop.unit_dimension) {
              symbols.insert("");
            }
            pr.points.emplace_back(s.t, c);
            break;
          }
        }
        if (prop.unit_dimension) {
          pr.out_unit = units.canonical(*prop.unit_dimension);
          if (symbols.size() == 1 && !symbols.begin()->empty())
            pr.out_unit = units.find(*symbols.begin());
        }
        if (pr.points.size() >= 5) {
          std::vector<SeriesPoint> pts;
          for (const auto& [t, v] : pr.points) pts.push_back({t, to_double(v)});
          try {
            pr.model = train_svr(pts, hyper);
            pr.usable = true;
          } catch (const DegenerateTimeRange&) {
            action.findings.push_back("degenerate time range for <" + prop.predicate + ">");
          }
        } else if (pr.points.size() >= 2) {
          pr.usable = true;
        }
        predictors.push_back(std::move(pr));
      }

      // Canonical-unit prediction at t; nullopt outside the interpolation span.
      auto predict = [](const Predictor& pr, UnixSeconds t) -> std::optional<Rational> {
        if (pr.model) return Rational(pr.model->predict(t));
        const auto& pts = pr.points;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
          auto [t0, y0] = pts[i];
          auto [t1, y1] = pts[i + 1];
          if (t0 <= t && t <= t1) {
            if (t0 == t1) return y0;
            Rational f = ratio(t - t0, t1 - t0);
            Rational y = y0 + (y1 - y0) * f;
            y.canonicalize();
            return y;
          }
        }
        return std::nullopt;
      };
      auto literal_for = [&](const Predictor& pr, const Rational& canonical,
                             const UnitEntry* unit) {
        Rational v = unit ? from_canonical(canonical, *unit) : canonical;
        return numeric_literal(v, pr.prop->datatype);
      };

      // Instances on the grid that lack a numeric property.
      for (const auto& [slot, members] : occupied) {
        for (const auto& pr : predictors) {
          if (!pr.usable) continue;
          bool has = false;
          for (const auto* m : members) has = has || m->index.count(pr.prop->predicate);
          if (has) continue;
          const SeriesInstance* target = members.front();
          UnixSeconds t = origin + slot * grid_seconds;
          auto value = predict(pr, t);
          if (!value) continue;
          const UnitEntry* unit = pr.out_unit;
          if (pr.prop->unit_dimension) {
            const UnitEntry* own = subject_unit(target->index, units);
            if (own && own->dimension == *pr.prop->unit_dimension)
              unit = own;
            else if (unit && objects_of(target->index, vocab::unit()).empty())
              add_if_absent(action, g,
                            Triple(target->subject, unit_pred, Term::literal(unit->symbol)));
          }
          add_if_absent(action, g,
                        Triple(target->subject, Term::iri(pr.prop->predicate),
                               literal_for(pr, *value, unit)));
          add_if_absent(action, g, Triple(target->subject, imputed_by, method_term));
          ++filled;
        }
      }

      if (empty_slots.empty()) continue;
      // Attributes every reading of the series shares.
      std::vector<std::pair<Term, Term>> shared;
      for (const auto& prop : shape.properties) {
        if (prop.is_numeric()) continue;
        std::optional<Term> common;
        bool same = true;
        for (const auto& s : series) {
          auto objs = objects_of(s.index, prop.predicate);
          if (objs.size() != 1 || (common && !(*common == objs[0]->object))) {
            same = false;
            break;
          }
          common = objs[0]->object;
        }
        if (same && common) shared.emplace_back(Term::iri(prop.predicate), *common);
      }
      std::optional<Term> generated;
      for (const auto& s : series)
        for (const Triple* o : objects_of(s.index, vocab::generated_at()))
          if (!generated || *generated < o->object) generated = o->object;

      for (std::int64_t slot : empty_slots) {
        UnixSeconds t = origin + slot * grid_seconds;
        std::vector<Triple> values;
        const UnitEntry* unit = nullptr;
        Term subject = Term::iri("urn:ldq:fill:" +
                                 sha256_prefix(shape.class_iri + "|" + key + "|" +
                                               std::to_string(t)));
        for (const auto& pr : predictors) {
          if (!pr.usable) continue;
          auto value = predict(pr, t);
          if (!value) continue;
          if (pr.prop->unit_dimension) unit = pr.out_unit;
          values.emplace_back(subject, Term::iri(pr.prop->predicate),
                              literal_for(pr, *value, pr.prop->unit_dimension ? pr.out_unit
                                                                              : nullptr));
        }
        if (values.empty()) continue;
        ++minted;
        add_if_absent(action, g, Triple(subject, Term::iri(rdf_type()),
                                        Term::iri(shape.class_iri)));
        for (auto& v : values) add_if_absent(action, g, std::move(v));
        if (unit)
          add_if_absent(action, g, Triple(subject, unit_pred, Term::literal(unit->symbol)));
        for (const auto& [p, o] : shared) add_if_absent(action, g, Triple(subject, p, o));
        if (group.first)
          add_if_absent(action, g,
                        Triple(subject, Term::iri(vocab::source()), *group.first));
        if (generated)
          add_if_absent(action, g,
                        Triple(subject, Term::iri(vocab::generated_at()), *generated));
        add_if_absent(action, g, Triple(subject, Term::iri(vocab::observed_at()),
                                        datetime_literal(t)));
        add_if_absent(action, g, Triple(subject, imputed_by, method_term));
      }
    }
  }
  action.justification = "filled " + std::to_string(filled) + " values and " +
                         std::to_string(minted) + " missing readings on a " +
                         std::to_string(grid_seconds) + "s grid";
  return action;
}

// ---------------------------------------------------------------------------
// ETL

UnixSeconds align_to_grid(UnixSeconds t, std::int64_t grid_seconds) {
  if (grid_seconds <= 0) throw ConfigError("improvement.gridSeconds", "must be positive");
  std::int64_t r = t % grid_seconds;
  if (r < 0) r += grid_seconds;
  if (r == 0) return t;
  return 2 * r <= grid_seconds ? t - r : t + (grid_seconds - r);
}

ImprovementAction unit_normalize(const Graph& g, const std::vector<ShapeRequirement>& shapes,
                                 const UnitTable& units) {
  ImprovementAction action;
  action.kind = ActionKind::UnitNormalize;
  action.method_iri = method::etl();
  const Term imputed_by = Term::iri(vocab::imputed_by());
  const Term method_term = annotation(action.method_iri);
  std::size_t converted = 0;

  for (const auto& shape : shapes) {
    for (const auto& inst : instances_of(g, shape.class_iri)) {
      auto index = by_predicate(g, inst);
      for (const auto& prop : shape.properties) {
        if (!prop.unit_dimension || !index.count(prop.predicate)) continue;
        auto unit_triples = objects_of(index, vocab::unit());
        if (unit_triples.empty()) continue;
        if (unit_triples.size() > 1 || !unit_triples[0]->object.is_literal()) {
          action.findings.push_back("ambiguous unit on " + inst.text());
          continue;
        }
        const std::string& symbol = unit_triples[0]->object.value();
        const UnitEntry* from = units.find(symbol);
        if (!from) {
          action.findings.push_back("unknown unit symbol '" + symbol + "' on " + inst.text());
          continue;
        }
        if (from->dimension != *prop.unit_dimension) {
          action.findings.push_back("unit '" + symbol + "' on " + inst.text() + " is not " +
                                    std::string(unit_dimension_name(*prop.unit_dimension)));
          continue;
        }
        const UnitEntry* to = units.canonical(*prop.unit_dimension);
        if (!to || to->symbol == from->symbol) continue;
        for (const Triple* t : objects_of(index, prop.predicate)) {
          if (!t->object.is_literal()) continue;
          auto value = parse_decimal(t->object.value());
          if (!value) continue;
          Rational c = convert_unit(*value, *from, *prop.unit_dimension);
          std::string dt = t->object.datatype();
          if (dt == ns::xsd_("integer") && c.get_den() != 1) dt = ns::xsd_("decimal");
          action.deletions.insert(*t);
          action.additions.insert(
              Triple(inst, t->predicate, Term::literal(format_decimal(c), dt)));
          ++converted;
        }
        action.deletions.insert(*unit_triples[0]);
        action.additions.insert(Triple(inst, unit_triples[0]->predicate,
                                       Term::literal(to->symbol)));
        add_if_absent(action, g, Triple(inst, imputed_by, method_term));
      }
    }
  }
  action.justification = "converted " + std::to_string(converted) + " values to canonical units";
  return action;
}

ImprovementAction align_timestamps(const Graph& g, std::int64_t grid_seconds) {
  ImprovementAction action;
  action.kind = ActionKind::AlignTimestamp;
  action.method_iri = method::etl();
  const Term imputed_by = Term::iri(vocab::imputed_by());
  const Term method_term = annotation(action.method_iri);
  const Term original = Term::iri(vocab::original_observed_at());
  std::size_t aligned = 0;
  for (const auto& t : match(g, {std::nullopt, Term::iri(vocab::observed_at()), std::nullopt})) {
    if (!t.object.is_literal()) continue;
    auto when = parse_utc(t.object.value());
    if (!when) continue;
    UnixSeconds slot = align_to_grid(*when, grid_seconds);
    if (slot == *when) continue;
    action.deletions.insert(t);
    action.additions.insert(Triple(t.subject, t.predicate, datetime_literal(slot)));
    if (match(g, {t.subject, original, std::nullopt}).empty())
      action.additions.insert(Triple(t.subject, original, t.object));
    add_if_absent(action, g, Triple(t.subject, imputed_by, method_term));
    ++aligned;
  }
  action.justification = "aligned " + std::to_string(aligned) + " timestamps to a " +
                         std::to_string(grid_seconds) + "s grid";
  return action;
}

ImprovementAction flag_outliers(const Graph& g, const std::vector<ShapeRequirement>& shapes,
                                const UnitTable& units) {
  ImprovementAction action;
  action.kind = ActionKind::FlagOutlier;
  action.method_iri = method::etl();
  const Term flag = Term::iri(vocab::flagged_outlier());
  const Term yes = Term::literal("true", ns::xsd_("boolean"));
  const Term imputed_by = Term::iri(vocab::imputed_by());
  const Term method_term = annotation(action.method_iri);
  std::size_t flagged = 0;
  for (const auto& t : outlier_triples(g, shapes, units)) {
    Triple f(t.subject, flag, yes);
    if (g.contains(f) || action.additions.count(f)) continue;
    action.additions.insert(std::move(f));
    add_if_absent(action, g, Triple(t.subject, imputed_by, method_term));
    ++flagged;
  }
  action.justification = "flagged " + std::to_string(flagged) + " outlying subjects";
  return action;
}

ImprovementAction dedupe(const Graph& g) {
  ImprovementAction action;
  action.kind = ActionKind::Dedupe;
  action.method_iri = method::etl();
  action.duplicates_removed = g.raw_statement_count() - g.size();
  action.justification =
      "removed " + std::to_string(action.duplicates_removed) + " duplicate statements";
  return action;
}

EtlResult etl_normalize(const Graph& g, const std::vector<ShapeRequirement>& shapes,
                        const UnitTable& units, std::int64_t grid_seconds) {
  EtlResult out{g, {}};
  auto step = [&](ImprovementAction action) {
    apply_action(out.graph, action);
    if (!action.empty() || !action.findings.empty()) out.actions.push_back(std::move(action));
  };
  step(unit_normalize(out.graph, shapes, units));
  step(align_timestamps(out.graph, grid_seconds));
  step(flag_outliers(out.graph, shapes, units));
  step(dedupe(out.graph));
  return out;
}

// ---------------------------------------------------------------------------
// Orchestration

Graph graph_difference(const Graph& a, const Graph& b) {
  Graph out;
  for (const auto& t : a)
    if (!b.contains(t)) out.add(t);
  return out;
}

ImproveResult improve(const Graph& g, const AssessmentReport& report,
                      const QualityPolicy& policy, const AssessOptions& options) {
  ImproveResult result{g, {}, {}, {}};

  std::set<std::string> failing_categories;
  for (const auto& f : report.failing)
    if (f.is_category) failing_categories.insert(f.id);
  for (const auto& m : report.measurements) {
    bool target = report.is_failing(m.metric_id) ||
                  (failing_categories.count(std::string(category_name(m.category))) &&
                   m.value < 1);
    if (target) result.targets.push_back(m.metric_id);
  }
  auto targeted = [&](std::string_view id) {
    return std::find(result.targets.begin(), result.targets.end(), id) !=
           result.targets.end();
  };

  const UnitTable& units = UnitTable::builtin();
  const auto& params = policy.improvement;

  std::map<std::string, Rational> current;
  auto measure = [&](const Graph& graph, const std::string& id) -> std::optional<Rational> {
    try {
      return measure_metric(graph, policy, id, options).value;
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  for (const auto& id : result.targets)
    if (auto v = measure(result.graph, id)) current[id] = *v;

  auto run_family = [&](const std::string& method_iri,
                        const std::function<std::vector<ImprovementAction>(const Graph&)>& fn) {
    auto actions = fn(result.graph);
    for (auto& a : actions) {
      apply_action(result.graph, a);
      result.actions.push_back(std::move(a));
    }
    for (const auto& id : result.targets) {
      auto after = measure(result.graph, id);
      auto before = current.find(id);
      if (!after || before == current.end()) continue;
      Rational delta = *after - before->second;
      result.precision.push_back({id, before->second, *after, delta, method_iri});
      before->second = *after;
    }
  };

  bool full_etl = targeted(metric::consistency);
  bool flag = targeted(metric::semantic_accuracy);
  bool dedup = targeted(metric::compactness);
  if (full_etl || flag || dedup) {
    run_family(method::etl(), [&](const Graph& graph) {
      if (full_etl)
        return etl_normalize(graph, policy.shapes, units, params.grid_seconds).actions;
      std::vector<ImprovementAction> actions;
      Graph work = graph;
      if (flag) {
        actions.push_back(flag_outliers(work, policy.shapes, units));
        apply_action(work, actions.back());
      }
      if (dedup) actions.push_back(dedupe(work));
      return actions;
    });
  }
  if (targeted(metric::interlinking)) {
    run_family(method::clustering_data_interlinking(), [&](const Graph& graph) {
      return std::vector<ImprovementAction>{
          interlink_clusters(graph, params.label_predicate, params.tau)};
    });
  }
  if (targeted(metric::completeness)) {
    run_family(method::association_rule_mining(), [&](const Graph& graph) {
      auto rules = mine_clean_portion(graph, policy.shapes, params);
      return std::vector<ImprovementAction>{impute_missing(graph, policy.shapes, rules)};
    });
    run_family(method::support_vector_regression(), [&](const Graph& graph) {
      return std::vector<ImprovementAction>{
          regress_fill(graph, policy.shapes, params.grid_seconds, params.svr, units)};
    });
  }
  return result;
}

std::string improvement_log_json(const ImproveResult& result) {
  using json = nlohmann::ordered_json;
  auto number = [](const Rational& v) {
    return json{{"value", format_decimal(v)}, {"fraction", to_fraction_string(v)}};
  };
  json actions = json::array();
  for (const auto& a : result.actions) {
    json entry{{"kind", action_kind_name(a.kind)},
               {"method", a.method_iri},
               {"justification", a.justification},
               {"additions", a.additions.size()},
               {"deletions", a.deletions.size()}};
    if (a.kind == ActionKind::Dedupe) entry["duplicatesRemoved"] = a.duplicates_removed;
    entry["findings"] = a.findings;
    actions.push_back(std::move(entry));
  }
  json precision = json::array();
  for (const auto& p : result.precision)
    precision.push_back({{"metric", p.metric_id},
                         {"method", p.method_iri},
                         {"before", number(p.before)},
                         {"after", number(p.after)},
                         {"delta", number(p.delta)}});
  json out{{"targets", result.targets}, {"actions", actions}, {"precision", precision}};
  return out.dump(2) + "\n";
}

}  // namespace ldq
