#include "docgraph/relations.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "docgraph/errors.hpp"
#include "docgraph/spatial.hpp"
#include "docgraph/validate.hpp"

namespace docgraph {

std::string_view to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::TableRef: return "table";
    case ReferenceKind::FigureRef: return "figure";
    case ReferenceKind::FootnoteRef: return "footnote";
  }
  return "?";
}

std::vector<ReferencePattern> default_reference_patterns() {
  return {
      {ReferenceKind::TableRef, R"(Table\s*(\d+))", 1},
      {ReferenceKind::TableRef, R"(Tab\.\s*(\d+))", 1},
      {ReferenceKind::FigureRef, R"(Figure\s*(\d+))", 1},
      {ReferenceKind::FigureRef, R"(Fig\.\s*(\d+))", 1},
      {ReferenceKind::FootnoteRef, R"(^\s*(\d+))", 1},
      {ReferenceKind::FootnoteRef, R"(^\s*(\*|†|‡))", 1},
  };
}

std::vector<ReferencePattern> load_reference_patterns(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open pattern file: " + path);
  }
  std::vector<ReferencePattern> patterns;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::ostringstream location;
    location << path << ":" << line_no;
    const auto first_tab = line.find('\t');
    if (first_tab == std::string::npos) {
      throw FormatError(location.str(), "expected kind<TAB>pattern");
    }
    ReferencePattern pattern;
    const std::string kind = line.substr(0, first_tab);
    if (kind == "table") {
      pattern.kind = ReferenceKind::TableRef;
    } else if (kind == "figure") {
      pattern.kind = ReferenceKind::FigureRef;
    } else if (kind == "footnote") {
      pattern.kind = ReferenceKind::FootnoteRef;
    } else {
      throw FormatError(location.str(), "unknown pattern kind '" + kind + "'");
    }
    std::string rest = line.substr(first_tab + 1);
    if (const auto second_tab = rest.find('\t'); second_tab != std::string::npos) {
      try {
        pattern.ordinal_group = std::stoi(rest.substr(second_tab + 1));
      } catch (const std::exception&) {
        throw FormatError(location.str(), "capture group must be an integer");
      }
      rest.resize(second_tab);
    }
    if (rest.empty()) {
      throw FormatError(location.str(), "empty pattern");
    }
    pattern.pattern = rest;
    try {
      std::regex probe(pattern.pattern, std::regex::icase);
      if (pattern.ordinal_group < 1 ||
          static_cast<std::size_t>(pattern.ordinal_group) > probe.mark_count()) {
        throw FormatError(location.str(), "capture group out of range");
      }
    } catch (const std::regex_error& e) {
      throw FormatError(location.str(), std::string("bad regex: ") + e.what());
    }
    patterns.push_back(std::move(pattern));
  }
  return patterns;
}

std::vector<RelationEdge> emit_parent_child(const HierarchyForest& forest) {
  std::vector<RelationEdge> edges;
  edges.reserve(2 * forest.parent_of.size());
  for (const auto& [child, parent] : forest.parent_of) {
    edges.push_back({parent, child, RelationType::Parent, std::nullopt, std::nullopt});
    edges.push_back({child, parent, RelationType::Child, std::nullopt, std::nullopt});
  }
  return edges;
}

std::vector<RelationEdge> emit_sequence(const HierarchyForest& forest,
                                        const ReadingOrder& order) {
  std::unordered_map<int, std::size_t> pos;
  for (std::size_t i = 0; i < order.order.size(); ++i) {
    pos[order.order[i]] = i;
  }

  std::vector<RelationEdge> edges;
  const auto chain = [&](std::vector<int> group) {
    std::sort(group.begin(), group.end(),
              [&pos](int a, int b) { return pos.at(a) < pos.at(b); });
    for (std::size_t i = 0; i + 1 < group.size(); ++i) {
      edges.push_back({group[i], group[i + 1], RelationType::Sequence, std::nullopt, std::nullopt});
    }
  };

  chain(forest.roots);
  for (const auto& [parent, children] : forest.children()) {
    chain(children);
  }
  return edges;
}

namespace {

struct CompiledPattern {
  ReferenceKind kind;
  std::regex regex;
  int ordinal_group;
};

std::vector<CompiledPattern> compile(const std::vector<ReferencePattern>& patterns) {
  std::vector<CompiledPattern> compiled;
  compiled.reserve(patterns.size());
  for (const ReferencePattern& pattern : patterns) {
    compiled.push_back({pattern.kind, std::regex(pattern.pattern, std::regex::icase),
                        pattern.ordinal_group});
  }
  return compiled;
}

bool all_digits(const std::string& token) {
  return !token.empty() &&
         std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); });
}

// A plain-text stand-in for a superscript: the number must be glued to the
// preceding word (optionally through closing punctuation) and not be part of
// a longer number.
bool has_glued_number(const std::string& text, const std::string& number) {
  const std::regex marker("[A-Za-z][\\)\\]\\.,;:'\"]*(" + number + ")(?!\\d)");
  return std::regex_search(text, marker);
}

std::optional<int> parse_ordinal(const std::string& token) {
  if (!all_digits(token) || token.size() > 8) {
    return std::nullopt;
  }
  const int value = std::stoi(token);
  return value > 0 ? std::optional<int>(value) : std::nullopt;
}

}  // namespace

std::vector<RelationEdge> emit_references(const Page& page,
                                          const std::vector<std::pair<int, int>>& captions,
                                          const ReadingOrder& order,
                                          const std::vector<ReferencePattern>& patterns) {
  const std::vector<CompiledPattern> compiled = compile(patterns);

  std::unordered_map<int, std::size_t> pos;
  for (std::size_t i = 0; i < order.order.size(); ++i) {
    pos[order.order[i]] = i;
  }
  std::unordered_map<int, const LayoutInstance*> by_id;
  for (const LayoutInstance& instance : page.instances) {
    by_id[instance.id] = &instance;
  }

  std::unordered_map<int, int> container_of;  // caption -> container
  std::unordered_map<int, std::vector<int>> captions_of;
  for (const auto& [caption, container] : captions) {
    container_of[caption] = container;
    captions_of[container].push_back(caption);
  }

  const auto in_reading_order = [&pos](std::vector<const LayoutInstance*>& instances) {
    std::sort(instances.begin(), instances.end(),
              [&pos](const LayoutInstance* a, const LayoutInstance* b) {
                return pos.at(a->id) < pos.at(b->id);
              });
  };

  std::vector<const LayoutInstance*> tables;
  std::vector<const LayoutInstance*> pictures;
  std::vector<const LayoutInstance*> footnotes;
  for (const LayoutInstance& instance : page.instances) {
    if (instance.category == Category::Table) {
      tables.push_back(&instance);
    } else if (instance.category == Category::Picture) {
      pictures.push_back(&instance);
    } else if (instance.category == Category::Footnote) {
      footnotes.push_back(&instance);
    }
  }
  in_reading_order(tables);
  in_reading_order(pictures);
  in_reading_order(footnotes);

  // Marker index: ordinal -> container whose caption mentions it. The first
  // container in reading order claims an ordinal.
  const auto caption_markers = [&](const std::vector<const LayoutInstance*>& containers,
                                   ReferenceKind kind) {
    std::unordered_map<int, int> index;
    for (const LayoutInstance* container : containers) {
      for (int caption_id : captions_of[container->id]) {
        const LayoutInstance* caption = by_id.at(caption_id);
        if (!caption->text) {
          continue;
        }
        for (const CompiledPattern& pattern : compiled) {
          if (pattern.kind != kind) {
            continue;
          }
          for (std::sregex_iterator it(caption->text->begin(), caption->text->end(), pattern.regex), end;
               it != end; ++it) {
            if (auto ordinal = parse_ordinal(it->str(pattern.ordinal_group))) {
              index.try_emplace(*ordinal, container->id);
            }
          }
        }
      }
    }
    return index;
  };
  const std::unordered_map<int, int> table_markers = caption_markers(tables, ReferenceKind::TableRef);
  const std::unordered_map<int, int> picture_markers = caption_markers(pictures, ReferenceKind::FigureRef);

  // Footnote markers: the token at the start of the footnote text. The first
  // footnote in reading order claims a marker.
  std::vector<std::pair<std::string, int>> footnote_markers;
  std::set<std::string> claimed_markers;
  for (const LayoutInstance* footnote : footnotes) {
    if (!footnote->text) {
      continue;
    }
    for (const CompiledPattern& pattern : compiled) {
      if (pattern.kind != ReferenceKind::FootnoteRef) {
        continue;
      }
      std::smatch match;
      if (std::regex_search(*footnote->text, match, pattern.regex)) {
        const std::string marker = match.str(pattern.ordinal_group);
        if (!marker.empty() && claimed_markers.insert(marker).second) {
          footnote_markers.emplace_back(marker, footnote->id);
        }
        break;
      }
    }
  }

  // Subjects: textual instances of the Structural and NonTextualContent
  // groups, visited in reading order.
  std::vector<const LayoutInstance*> subjects;
  for (const LayoutInstance& instance : page.instances) {
    const RoleGroup group = role_group(instance.category);
    if (instance.text &&
        (group == RoleGroup::Structural || group == RoleGroup::NonTextualContent)) {
      subjects.push_back(&instance);
    }
  }
  in_reading_order(subjects);

  std::vector<RelationEdge> edges;
  std::set<std::pair<int, int>> seen;
  const auto emit = [&](const LayoutInstance* subject, int object) {
    if (object == subject->id) {
      return;  // self reference
    }
    // A caption mentioning its own container is already covered by the
    // parent/child pair, not a reference.
    if (auto it = container_of.find(subject->id);
        it != container_of.end() && it->second == object) {
      return;
    }
    if (seen.insert({subject->id, object}).second) {
      edges.push_back({subject->id, object, RelationType::Reference, std::nullopt, std::nullopt});
    }
  };

  for (const LayoutInstance* subject : subjects) {
    const std::string& text = *subject->text;
    for (const CompiledPattern& pattern : compiled) {
      if (pattern.kind == ReferenceKind::FootnoteRef) {
        continue;
      }
      const auto& markers =
          pattern.kind == ReferenceKind::TableRef ? table_markers : picture_markers;
      const auto& containers = pattern.kind == ReferenceKind::TableRef ? tables : pictures;
      for (std::sregex_iterator it(text.begin(), text.end(), pattern.regex), end; it != end;
           ++it) {
        const auto ordinal = parse_ordinal(it->str(pattern.ordinal_group));
        if (!ordinal) {
          continue;
        }
        if (auto hit = markers.find(*ordinal); hit != markers.end()) {
          emit(subject, hit->second);
        } else if (static_cast<std::size_t>(*ordinal) <= containers.size()) {
          emit(subject, containers[*ordinal - 1]->id);
        }
      }
    }
    for (const auto& [marker, footnote_id] : footnote_markers) {
      if (footnote_id == subject->id) {
        continue;
      }
      const bool mentioned = all_digits(marker) ? has_glued_number(text, marker)
                                                : text.find(marker) != std::string::npos;
      if (mentioned) {
        emit(subject, footnote_id);
      }
    }
  }
  return edges;
}

DocumentGraph annotate(const Page& page, const AnnotateConfig& config) {
  ValidationReport report = validate_page(page);
  if (!report.ok()) {
    throw ValidationError({report});
  }

  DocumentGraph graph{page};
  graph.page.relations.clear();

  const ReadingOrder order = reading_order(page, config.xy_min_gap);

  std::vector<RelationEdge> edges;
  if (config.spatial) {
    std::vector<RelationEdge> spatial = extract_spatial(page);
    edges.insert(edges.end(), spatial.begin(), spatial.end());
  }
  if (config.logical) {
    const auto captions = associate_captions(page, order);
    const HierarchyForest forest = build_hierarchy(page, order, captions);
    for (auto batch : {emit_parent_child(forest), emit_sequence(forest, order),
                       emit_references(page, captions, order, config.patterns)}) {
      edges.insert(edges.end(), batch.begin(), batch.end());
    }
  }

  std::set<std::tuple<int, int, RelationType>> seen;
  for (RelationEdge& edge : edges) {
    if (seen.insert({edge.subject, edge.object, edge.rel}).second) {
      graph.page.relations.push_back(std::move(edge));
    }
  }
  return graph;
}

}  // namespace docgraph
