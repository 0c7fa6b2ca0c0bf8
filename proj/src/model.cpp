#include "perfcity/model.hpp"

#include <algorithm>
#include <set>

#include "perfcity/error.hpp"

namespace perfcity {
namespace {

std::string join_path(const std::vector<std::string>& path) {
  std::string out;
  for (const auto& seg : path) {
    if (!out.empty()) out += '.';
    out += seg;
  }
  return out.empty() ? "<root>" : out;
}

PackageNode& child_named(PackageNode& parent, const std::string& name) {
  for (auto& c : parent.children) {
    if (c.name == name) return c;
  }
  parent.children.push_back(PackageNode{name, {}, {}});
  return parent.children.back();
}

// Builds the tree from declarations. Every declared class must exist and be
// declared exactly once, under a node whose path equals its packagePath.
void add_declared(PackageNode& node, const PackageDecl& decl, std::vector<std::string>& path,
                  const std::map<std::string, ClassInfo>& classes, std::set<std::string>& placed) {
  if (decl.name.empty()) {
    throw Error(Errc::SchemaViolation, "package with empty name under " + join_path(path));
  }
  for (const auto& sibling : node.children) {
    if (sibling.name == decl.name) {
      throw Error(Errc::SchemaViolation, "duplicate package " + decl.name + " under " + join_path(path));
    }
  }
  node.children.push_back(PackageNode{decl.name, {}, {}});
  PackageNode& self = node.children.back();
  path.push_back(decl.name);
  for (const auto& id : decl.classes) {
    auto it = classes.find(id);
    if (it == classes.end()) {
      throw Error(Errc::OrphanClass, "package " + join_path(path) + " lists unknown class " + id);
    }
    if (!placed.insert(id).second) {
      throw Error(Errc::OrphanClass, "class " + id + " listed in more than one package");
    }
    if (it->second.packagePath != path) {
      throw Error(Errc::OrphanClass, "class " + id + " listed under " + join_path(path) +
                                         " but its packagePath is " + join_path(it->second.packagePath));
    }
    self.classes.push_back(id);
  }
  for (const auto& child : decl.children) {
    add_declared(self, child, path, classes, placed);
  }
  path.pop_back();
}

void canonicalize(PackageNode& node, const std::map<std::string, ClassInfo>& classes) {
  std::sort(node.children.begin(), node.children.end(),
            [](const PackageNode& a, const PackageNode& b) { return a.name < b.name; });
  std::sort(node.classes.begin(), node.classes.end(), [&](const std::string& a, const std::string& b) {
    const auto& ca = classes.at(a);
    const auto& cb = classes.at(b);
    if (ca.name != cb.name) return ca.name < cb.name;
    return ca.id < cb.id;
  });
  for (auto& c : node.children) canonicalize(c, classes);
}

void to_decl(const PackageNode& node, std::vector<PackageDecl>& out) {
  PackageDecl d{node.name, node.classes, {}};
  for (const auto& c : node.children) to_decl(c, d.children);
  out.push_back(std::move(d));
}

void dfs(const PackageNode& node, std::vector<std::string>& out) {
  out.insert(out.end(), node.classes.begin(), node.classes.end());
  for (const auto& c : node.children) dfs(c, out);
}

}  // namespace

const ClassInfo* SystemModel::find(const std::string& id) const {
  auto it = classes_.find(id);
  return it == classes_.end() ? nullptr : &it->second;
}

ModelRecord SystemModel::to_record() const {
  ModelRecord rec;
  rec.revision = revision_;
  for (const auto& c : root_.children) to_decl(c, rec.packages);
  for (const auto& id : class_order(*this)) rec.classes.push_back(classes_.at(id));
  return rec;
}

SystemModel validate_model(const ModelRecord& candidate) {
  if (candidate.classes.empty()) throw Error(Errc::EmptyModel, "model has no classes");

  SystemModel model;
  for (const auto& cls : candidate.classes) {
    if (cls.id.empty()) throw Error(Errc::SchemaViolation, "class with empty id");
    if (cls.packagePath.empty()) {
      throw Error(Errc::SchemaViolation, "class " + cls.id + " has an empty packagePath");
    }
    for (const auto& seg : cls.packagePath) {
      if (seg.empty()) throw Error(Errc::SchemaViolation, "class " + cls.id + " has an empty package segment");
    }
    if (cls.numMethods < 0 || cls.numAttributes < 0) {
      throw Error(Errc::NegativeMetric, "class " + cls.id);
    }
    if (!model.classes_.emplace(cls.id, cls).second) {
      throw Error(Errc::DuplicateClassId, cls.id);
    }
  }

  if (candidate.packages.empty()) {
    for (const auto& [id, cls] : model.classes_) {
      PackageNode* node = &model.root_;
      for (const auto& seg : cls.packagePath) node = &child_named(*node, seg);
      node->classes.push_back(id);
    }
  } else {
    std::set<std::string> placed;
    std::vector<std::string> path;
    for (const auto& decl : candidate.packages) {
      add_declared(model.root_, decl, path, model.classes_, placed);
    }
    for (const auto& [id, cls] : model.classes_) {
      if (placed.count(id) == 0) throw Error(Errc::OrphanClass, "class " + id + " is not in the package tree");
    }
  }

  canonicalize(model.root_, model.classes_);
  model.revision_ = candidate.revision.value_or(1);
  return model;
}

SystemModel apply_model_update(const SystemModel& model, const ModelRecord& update) {
  SystemModel next = validate_model(update);
  next.revision_ = model.revision() + 1;
  return next;
}

std::vector<std::string> class_order(const SystemModel& model) {
  std::vector<std::string> out;
  out.reserve(model.size());
  dfs(model.root(), out);
  return out;
}

}  // namespace perfcity
