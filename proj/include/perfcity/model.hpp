#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace perfcity {

struct ClassInfo {
  std::string id;
  std::string name;
  std::vector<std::string> packagePath;
  std::int64_t numMethods = 0;
  std::int64_t numAttributes = 0;

  bool operator==(const ClassInfo&) const = default;
};

struct PackageNode {
  std::string name;
  std::vector<PackageNode> children;
  std::vector<std::string> classes;  // ClassInfo ids

  bool operator==(const PackageNode&) const = default;
};

// Unvalidated package declaration as it appears in a model record.
struct PackageDecl {
  std::string name;
  std::vector<std::string> classes;
  std::vector<PackageDecl> children;

  bool operator==(const PackageDecl&) const = default;
};

// Model-shaped data straight off the wire or out of a model file. When
// `packages` is empty the tree is derived from each class's packagePath.
struct ModelRecord {
  std::optional<std::uint64_t> revision;
  std::vector<PackageDecl> packages;
  std::vector<ClassInfo> classes;

  bool operator==(const ModelRecord&) const = default;
};

// Validated, immutable system structure. The package tree is kept in
// canonical form: children sorted by name, classes by (name, id). The root
// node is unnamed; top-level packages are its children.
class SystemModel {
 public:
  const PackageNode& root() const noexcept { return root_; }
  const std::map<std::string, ClassInfo>& classes() const noexcept { return classes_; }
  std::uint64_t revision() const noexcept { return revision_; }
  std::size_t size() const noexcept { return classes_.size(); }

  bool contains(const std::string& id) const { return classes_.count(id) != 0; }
  const ClassInfo* find(const std::string& id) const;

  // Same classes and tree; revision ignored.
  bool same_content(const SystemModel& other) const {
    return root_ == other.root_ && classes_ == other.classes_;
  }

  // Converts back to record form (canonical order, revision included).
  ModelRecord to_record() const;

 private:
  friend SystemModel validate_model(const ModelRecord& candidate);
  friend SystemModel apply_model_update(const SystemModel& model, const ModelRecord& update);

  PackageNode root_;
  std::map<std::string, ClassInfo> classes_;
  std::uint64_t revision_ = 1;
};

// Throws Error{DuplicateClassId | OrphanClass | NegativeMetric | EmptyModel |
// SchemaViolation}. Revision defaults to 1.
SystemModel validate_model(const ModelRecord& candidate);

// Full-snapshot update: the result holds exactly the update's classes with
// revision = model.revision() + 1. On error `model` is untouched.
SystemModel apply_model_update(const SystemModel& model, const ModelRecord& update);

// Depth-first over the canonical tree; a package's own classes come before
// its sub-packages.
std::vector<std::string> class_order(const SystemModel& model);

}  // namespace perfcity
