#pragma once

#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "loom/ids.hpp"

namespace loom {

enum class IdentityKind { somatic, fictional, view };
enum class LinkOrigin { sentence, changes, inferred, restored };

std::string_view to_string(IdentityKind kind);
std::string_view to_string(LinkOrigin origin);
std::optional<IdentityKind> identity_kind_from_string(std::string_view name);

/// Somatic links are stored older -> newer; the other kinds are symmetric
/// but keep the order they were stated in.
struct IdentityLink {
  IdentityKind kind;
  Id a;
  Id b;
  double created = 0.0;
  LinkOrigin origin = LinkOrigin::sentence;
};

class IdentityGraph {
 public:
  using FocusProbe = std::function<bool(Id)>;

  /// Adds a link. Somatic endpoints may not both be in focus; in strict mode
  /// a second somatic successor or predecessor is rejected, otherwise it is
  /// accepted and reported in warnings(). Duplicate links are ignored.
  const IdentityLink& link(IdentityKind kind, Id a, Id b, double clock, LinkOrigin origin,
                           const FocusProbe& in_focus, bool strict);

  /// Inserts a link without checks (snapshot restore).
  void restore(const IdentityLink& link);

  /// Connected component of `id` over links of the given kinds.
  std::set<Id> closure(Id id, std::span<const IdentityKind> kinds) const;
  std::set<Id> closure(Id id) const;

  /// Copies the view links of `from` onto `to`; returns how many were added.
  std::size_t inherit_view_links(Id from, Id to, double clock);

  bool linked(IdentityKind kind, Id a, Id b) const;
  std::vector<Id> partners(Id id, IdentityKind kind) const;
  std::vector<Id> somatic_successors(Id id) const;
  std::vector<Id> somatic_predecessors(Id id) const;
  /// Follows somatic successors to the newest body of `id`'s chain.
  Id somatic_tail(Id id) const;

  const std::vector<IdentityLink>& links() const { return links_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::vector<IdentityLink> links_;
  std::vector<std::string> warnings_;
};

}  // namespace loom
