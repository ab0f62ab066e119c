#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace scenesynth {

/// Dense class label set. Ids are 0..size()-1 by construction; one id is
/// reserved for unlabelled/void pixels.
class ClassTaxonomy {
public:
    ClassTaxonomy() = default;

    ClassTaxonomy(std::vector<std::string> names, int background_id)
        : names_(std::move(names)), background_id_(background_id) {
        if (names_.empty())
            throw std::invalid_argument("taxonomy: empty class list");
        if (background_id_ < 0 || background_id_ >= static_cast<int>(names_.size()))
            throw std::invalid_argument("taxonomy: background id not a member");
        for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
            if (!index_.emplace(names_[i], i).second)
                throw std::invalid_argument("taxonomy: duplicate class name '" +
                                            names_[i] + "'");
        }
    }

    int size() const { return static_cast<int>(names_.size()); }
    int background_id() const { return background_id_; }
    const std::string& name(int id) const { return names_.at(id); }
    const std::vector<std::string>& names() const { return names_; }

    bool has(const std::string& name) const { return index_.count(name) > 0; }

    int id(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end())
            throw std::invalid_argument("taxonomy: unknown class '" + name + "'");
        return it->second;
    }

    /// Ids of classes matched by name; names absent from the taxonomy are
    /// skipped. Used to resolve structural classes (wall/floor/ceiling).
    std::unordered_set<int> ids_of(const std::vector<std::string>& names) const {
        std::unordered_set<int> out;
        for (const auto& n : names) {
            auto it = index_.find(n);
            if (it != index_.end()) out.insert(it->second);
        }
        return out;
    }

private:
    std::vector<std::string> names_;
    int background_id_ = 0;
    std::unordered_map<std::string, int> index_;
};

}  // namespace scenesynth
