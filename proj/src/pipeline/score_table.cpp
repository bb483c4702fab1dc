#include "coaeval/pipeline/score_table.hpp"

#include <set>

namespace coaeval {

void ScoreTable::validate() const {
    std::set<std::string> excluded_ids;
    for (const auto& [id, reason] : exclusions) {
        (void)reason;
        if (!excluded_ids.insert(id).second) {
            throw InvalidInputError("instance '" + id + "' excluded twice");
        }
    }
    for (const auto& [id, score] : rows) {
        (void)score;
        if (excluded_ids.count(id) != 0) {
            throw InvalidInputError("instance '" + id + "' is both scored and excluded");
        }
    }
}

}  // namespace coaeval
