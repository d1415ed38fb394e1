#pragma once

#include <string>
#include <string_view>

namespace efgcl {

enum class Task { kJump, kFlip };

inline std::string_view task_name(Task task) {
  return task == Task::kJump ? "jump" : "flip";
}

}  // namespace efgcl
