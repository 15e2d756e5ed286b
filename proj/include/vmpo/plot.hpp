// Copyright 2026 The vmpo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VMPO_PLOT_HPP_
#define VMPO_PLOT_HPP_

#include <string>
#include <vector>

namespace vmpo {

// Writes one SVG line chart per field (y axis) against env_frames (x axis)
// into out_dir, returning the written paths. Unknown fields fail with the
// list of available fields; a metrics file without data rows fails.
std::vector<std::string> emit_plot(const std::string& metrics_path,
                                   const std::vector<std::string>& fields,
                                   const std::string& out_dir);

}  // namespace vmpo

#endif  // VMPO_PLOT_HPP_
