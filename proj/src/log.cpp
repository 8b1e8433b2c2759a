// SPDX-License-Identifier: Apache-2.0
#include "sonotrack/common.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace sonotrack {

std::shared_ptr<spdlog::logger> logger()
{
    static const std::shared_ptr<spdlog::logger> instance = [] {
        auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
        auto l = std::make_shared<spdlog::logger>("sonotrack", std::move(sink));
        l->set_pattern("%l: %v");
        l->set_level(spdlog::level::info);
        return l;
    }();
    return instance;
}

} // namespace sonotrack
