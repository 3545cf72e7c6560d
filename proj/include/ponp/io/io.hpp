#pragma once

#include "ponp/io/json.hpp"
#include "ponp/io/config.hpp"
#include "ponp/io/artifacts.hpp"
#include "ponp/io/commands.hpp"
