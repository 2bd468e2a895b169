#pragma once

#define NES_VERSION_MAJOR 0
#define NES_VERSION_MINOR 1
#define NES_VERSION_PATCH 0
#define NES_VERSION_STRING "0.1.0"

namespace nes {
inline const char* version() { return NES_VERSION_STRING; }
}
