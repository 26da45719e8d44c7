#pragma once

#define ANNEALED_LDP_VERSION "0.1.0"
