#pragma once

#define MTDIAG_VERSION "0.1.0"
