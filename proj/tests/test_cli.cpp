#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
