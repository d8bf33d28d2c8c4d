#ifndef RWOGG_DESCRIPTOR_HPP
#define RWOGG_DESCRIPTOR_HPP

#include "rwogg/families.hpp"
#include "rwogg/schedule.hpp"

#include <string>
#include <string_view>

namespace rwogg {

// Family descriptors:
//   karytree:k=2,lambda=1      heightpath:k=2,lambda=1/2
//   box:d=4                    genbox:b=1/n/2n
//   hypercube                  hamming
//   leveltree:profile=const:3,gamma=1/2
//   leveltree:profile=table:1;2/1;2/1/3,gamma=0   (levels ';', heights '/')
//   heightchain:profile=const:2,gamma=0
//   star:M=linear,gamma=0      (M = linear | const:c | pow:a | exp:B | nlogn)
//
// Schedule descriptors:
//   explicit:3,5,0,2
//   symbolic:base=2,a=1,b=1,d1=4[,c=1][,round=nearest|ceil]
//     d(n) = round(c base^n / (n^a (ln n)^b)) for n >= 2, d(1) = d1.

/// Throws ConfigError on malformed descriptors or invalid parameters.
Family parse_family(std::string_view text);
DurationSchedule parse_schedule(std::string_view text);
GrowthLaw parse_star_size(std::string_view text);

/// Canonical descriptors; parse(format(x)) reproduces x.
std::string format_family(const Family &family);
std::string format_schedule(const DurationSchedule &schedule);
std::string format_star_size(const GrowthLaw &law);

/// Locale-free shortest round-trip rendering of a double.
std::string format_number(double x);

} // namespace rwogg

#endif
