#pragma once

// PNG byte streams produced by an independent encoder (zlib).
// Pixel formulas: gray (x*37 + y*11) %% 256 on a 6x8 canvas;
// rgb ((x*7+y), (x+13y), (x*x+3y)) %% 256; rgba ((x*5+y), (x+9y), (3x+7y), 255).

#include <vector>

namespace pngfixtures {

constexpr int kWidth = 6;
constexpr int kHeight = 8;

inline const std::vector<unsigned char> kGray = {137,80,78,71,13,10,26,10,0,0,0,13,73,72,68,82,0,0,0,6,0,0,0,8,8,0,0,0,0,255,173,209,228,0,0,0,43,73,68,65,84,120,218,99,96,80,245,202,159,178,147,145,91,21,4,152,184,193,128,89,76,2,4,88,32,60,6,243,152,198,101,167,63,48,58,129,149,64,5,1,250,196,8,195,184,156,179,186,0,0,0,0,73,69,78,68,174,66,96,130};
inline const std::vector<unsigned char> kRgb = {137,80,78,71,13,10,26,10,0,0,0,13,73,72,68,82,0,0,0,6,0,0,0,8,8,2,0,0,0,85,164,25,111,0,0,0,86,73,68,65,84,120,218,99,97,96,96,96,103,100,100,103,100,102,103,100,101,103,100,103,103,228,100,102,228,101,102,97,103,98,97,7,146,44,44,236,172,44,236,108,76,64,33,116,196,172,206,137,166,145,129,197,132,135,219,148,87,200,76,64,210,92,84,193,66,70,221,82,149,5,164,18,4,152,225,136,153,69,143,155,176,241,0,89,12,4,232,253,159,78,229,0,0,0,0,73,69,78,68,174,66,96,130};
inline const std::vector<unsigned char> kRgba = {137,80,78,71,13,10,26,10,0,0,0,13,73,72,68,82,0,0,0,6,0,0,0,8,8,6,0,0,0,218,198,142,56,0,0,0,94,73,68,65,84,120,218,99,96,96,96,248,207,202,200,252,159,139,137,237,63,63,51,231,127,17,22,158,255,146,172,252,255,89,24,57,217,25,24,25,153,49,48,233,18,76,96,9,108,152,85,87,25,100,57,3,58,102,102,81,144,108,96,102,101,101,64,199,12,236,246,134,255,121,28,76,254,11,58,154,255,23,115,178,250,47,237,108,251,95,193,197,225,63,0,40,234,19,66,247,72,191,130,0,0,0,0,73,69,78,68,174,66,96,130};
inline const std::vector<unsigned char> kGrayStored = {137,80,78,71,13,10,26,10,0,0,0,13,73,72,68,82,0,0,0,6,0,0,0,8,8,0,0,0,0,255,173,209,228,0,0,0,67,73,68,65,84,120,1,1,56,0,199,255,0,0,37,74,111,148,185,0,11,48,85,122,159,196,0,22,59,96,133,170,207,0,33,70,107,144,181,218,0,44,81,118,155,192,229,0,55,92,129,166,203,240,0,66,103,140,177,214,251,0,77,114,151,188,225,6,79,14,23,145,40,144,48,40,0,0,0,0,73,69,78,68,174,66,96,130};

}  // namespace pngfixtures
