#include "image_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>

#include "error.hpp"

namespace trackseg {

namespace {

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open image: " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

// ---- DEFLATE (RFC 1951) -------------------------------------------------

struct BitReader {
    const uint8_t* data = nullptr;
    size_t size = 0;
    size_t pos = 0;
    uint32_t bitbuf = 0;
    int bitcnt = 0;
    std::string origin;

    int bits(int need) {
        while (bitcnt < need) {
            if (pos >= size) fail(ErrorKind::Parse, origin + ": deflate stream truncated");
            bitbuf |= static_cast<uint32_t>(data[pos++]) << bitcnt;
            bitcnt += 8;
        }
        const int value = static_cast<int>(bitbuf & ((1u << need) - 1));
        bitbuf >>= need;
        bitcnt -= need;
        return value;
    }

    void align_byte() {
        bitbuf = 0;
        bitcnt = 0;
    }
};

struct Huffman {
    std::array<int, 16> count{};
    std::vector<int> symbol;
};

void build_huffman(Huffman& h, const std::vector<int>& lengths, const std::string& origin) {
    h.count.fill(0);
    for (int len : lengths) h.count[static_cast<size_t>(len)] += 1;
    if (h.count[0] == static_cast<int>(lengths.size()))
        fail(ErrorKind::Parse, origin + ": deflate code with no symbols");
    int left = 1;
    for (int len = 1; len <= 15; ++len) {
        left <<= 1;
        left -= h.count[static_cast<size_t>(len)];
        if (left < 0) fail(ErrorKind::Parse, origin + ": over-subscribed deflate code");
    }
    std::array<int, 16> offsets{};
    for (int len = 1; len < 15; ++len) offsets[static_cast<size_t>(len + 1)] = offsets[static_cast<size_t>(len)] + h.count[static_cast<size_t>(len)];
    h.symbol.assign(lengths.size(), 0);
    for (size_t sym = 0; sym < lengths.size(); ++sym)
        if (lengths[sym] != 0) h.symbol[static_cast<size_t>(offsets[static_cast<size_t>(lengths[sym])]++)] = static_cast<int>(sym);
}

int decode_symbol(BitReader& br, const Huffman& h) {
    int code = 0, first = 0, index = 0;
    for (int len = 1; len <= 15; ++len) {
        code |= br.bits(1);
        const int cnt = h.count[static_cast<size_t>(len)];
        if (code - first < cnt) return h.symbol[static_cast<size_t>(index + (code - first))];
        index += cnt;
        first = (first + cnt) << 1;
        code <<= 1;
    }
    fail(ErrorKind::Parse, br.origin + ": invalid deflate code");
}

constexpr std::array<int, 29> kLengthBase = {3,  4,  5,  6,  7,  8,  9,  10, 11,  13,  15,  17,  19, 23, 27,
                                             31, 35, 43, 51, 59, 67, 83, 99, 115, 131, 163, 195, 227, 258};
constexpr std::array<int, 29> kLengthExtra = {0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2,
                                              2, 3, 3, 3, 3, 4, 4, 4, 4, 5, 5, 5, 5, 0};
constexpr std::array<int, 30> kDistBase = {1,    2,    3,    4,    5,    7,     9,     13,   17,   25,
                                           33,   49,   65,   97,   129,  193,   257,   385,  513,  769,
                                           1025, 1537, 2049, 3073, 4097, 6145,  8193,  12289, 16385, 24577};
constexpr std::array<int, 30> kDistExtra = {0, 0, 0, 0, 1, 1, 2, 2, 3, 3, 4,  4,  5,  5,  6,
                                            6, 7, 7, 8, 8, 9, 9, 10, 10, 11, 11, 12, 12, 13, 13};

void inflate_block(BitReader& br, const Huffman& lit, const Huffman& dist, std::vector<uint8_t>& out) {
    for (;;) {
        const int sym = decode_symbol(br, lit);
        if (sym < 256) {
            out.push_back(static_cast<uint8_t>(sym));
        } else if (sym == 256) {
            return;
        } else {
            if (sym > 285) fail(ErrorKind::Parse, br.origin + ": invalid length symbol");
            const int li = sym - 257;
            const int length = kLengthBase[static_cast<size_t>(li)] + br.bits(kLengthExtra[static_cast<size_t>(li)]);
            const int dsym = decode_symbol(br, dist);
            if (dsym > 29) fail(ErrorKind::Parse, br.origin + ": invalid distance symbol");
            const int distance = kDistBase[static_cast<size_t>(dsym)] + br.bits(kDistExtra[static_cast<size_t>(dsym)]);
            if (distance > static_cast<int>(out.size()))
                fail(ErrorKind::Parse, br.origin + ": deflate distance beyond output");
            for (int i = 0; i < length; ++i) out.push_back(out[out.size() - static_cast<size_t>(distance)]);
        }
    }
}

std::vector<uint8_t> zlib_inflate(const uint8_t* data, size_t size, size_t size_hint,
                                  const std::string& origin) {
    if (size < 2) fail(ErrorKind::Parse, origin + ": zlib stream too short");
    const uint8_t cmf = data[0], flg = data[1];
    if ((cmf & 0x0f) != 8) fail(ErrorKind::Parse, origin + ": unsupported zlib method");
    if (flg & 0x20) fail(ErrorKind::Parse, origin + ": zlib preset dictionary unsupported");
    if ((static_cast<unsigned>(cmf) * 256 + flg) % 31 != 0)
        fail(ErrorKind::Parse, origin + ": bad zlib header");

    BitReader br;
    br.data = data + 2;
    br.size = size - 2;
    br.origin = origin;

    std::vector<uint8_t> out;
    out.reserve(size_hint);
    for (;;) {
        const int final = br.bits(1);
        const int type = br.bits(2);
        if (type == 0) {
            br.align_byte();
            if (br.pos + 4 > br.size) fail(ErrorKind::Parse, origin + ": stored block truncated");
            const unsigned len = br.data[br.pos] | (br.data[br.pos + 1] << 8);
            const unsigned nlen = br.data[br.pos + 2] | (br.data[br.pos + 3] << 8);
            br.pos += 4;
            if ((len ^ 0xffffu) != nlen) fail(ErrorKind::Parse, origin + ": stored block length mismatch");
            if (br.pos + len > br.size) fail(ErrorKind::Parse, origin + ": stored block truncated");
            out.insert(out.end(), br.data + br.pos, br.data + br.pos + len);
            br.pos += len;
        } else if (type == 1) {
            std::vector<int> lit_lengths(288);
            for (size_t i = 0; i < 288; ++i)
                lit_lengths[i] = i < 144 ? 8 : (i < 256 ? 9 : (i < 280 ? 7 : 8));
            std::vector<int> dist_lengths(30, 5);
            Huffman lit, dist;
            build_huffman(lit, lit_lengths, origin);
            build_huffman(dist, dist_lengths, origin);
            inflate_block(br, lit, dist, out);
        } else if (type == 2) {
            const int hlit = br.bits(5) + 257;
            const int hdist = br.bits(5) + 1;
            const int hclen = br.bits(4) + 4;
            static constexpr std::array<int, 19> order = {16, 17, 18, 0, 8,  7, 9,  6, 10, 5,
                                                          11, 4,  12, 3, 13, 2, 14, 1, 15};
            std::vector<int> code_lengths(19, 0);
            for (int i = 0; i < hclen; ++i) code_lengths[static_cast<size_t>(order[static_cast<size_t>(i)])] = br.bits(3);
            Huffman code_huff;
            build_huffman(code_huff, code_lengths, origin);

            std::vector<int> lengths;
            lengths.reserve(static_cast<size_t>(hlit + hdist));
            while (static_cast<int>(lengths.size()) < hlit + hdist) {
                const int sym = decode_symbol(br, code_huff);
                if (sym < 16) {
                    lengths.push_back(sym);
                } else if (sym == 16) {
                    if (lengths.empty()) fail(ErrorKind::Parse, origin + ": repeat with no previous length");
                    const int repeat = 3 + br.bits(2);
                    lengths.insert(lengths.end(), static_cast<size_t>(repeat), lengths.back());
                } else if (sym == 17) {
                    lengths.insert(lengths.end(), static_cast<size_t>(3 + br.bits(3)), 0);
                } else {
                    lengths.insert(lengths.end(), static_cast<size_t>(11 + br.bits(7)), 0);
                }
            }
            if (static_cast<int>(lengths.size()) != hlit + hdist)
                fail(ErrorKind::Parse, origin + ": code length overflow");
            std::vector<int> lit_lengths(lengths.begin(), lengths.begin() + hlit);
            std::vector<int> dist_lengths(lengths.begin() + hlit, lengths.end());
            Huffman lit, dist;
            build_huffman(lit, lit_lengths, origin);
            build_huffman(dist, dist_lengths, origin);
            inflate_block(br, lit, dist, out);
        } else {
            fail(ErrorKind::Parse, origin + ": invalid deflate block type");
        }
        if (final) break;
    }
    return out;
}

// ---- PNG ----------------------------------------------------------------

uint32_t read_u32_be(const uint8_t* p) {
    return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
           (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

uint8_t paeth(uint8_t a, uint8_t b, uint8_t c) {
    const int p = static_cast<int>(a) + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

GrayFrame decode_png(const std::vector<uint8_t>& bytes, const std::string& origin) {
    static const uint8_t signature[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    if (bytes.size() < 8 || std::memcmp(bytes.data(), signature, 8) != 0)
        fail(ErrorKind::Parse, origin + ": not a PNG file");

    uint32_t width = 0, height = 0;
    int color_type = -1;
    std::vector<uint8_t> idat;
    size_t pos = 8;
    bool saw_ihdr = false, saw_iend = false;
    while (pos + 8 <= bytes.size() && !saw_iend) {
        const uint32_t len = read_u32_be(bytes.data() + pos);
        if (pos + 12 + len > bytes.size()) fail(ErrorKind::Parse, origin + ": PNG chunk truncated");
        const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
        const uint8_t* data = bytes.data() + pos + 8;
        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) fail(ErrorKind::Parse, origin + ": bad IHDR length");
            width = read_u32_be(data);
            height = read_u32_be(data + 4);
            const int bit_depth = data[8];
            color_type = data[9];
            const int interlace = data[12];
            if (bit_depth != 8) fail(ErrorKind::Parse, origin + ": only 8-bit PNGs are supported");
            if (color_type != 0 && color_type != 2 && color_type != 4 && color_type != 6)
                fail(ErrorKind::Parse, origin + ": unsupported PNG color type");
            if (interlace != 0) fail(ErrorKind::Parse, origin + ": interlaced PNGs are unsupported");
            saw_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), data, data + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            saw_iend = true;
        }
        pos += 12 + len;
    }
    if (!saw_ihdr || width == 0 || height == 0)
        fail(ErrorKind::Parse, origin + ": missing or empty IHDR");
    if (idat.empty()) fail(ErrorKind::Parse, origin + ": missing IDAT");
    if (width > (1u << 20) || height > (1u << 20))
        fail(ErrorKind::Parse, origin + ": image too large");

    const int channels = color_type == 0 ? 1 : (color_type == 2 ? 3 : (color_type == 4 ? 2 : 4));
    const size_t stride = static_cast<size_t>(width) * static_cast<size_t>(channels);
    const size_t expected = (stride + 1) * height;
    std::vector<uint8_t> raw = zlib_inflate(idat.data(), idat.size(), expected, origin);
    if (raw.size() < expected) fail(ErrorKind::Parse, origin + ": PNG pixel data truncated");

    // defilter in place into a packed buffer
    std::vector<uint8_t> pixels(stride * height);
    const int bpp = channels;
    for (uint32_t y = 0; y < height; ++y) {
        const uint8_t filter = raw[(stride + 1) * y];
        const uint8_t* src = raw.data() + (stride + 1) * y + 1;
        uint8_t* cur = pixels.data() + stride * y;
        const uint8_t* up = y > 0 ? pixels.data() + stride * (y - 1) : nullptr;
        for (size_t i = 0; i < stride; ++i) {
            const uint8_t a = i >= static_cast<size_t>(bpp) ? cur[i - static_cast<size_t>(bpp)] : 0;
            const uint8_t b = up ? up[i] : 0;
            const uint8_t c = (up && i >= static_cast<size_t>(bpp)) ? up[i - static_cast<size_t>(bpp)] : 0;
            switch (filter) {
                case 0: cur[i] = src[i]; break;
                case 1: cur[i] = static_cast<uint8_t>(src[i] + a); break;
                case 2: cur[i] = static_cast<uint8_t>(src[i] + b); break;
                case 3: cur[i] = static_cast<uint8_t>(src[i] + ((a + b) >> 1)); break;
                case 4: cur[i] = static_cast<uint8_t>(src[i] + paeth(a, b, c)); break;
                default: fail(ErrorKind::Parse, origin + ": unknown PNG filter type");
            }
        }
    }

    GrayFrame out(static_cast<int>(width), static_cast<int>(height));
    for (size_t p = 0; p < static_cast<size_t>(width) * height; ++p) {
        const uint8_t* px = pixels.data() + p * static_cast<size_t>(channels);
        float v;
        if (color_type == 0 || color_type == 4) {
            v = px[0] / 255.0f;
        } else {
            v = 0.299f * (px[0] / 255.0f) + 0.587f * (px[1] / 255.0f) + 0.114f * (px[2] / 255.0f);
        }
        out.data[p] = v;
    }
    return out;
}

// ---- PNM ----------------------------------------------------------------

struct PnmParser {
    const std::vector<uint8_t>& bytes;
    size_t pos = 0;
    std::string origin;

    void skip_space() {
        while (pos < bytes.size()) {
            if (std::isspace(bytes[pos])) {
                ++pos;
            } else if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    long next_int() {
        skip_space();
        if (pos >= bytes.size() || !std::isdigit(bytes[pos]))
            fail(ErrorKind::Parse, origin + ": malformed PNM header");
        long v = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos] - '0');
            if (v > (1l << 30)) fail(ErrorKind::Parse, origin + ": PNM value too large");
            ++pos;
        }
        return v;
    }
};

GrayFrame decode_pnm(const std::vector<uint8_t>& bytes, const std::string& origin) {
    if (bytes.size() < 2) fail(ErrorKind::Parse, origin + ": not a PNM file");
    const char kind = static_cast<char>(bytes[1]);
    if (bytes[0] != 'P' || (kind != '2' && kind != '3' && kind != '5' && kind != '6'))
        fail(ErrorKind::Parse, origin + ": unsupported PNM variant");

    PnmParser parser{bytes, 2, origin};
    const long width = parser.next_int();
    const long height = parser.next_int();
    const long maxval = parser.next_int();
    if (width <= 0 || height <= 0) fail(ErrorKind::Parse, origin + ": bad PNM dimensions");
    if (maxval <= 0 || maxval > 255)
        fail(ErrorKind::Parse, origin + ": only 8-bit PNM images are supported");

    const bool color = kind == '3' || kind == '6';
    const bool binary = kind == '5' || kind == '6';
    const size_t samples = static_cast<size_t>(width) * height * (color ? 3 : 1);

    std::vector<uint8_t> values(samples);
    if (binary) {
        parser.pos += 1;  // single whitespace byte after maxval
        if (parser.pos + samples > bytes.size())
            fail(ErrorKind::Parse, origin + ": PNM pixel data truncated");
        std::memcpy(values.data(), bytes.data() + parser.pos, samples);
    } else {
        for (size_t i = 0; i < samples; ++i) {
            const long v = parser.next_int();
            if (v > maxval) fail(ErrorKind::Parse, origin + ": PNM sample exceeds maxval");
            values[i] = static_cast<uint8_t>(v);
        }
    }

    GrayFrame out(static_cast<int>(width), static_cast<int>(height));
    const float scale = 1.0f / static_cast<float>(maxval);
    for (size_t p = 0; p < out.data.size(); ++p) {
        if (color) {
            out.data[p] = 0.299f * (values[3 * p] * scale) + 0.587f * (values[3 * p + 1] * scale) +
                          0.114f * (values[3 * p + 2] * scale);
        } else {
            out.data[p] = values[p] * scale;
        }
    }
    return out;
}

}  // namespace

GrayFrame read_gray_image(const std::filesystem::path& path) {
    const std::vector<uint8_t> bytes = read_file_bytes(path);
    if (bytes.size() >= 8 && bytes[0] == 137 && bytes[1] == 'P' && bytes[2] == 'N' && bytes[3] == 'G')
        return decode_png(bytes, path.string());
    if (bytes.size() >= 2 && bytes[0] == 'P') return decode_pnm(bytes, path.string());
    fail(ErrorKind::Parse, path.string() + ": unrecognized image format");
}

void write_pgm(const std::filesystem::path& path, const GrayFrame& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot create image: " + path.string());
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    std::vector<uint8_t> row(static_cast<size_t>(frame.width));
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            const long v = std::lround(frame.at(x, y) * 255.0f);
            row[static_cast<size_t>(x)] = static_cast<uint8_t>(std::clamp(v, 0l, 255l));
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) fail(ErrorKind::Io, "failed writing image: " + path.string());
}

bool natural_less(const std::string& a, const std::string& b) {
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (std::isdigit(static_cast<unsigned char>(a[i])) &&
            std::isdigit(static_cast<unsigned char>(b[j]))) {
            size_t ie = i, je = j;
            while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
            while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
            size_t iz = i, jz = j;
            while (iz < ie - 1 && a[iz] == '0') ++iz;  // skip leading zeros
            while (jz < je - 1 && b[jz] == '0') ++jz;
            const size_t la = ie - iz, lb = je - jz;
            if (la != lb) return la < lb;
            const int cmp = a.compare(iz, la, b, jz, lb);
            if (cmp != 0) return cmp < 0;
            i = ie;
            j = je;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return a.size() - i < b.size() - j;
}

std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        fail(ErrorKind::Io, "frame directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm" || ext == ".png")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
        return natural_less(a.filename().string(), b.filename().string());
    });
    return files;
}

}  // namespace trackseg
