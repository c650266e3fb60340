// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "uvpbr/error.h"
#include "uvpbr/image.h"

namespace uvpbr {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "uvpbr_image_test";
    fs::create_directories(dir);
    return dir / name;
}

Image ramp(int w, int h, int c) {
    Image img(w, h, c);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int k = 0; k < c; ++k) img.at(x, y, k) = 0.01f * x + 0.1f * y + k;
    return img;
}

TEST(Image, PfmRoundTripBothRowOrders) {
    Image img = ramp(7, 5, 3);
    for (RowOrder order : {RowOrder::TopDown, RowOrder::BottomUp}) {
        write_pfm(scratch("rgb.pfm"), img, order);
        EXPECT_EQ(read_pfm(scratch("rgb.pfm"), order), img);
    }
}

TEST(Image, PfmRowOrderFlipsRows) {
    Image img = ramp(3, 4, 1);
    write_pfm(scratch("gray.pfm"), img, RowOrder::TopDown);
    Image flipped = read_pfm(scratch("gray.pfm"), RowOrder::BottomUp);
    for (int y = 0; y < 4; ++y) EXPECT_EQ(flipped.at(1, y, 0), img.at(1, 3 - y, 0));
}

TEST(Image, PfmPadsTwoChannels) {
    Image img = ramp(4, 4, 2);
    write_pfm(scratch("two.pfm"), img, RowOrder::TopDown);
    Image back = read_pfm(scratch("two.pfm"), RowOrder::TopDown);
    ASSERT_EQ(back.channels(), 3);
    EXPECT_EQ(back.at(2, 3, 1), img.at(2, 3, 1));
    EXPECT_EQ(back.at(2, 3, 2), 0.0f);
    EXPECT_EQ(read_pfm(scratch("two.pfm"), RowOrder::TopDown, 2), img);
}

TEST(Image, PfmRejectsGarbage) {
    {
        std::ofstream f(scratch("bad.pfm"));
        f << "P7\n1 1\n-1\n";
    }
    EXPECT_THROW(read_pfm(scratch("bad.pfm"), RowOrder::TopDown), InputError);
    EXPECT_THROW(read_pfm(scratch("missing.pfm"), RowOrder::TopDown), InputError);
}

TEST(Image, PngRoundTripWithinQuantization) {
    Image img(8, 8, 3);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) img.set_rgb(x, y, {x / 7.0, y / 7.0, 0.5});
    write_png(scratch("c.png"), img, RowOrder::TopDown);
    Image back = read_png(scratch("c.png"), RowOrder::TopDown);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            for (int c = 0; c < 3; ++c) EXPECT_NEAR(back.at(x, y, c), img.at(x, y, c), 0.01);
}

TEST(Image, SrgbTransferInverts) {
    for (double v = 0; v <= 1.0; v += 0.01) EXPECT_NEAR(srgb_to_linear(linear_to_srgb(v)), v, 1e-12);
    EXPECT_NEAR(linear_to_srgb(0.0031308), 0.04045, 1e-5);
}

TEST(Image, BilinearHitsPixelCentersAndInterpolates) {
    Image img = ramp(4, 4, 3);
    EXPECT_NEAR(img.sample_bilinear(1.5, 2.5).x, img.at(1, 2, 0), 1e-6);
    EXPECT_NEAR(img.sample_bilinear(2.0, 2.5).x, 0.5 * (img.at(1, 2, 0) + img.at(2, 2, 0)), 1e-6);
    // Clamped outside.
    EXPECT_NEAR(img.sample_bilinear(-5, -5).x, img.at(0, 0, 0), 1e-6);
}

TEST(Image, SingleChannelRgbReplicates) {
    Image img(2, 2, 1, 0.25f);
    EXPECT_EQ(img.rgb(1, 1), Rgb(0.25));
}

}  // namespace
}  // namespace uvpbr
