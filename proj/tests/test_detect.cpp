#include <random>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "reticula/detect.hpp"
#include "reticula/error.hpp"
#include "reticula/filters.hpp"
#include "reticula/phantom.hpp"
#include "test_helpers.hpp"

using namespace reticula;
using testing_support::view;

namespace {

oracle::Plane filled(int w, int h, std::uint8_t value) {
  return {w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, value)};
}

void paint(oracle::Plane& p, int x0, int y0, int x1, int y1, std::uint8_t value) {
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) p.px[static_cast<std::size_t>(y) * p.width + x] = value;
  }
}

oracle::PixelSet as_set(const Component& c) {
  oracle::PixelSet s;
  for (const Pixel& p : c.pixels) s.insert({p.y, p.x});
  return s;
}

Component make(int z, std::vector<Pixel> px, Source src, ComponentId id) {
  Component c = Component::from_pixels(z, std::move(px), src);
  c.id = id;
  return c;
}

// Groups of indices connected through pixel overlap, by graph search.
std::set<std::set<std::size_t>> overlap_groups(const std::vector<oracle::PixelSet>& sets) {
  std::set<std::set<std::size_t>> groups;
  std::vector<bool> seen(sets.size(), false);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (seen[i]) continue;
    std::set<std::size_t> group{i};
    std::vector<std::size_t> stack{i};
    seen[i] = true;
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < sets.size(); ++b) {
        if (seen[b]) continue;
        const bool touch = std::any_of(sets[a].begin(), sets[a].end(),
                                       [&](const auto& p) { return sets[b].contains(p); });
        if (touch) {
          seen[b] = true;
          group.insert(b);
          stack.push_back(b);
        }
      }
    }
    groups.insert(group);
  }
  return groups;
}

}  // namespace

TEST(GrowParams, Validation) {
  EXPECT_NO_THROW((GrowParams{90, 10, 2}.validate()));
  EXPECT_THROW((GrowParams{256, 10, 2}.validate()), ValidationError);
  EXPECT_THROW((GrowParams{90, 0, 2}.validate()), ValidationError);
  EXPECT_THROW((GrowParams{90, 10, 0}.validate()), ValidationError);
  EXPECT_THROW((GrowParams{90, 2, 4}.validate()), ValidationError);  // disk of d=2 has area pi
  EXPECT_NO_THROW((GrowParams{90, 2, 3}.validate()));
}

TEST(GrowRegions, BrightSliceHasNoSeeds) {
  EXPECT_TRUE(grow_regions(view(filled(16, 16, 255)), {100, 5, 2}).empty());
}

TEST(GrowRegions, FindsSingleBlock) {
  auto p = filled(16, 16, 200);
  paint(p, 6, 9, 8, 11, 20);
  const auto cs = grow_regions(view(p, 4), {100, 5, 2});
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].area(), 9u);
  EXPECT_EQ(cs[0].centroid, (Centroid{7.0, 10.0}));
  EXPECT_EQ(cs[0].bbox, (BoundingBox{6, 9, 8, 11}));
  EXPECT_EQ(cs[0].z, 4);
  EXPECT_EQ(cs[0].status, Status::provisional);
  EXPECT_EQ(oracle::components(p, 100, 5, 2), std::set<oracle::PixelSet>{as_set(cs[0])});
}

TEST(GrowRegions, RejectsFullWidthStripe) {
  auto p = filled(16, 16, 200);
  paint(p, 0, 7, 15, 8, 20);
  EXPECT_TRUE(grow_regions(view(p), {100, 5, 2}).empty());
}

TEST(GrowRegions, OversizeRegionLeavesNoFragments) {
  // An L-shape whose arm is short but whose whole extent is too large.
  auto p = filled(20, 20, 200);
  paint(p, 2, 2, 3, 14, 10);
  paint(p, 2, 13, 4, 14, 10);
  EXPECT_TRUE(grow_regions(view(p), {100, 10, 1}).empty());
}

TEST(GrowRegions, MinAreaDropsSpecks) {
  auto p = filled(8, 8, 200);
  p.px[9] = 10;
  paint(p, 4, 4, 5, 4, 10);
  const auto cs = grow_regions(view(p), {100, 5, 2});
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].area(), 2u);
}

TEST(GrowRegions, DiagonalPixelsAreConnected) {
  auto p = filled(6, 6, 200);
  p.px[0] = p.px[7] = p.px[14] = 5;  // (0,0) (1,1) (2,2)
  const auto cs = grow_regions(view(p), {100, 5, 1});
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].area(), 3u);
}

TEST(GrowRegions, MatchesLabellingOracleOnRandomSlices) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const int w = std::uniform_int_distribution<int>(1, 48)(rng);
    const int h = std::uniform_int_distribution<int>(1, 48)(rng);
    const auto p = oracle::random_blobby(rng, w, h);
    const GrowParams g{std::uniform_int_distribution<int>(40, 140)(rng),
                       std::uniform_int_distribution<int>(2, 14)(rng),
                       std::uniform_int_distribution<int>(1, 3)(rng)};
    const auto cs = grow_regions(view(p), g);

    std::set<oracle::PixelSet> got;
    std::set<Pixel> used;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const Component& c = cs[i];
      EXPECT_EQ(c.id, static_cast<ComponentId>(i));
      EXPECT_LE(c.bbox.extent(), g.max_diameter);
      for (const Pixel& px : c.pixels) {
        EXPECT_LT(p.at(px.x, px.y), g.dark_threshold);
        EXPECT_TRUE(used.insert(px).second) << "pixel shared between components";
      }
      // Each component is a single 8-connected piece.
      oracle::Plane mask = filled(w, h, 255);
      for (const Pixel& px : c.pixels) mask.px[static_cast<std::size_t>(px.y) * w + px.x] = 0;
      EXPECT_EQ(oracle::components(mask, 1, 1 << 20, 1).size(), 1u);
      got.insert(as_set(c));
    }
    // Row-major seed order.
    for (std::size_t i = 1; i < cs.size(); ++i) {
      EXPECT_LT(cs[i - 1].pixels.front(), cs[i].pixels.front());
    }
    ASSERT_EQ(got, oracle::components(p, g.dark_threshold, g.max_diameter, g.min_area))
        << "trial " << trial;
  }
}

TEST(MergeOverlapping, DisjointUnchanged) {
  std::vector<Component> cs{make(0, {{1, 1}, {2, 1}}, Source::bilateral, 0),
                            make(0, {{5, 5}}, Source::laplacian, 1)};
  EXPECT_EQ(merge_overlapping(cs), cs);
}

TEST(MergeOverlapping, SharedPixelUnites) {
  std::vector<Component> cs{make(0, {{1, 1}, {2, 1}}, Source::laplacian, 3),
                            make(0, {{2, 1}, {3, 1}, {3, 2}}, Source::bilateral, 1)};
  const auto out = merge_overlapping(cs);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].area(), 4u);
  EXPECT_EQ(out[0].source, Source::bilateral);
  EXPECT_EQ(out[0].id, 1);
  EXPECT_DOUBLE_EQ(out[0].centroid.x, (1 + 2 + 3 + 3) / 4.0);
  EXPECT_EQ(out[0].bbox, (BoundingBox{1, 1, 3, 2}));
}

TEST(MergeOverlapping, ChainMergesTransitively) {
  std::vector<Component> cs{make(0, {{0, 0}, {1, 0}}, Source::laplacian, 0),
                            make(0, {{5, 5}}, Source::laplacian, 1),
                            make(0, {{1, 0}, {2, 0}}, Source::laplacian, 2),
                            make(0, {{2, 0}, {3, 0}}, Source::laplacian, 3)};
  const auto out = merge_overlapping(cs);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].area(), 4u);
  EXPECT_EQ(out[0].source, Source::laplacian);
  EXPECT_EQ(out[1].area(), 1u);
}

TEST(MergeOverlapping, RandomGroupsMatchGraphSearch) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Component> cs;
    std::vector<oracle::PixelSet> sets;
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    for (int i = 0; i < n; ++i) {
      std::vector<Pixel> px;
      const int x = std::uniform_int_distribution<int>(0, 12)(rng);
      const int y = std::uniform_int_distribution<int>(0, 12)(rng);
      for (int k = 0; k < 3; ++k) px.push_back({x + k, y});
      cs.push_back(make(2, px, i % 2 ? Source::laplacian : Source::bilateral, i));
      sets.push_back(as_set(cs.back()));
    }
    const auto out = merge_overlapping(cs);
    std::set<oracle::PixelSet> expected;
    for (const auto& g : overlap_groups(sets)) {
      oracle::PixelSet u;
      for (auto i : g) u.insert(sets[i].begin(), sets[i].end());
      expected.insert(u);
    }
    std::set<oracle::PixelSet> got;
    for (const auto& c : out) got.insert(as_set(c));
    EXPECT_EQ(got, expected);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = i + 1; j < out.size(); ++j) EXPECT_FALSE(out[i].overlaps(out[j]));
    }
  }
}

TEST(MergeOverlapping, MixedSlicesRejected) {
  std::vector<Component> cs{make(0, {{0, 0}}, Source::bilateral, 0),
                            make(1, {{0, 0}}, Source::bilateral, 1)};
  EXPECT_THROW(merge_overlapping(cs), ValidationError);
}

TEST(DetectSlice, SameBlobInBothPassesKeepsBilateralTag) {
  auto p = filled(16, 16, 200);
  paint(p, 3, 3, 5, 5, 20);
  const auto cs = detect_slice(view(p, 2), view(p, 2), {100, 5, 2}, {100, 5, 2});
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].area(), 9u);
  EXPECT_EQ(cs[0].source, Source::bilateral);
}

TEST(DetectSlice, BlobOnlyInSharpenedPass) {
  const auto b = filled(16, 16, 200);
  auto s = filled(16, 16, 200);
  paint(s, 10, 10, 11, 11, 30);
  const auto cs = detect_slice(view(b), view(s), {100, 5, 2}, {100, 5, 2});
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].source, Source::laplacian);
}

TEST(DetectSlice, DisjointBlobsFromEachPass) {
  auto b = filled(16, 16, 200);
  auto s = filled(16, 16, 200);
  paint(b, 10, 10, 11, 11, 30);
  paint(s, 1, 1, 2, 3, 30);
  const auto cs = detect_slice(view(b), view(s), {100, 5, 2}, {100, 5, 2});
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_NE(cs[0].id, cs[1].id);
  EXPECT_EQ(cs[0].source, Source::laplacian);  // row-major: (1,1) first
  EXPECT_EQ(cs[1].source, Source::bilateral);
  std::set<oracle::PixelSet> expected = oracle::components(b, 100, 5, 2);
  for (const auto& c : oracle::components(s, 100, 5, 2)) expected.insert(c);
  EXPECT_EQ((std::set<oracle::PixelSet>{as_set(cs[0]), as_set(cs[1])}), expected);
}

TEST(DetectSlice, MismatchedInputsRejected) {
  const auto a = filled(4, 4, 0);
  const auto b = filled(5, 4, 0);
  EXPECT_THROW(detect_slice(view(a), view(b), {}, {}), ValidationError);
  EXPECT_THROW(detect_slice(view(a, 0), view(a, 1), {}, {}), ValidationError);
}

TEST(DetectVolume, BrightVolumeIsEmpty) {
  const Volume v(8, 8, 3, 255);
  EXPECT_EQ(detect_volume(v, v, {}, {}).size(), 0u);
}

TEST(DetectVolume, PhantomMatchesPerSliceOracle) {
  PhantomSpec spec;
  spec.rng_seed = 17;
  const auto ph = generate_phantom(spec);
  const auto f = filter_volume(ph.volume, BilateralParams{}, true, 2);
  const GrowParams pb{90, 10, 2};
  const GrowParams pl{80, 10, 2};
  const AnnotationSet a = detect_volume(f.bilateral, *f.sharpened, pb, pl, 3);

  std::size_t expected_total = 0;
  std::set<ComponentId> ids;
  for (int z = 0; z < spec.depth; ++z) {
    const auto sv = [&](const Volume& v) {
      const auto px = v.slice(z).pixels();
      return oracle::Plane{v.width(), v.height(), {px.begin(), px.end()}};
    };
    std::vector<oracle::PixelSet> sets;
    for (const auto& c : oracle::components(sv(f.bilateral), pb.dark_threshold, pb.max_diameter, pb.min_area)) sets.push_back(c);
    for (const auto& c : oracle::components(sv(*f.sharpened), pl.dark_threshold, pl.max_diameter, pl.min_area)) sets.push_back(c);
    expected_total += overlap_groups(sets).size();
    for (const auto& c : a.slice(z)) {
      EXPECT_EQ(c.z, z);
      EXPECT_TRUE(ids.insert(c.id).second);
    }
  }
  EXPECT_EQ(a.size(), expected_total);
  EXPECT_GT(a.size(), 0u);

  EXPECT_EQ(detect_volume(f.bilateral, *f.sharpened, pb, pl, 1), a);
}
