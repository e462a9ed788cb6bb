#include <atomic>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hoi/interactions.hpp"
#include "test_support.hpp"

namespace hoi {
namespace {

const KernelParams kDefault{5.0, 1.01};

Recording standardized_random(std::size_t c, std::size_t t, std::uint64_t seed) {
  return standardize(testing::random_recording(c, t, seed));
}

// Recording whose channels are all copies of one source.
Recording copies(std::size_t c, std::size_t t, std::uint64_t seed) {
  Recording rec = testing::random_recording(c, t, seed);
  for (Eigen::Index r = 1; r < rec.data.rows(); ++r) rec.data.row(r) = rec.data.row(0);
  return standardize(rec);
}

TEST(BuildCache, ShapeAndSymmetry) {
  const EntropyCache cache = build_cache(standardized_random(3, 50, 1), kDefault);
  ASSERT_EQ(cache.singles.size(), 3u);
  ASSERT_EQ(cache.channel_grams.size(), 3u);
  EXPECT_TRUE(cache.pairs == cache.pairs.transpose());
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      if (i == j) continue;
      EXPECT_GE(cache.pairs(i, j), std::max(cache.singles[i], cache.singles[j]) - 1e-9);
    }
  }
}

TEST(BuildCache, PerformsOneEigendecompositionPerSingleAndPair) {
  const Recording rec = standardized_random(9, 40, 2);
  const auto before = eigendecomposition_count();
  build_cache(rec, kDefault, 2);
  EXPECT_EQ(eigendecomposition_count() - before, 9u + 36u);
}

TEST(BuildCache, RejectsSingleChannelAndBadParams) {
  EXPECT_THROW(build_cache(standardized_random(1, 20, 1), kDefault), TooFewChannels);
  EXPECT_THROW(build_cache(standardized_random(3, 20, 1), KernelParams{5.0, 1.0}), ConfigError);
}

// K o K for a Gaussian kernel of width sigma is the Gaussian kernel of width
// sigma / sqrt(2), so a channel joined with its own copy has exactly the
// entropy of the narrower kernel, not the channel's own entropy.
TEST(BuildCache, IdenticalChannelsJoinAtNarrowerKernel) {
  const Recording rec = copies(2, 80, 5);
  const EntropyCache cache = build_cache(rec, kDefault);
  const auto x = rec.channel(0);
  const double narrow =
      entropy(gram(std::span<const double>(x.data(), x.size()), kDefault.sigma / std::sqrt(2.0)),
              kDefault.alpha);
  EXPECT_NEAR(cache.pairs(0, 1), narrow, 1e-9);
  EXPECT_GT(cache.pairs(0, 1), cache.singles[0]);
  EXPECT_NEAR(mutual_information(cache, 0, 1), 2.0 * cache.singles[0] - narrow, 1e-9);
}

TEST(BuildCache, PermutationEquivariantBitExact) {
  const Recording rec = standardized_random(8, 60, 3);
  const auto perm = testing::random_permutation(8, 21);
  const EntropyCache a = build_cache(rec, kDefault);
  const EntropyCache b = build_cache(testing::permute_channels(rec, perm), kDefault);
  for (std::size_t r = 0; r < 8; ++r) {
    EXPECT_EQ(b.singles[r], a.singles[perm[r]]);
    for (std::size_t s = 0; s < 8; ++s) {
      if (r == s) continue;
      EXPECT_EQ(b.pairs(r, s), a.pairs(perm[r], perm[s]));
    }
  }
}

TEST(MutualInformation, IndependentChannelsNearZero) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const EntropyCache cache = build_cache(standardized_random(2, 200, 500 + seed), kDefault, 1);
    EXPECT_LT(std::abs(mutual_information(cache, 0, 1)), 0.05) << "seed " << seed;
  }
}

TEST(MutualInformation, SymmetricAndRejectsSelf) {
  const EntropyCache cache = build_cache(standardized_random(4, 30, 4), kDefault);
  EXPECT_EQ(mutual_information(cache, 1, 3), mutual_information(cache, 3, 1));
  EXPECT_THROW(mutual_information(cache, 2, 2), IndexError);
  EXPECT_THROW(mutual_information(cache, 0, 4), IndexError);
}

TEST(PairwiseView, SmallestCase) {
  const EntropyCache cache = build_cache(standardized_random(2, 30, 6), kDefault);
  const PairwiseView v = pairwise_view(cache);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v.values(0, 1), v.values(1, 0));
  EXPECT_EQ(v.values(0, 0), cache.singles[0]);
  EXPECT_EQ(v.values(1, 1), cache.singles[1]);
}

TEST(PairwiseView, IdenticalChannelsGiveEqualOffDiagonals) {
  const PairwiseView v = pairwise_view(build_cache(copies(4, 40, 8), kDefault));
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j)
      if (i != j) {
        EXPECT_EQ(v.values(i, j), v.values(0, 1));
      }
}

TEST(PairwiseView, MatchesUncachedRecomputation) {
  const Recording rec = standardized_random(10, 50, 9);
  const PairwiseView v = pairwise_view(build_cache(rec, kDefault));
  std::vector<NormalizedGram> grams;
  for (std::size_t c = 0; c < 10; ++c) {
    const auto x = rec.channel(c);
    grams.push_back(gram(std::span<const double>(x.data(), x.size()), kDefault.sigma));
  }
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 10; ++j) {
      const double h_i = entropy(grams[i], kDefault.alpha);
      const double expected = i == j ? h_i
                                     : h_i + entropy(grams[j], kDefault.alpha) -
                                           joint_entropy(grams[i], grams[j], kDefault.alpha);
      EXPECT_NEAR(v.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), expected,
                  1e-12);
    }
  }
}

TEST(Triplet, CoInformationIdentity) {
  const EntropyCache cache = build_cache(standardized_random(6, 100, 10), kDefault);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i + 1; j < 6; ++j)
      for (std::size_t k = j + 1; k < 6; ++k) {
        const TcDtcBreakdown b = triplet_o_information(cache, i, j, k);
        const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j),
                   kk = static_cast<Eigen::Index>(k);
        const double co = cache.singles[i] + cache.singles[j] + cache.singles[k] -
                          cache.pairs(ii, jj) - cache.pairs(ii, kk) - cache.pairs(jj, kk) +
                          b.triple_joint;
        EXPECT_LT(std::abs(b.o - co), 1e-10);
        EXPECT_EQ(b.o, b.tc - b.dtc);
      }
}

TEST(Triplet, OrderingDoesNotMatter) {
  const EntropyCache cache = build_cache(standardized_random(4, 50, 11), kDefault);
  const double ref = triplet_o_information(cache, 0, 2, 3).o;
  EXPECT_EQ(triplet_o_information(cache, 3, 0, 2).o, ref);
  EXPECT_EQ(triplet_o_information(cache, 2, 3, 0).o, ref);
}

TEST(Triplet, RepeatedOrOutOfRangeIndex) {
  const EntropyCache cache = build_cache(standardized_random(4, 20, 12), kDefault);
  EXPECT_THROW(triplet_o_information(cache, 1, 1, 2), IndexError);
  EXPECT_THROW(triplet_o_information(cache, 0, 1, 4), IndexError);
}

// Small-sample versions of the sign oracles; the acceptance suite runs the
// full 100-seed versions.
TEST(Triplet, RedundantCopiesArePositive) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Recording rec = testing::random_recording(3, 400, 700 + seed);
    const auto jitter = testing::random_samples(800, 900 + seed, 1e-6);
    for (Eigen::Index t = 0; t < 400; ++t) {
      rec.data(1, t) = rec.data(0, t) + jitter[static_cast<std::size_t>(t)];
      rec.data(2, t) = rec.data(0, t) + jitter[static_cast<std::size_t>(400 + t)];
    }
    const EntropyCache cache = build_cache(standardize(rec), kDefault, 1);
    EXPECT_GT(triplet_o_information(cache, 0, 1, 2).o, 0.0) << "seed " << seed;
  }
}

TEST(Triplet, XorIsSynergistic) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    Recording rec;
    rec.data.resize(3, 400);
    for (Eigen::Index t = 0; t < 400; ++t) {
      const double b1 = (rng() & 1) ? 1.0 : -1.0;
      const double b2 = (rng() & 1) ? 1.0 : -1.0;
      rec.data(0, t) = b1;
      rec.data(1, t) = b2;
      rec.data(2, t) = b1 * b2;
    }
    const EntropyCache cache = build_cache(standardize(rec), kDefault, 1);
    EXPECT_LT(triplet_o_information(cache, 0, 1, 2).o, 0.0) << "seed " << seed;
  }
}

TEST(OInfoTensor, SmallestTensor) {
  const EntropyCache cache = build_cache(standardized_random(3, 40, 13), kDefault);
  const OInfoTensor t = oinfo_tensor(cache);
  const double v = triplet_o_information(cache, 0, 1, 2).o;
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) {
        if (i == j || i == k || j == k) {
          EXPECT_EQ(t(i, j, k), 0.0);
        } else {
          EXPECT_EQ(t(i, j, k), v);
          ++nonzero;
        }
      }
  EXPECT_EQ(nonzero, 6u);
}

TEST(OInfoTensor, MatchesSerialRecomputation) {
  const EntropyCache cache = build_cache(standardized_random(6, 60, 14), kDefault);
  const OInfoTensor t = oinfo_tensor(cache, 3);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      for (std::size_t k = 0; k < 6; ++k) {
        const double expected =
            (i == j || i == k || j == k) ? 0.0 : triplet_o_information(cache, i, j, k).o;
        EXPECT_EQ(t(i, j, k), expected);
      }
}

TEST(OInfoTensor, IndependentOfThreadCount) {
  const EntropyCache cache = build_cache(standardized_random(9, 40, 15), kDefault);
  const OInfoTensor serial = oinfo_tensor(cache, 1);
  for (unsigned threads : {2u, 3u, 8u}) {
    EXPECT_TRUE(oinfo_tensor(cache, threads).values() == serial.values()) << threads;
  }
}

TEST(OInfoTensor, EigendecompositionBudget) {
  const Recording rec = standardized_random(10, 30, 16);
  const auto before = eigendecomposition_count();
  const EntropyCache cache = build_cache(rec, kDefault);
  oinfo_tensor(cache);
  EXPECT_EQ(eigendecomposition_count() - before, 10u + 45u + 120u);
}

TEST(OInfoTensor, PermutationEquivariantBitExact) {
  const Recording rec = standardized_random(7, 50, 17);
  const auto perm = testing::random_permutation(7, 5);
  const OInfoTensor a = oinfo_tensor(build_cache(rec, kDefault));
  const OInfoTensor b = oinfo_tensor(build_cache(testing::permute_channels(rec, perm), kDefault));
  const PairwiseView va = pairwise_view(build_cache(rec, kDefault));
  const PairwiseView vb = pairwise_view(build_cache(testing::permute_channels(rec, perm), kDefault));
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j) {
      EXPECT_EQ(vb.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                va.values(static_cast<Eigen::Index>(perm[i]), static_cast<Eigen::Index>(perm[j])));
      for (std::size_t k = 0; k < 7; ++k) EXPECT_EQ(b(i, j, k), a(perm[i], perm[j], perm[k]));
    }
}

TEST(OInfoTensor, ProgressReachesTotal) {
  const EntropyCache cache = build_cache(standardized_random(8, 30, 18), kDefault);
  std::atomic<std::uint64_t> last{0};
  std::atomic<int> calls{0};
  oinfo_tensor(cache, 2, [&](std::uint64_t done, std::uint64_t total) {
    EXPECT_EQ(total, 56u);
    EXPECT_LE(done, total);
    std::uint64_t prev = last.load();
    while (done > prev && !last.compare_exchange_weak(prev, done)) {
    }
    ++calls;
  });
  EXPECT_EQ(last.load(), 56u);
  EXPECT_GT(calls.load(), 0);
}

TEST(OInfoTensor, TooFewChannels) {
  const EntropyCache cache = build_cache(standardized_random(2, 20, 19), kDefault);
  EXPECT_THROW(oinfo_tensor(cache), TooFewChannels);
}

TEST(TripletCount, AalAtlasSize) {
  EXPECT_EQ(triplet_count(116), 253460u);
  EXPECT_EQ(pair_count(116), 6670u);
}

TEST(PearsonView, SelfAndAntiCorrelation) {
  Recording rec = testing::random_recording(3, 25, 20);
  rec.data.row(1) = rec.data.row(0);
  rec.data.row(2) = -rec.data.row(0);
  const PairwiseView v = pearson_view(standardize(rec));
  EXPECT_EQ(v.values(0, 0), 1.0);
  EXPECT_NEAR(v.values(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(v.values(0, 2), -1.0, 1e-15);
}

TEST(PearsonView, HandComputedPair) {
  Recording rec;
  rec.data.resize(2, 3);
  rec.data << 1, 2, 3, 1, 2, 4;
  // 3 / sqrt(2 * 14/3)
  EXPECT_NEAR(pearson_view(rec).values(0, 1), 0.9819805060619656, 1e-12);
  EXPECT_NEAR(pearson_view(standardize(rec)).values(0, 1), 0.9819805060619656, 1e-12);
}

TEST(PearsonView, ConstantChannel) {
  Recording rec;
  rec.data.resize(2, 3);
  rec.data << 1, 2, 3, 4, 4, 4;
  EXPECT_THROW(pearson_view(rec), DegenerateChannel);
}

}  // namespace
}  // namespace hoi
