#include "gcmvs/loss.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gcmvs;

namespace {

ProbabilityVolume uniform_volume(int depth, Eigen::Index h, Eigen::Index w, double lo, double step)
{
    ProbabilityVolume vol;
    for (int d = 0; d < depth; ++d) {
        vol.probs.push_back(Grid::Constant(h, w, 1.0 / depth));
        vol.shared_hypotheses.push_back(lo + step * d);
    }
    return vol;
}

ProbabilityVolume random_volume(std::mt19937_64& rng, int depth, Eigen::Index h, Eigen::Index w, bool per_pixel)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ProbabilityVolume vol;
    vol.probs.assign(std::size_t(depth), Grid::Zero(h, w));
    for (Eigen::Index r = 0; r < h; ++r)
        for (Eigen::Index c = 0; c < w; ++c) {
            double total = 0;
            for (int d = 0; d < depth; ++d) {
                // Occasional exact zeros exercise the probability floor.
                const double v = u(rng) < 0.1 ? 0.0 : std::pow(u(rng), 4.0);
                vol.probs[std::size_t(d)](r, c) = v;
                total += v;
            }
            if (total == 0.0) {
                vol.probs[0](r, c) = 1.0;
                total = 1.0;
            }
            for (int d = 0; d < depth; ++d)
                vol.probs[std::size_t(d)](r, c) /= total;
        }
    if (per_pixel) {
        vol.pixel_hypotheses.assign(std::size_t(depth), Grid::Zero(h, w));
        for (Eigen::Index r = 0; r < h; ++r)
            for (Eigen::Index c = 0; c < w; ++c) {
                double v = 400.0 + 50.0 * u(rng);
                for (int d = 0; d < depth; ++d) {
                    vol.pixel_hypotheses[std::size_t(d)](r, c) = v;
                    v += 0.5 + 3.0 * u(rng);
                }
            }
    } else {
        for (int d = 0; d < depth; ++d)
            vol.shared_hypotheses.push_back(425.0 + 10.0 * d);
    }
    return vol;
}

} // namespace

TEST_CASE("certain prediction on the right bin has zero error")
{
    ProbabilityVolume vol = uniform_volume(4, 1, 1, 100.0, 10.0);
    for (auto& p : vol.probs)
        p(0, 0) = 0.0;
    vol.probs[2](0, 0) = 1.0;
    const ErrorMap e = cross_entropy_error(vol, DepthMap::from_values(Grid::Constant(1, 1, 121.0)));
    REQUIRE(e.valid(0, 0));
    CHECK(e.values(0, 0) == 0.0);
}

TEST_CASE("uniform distribution costs log D")
{
    const ProbabilityVolume vol = uniform_volume(8, 3, 4, 100.0, 10.0);
    const ErrorMap e = cross_entropy_error(vol, DepthMap::from_values(Grid::Constant(3, 4, 133.0)));
    CHECK(e.valid.all());
    for (Eigen::Index i = 0; i < e.values.size(); ++i)
        CHECK(e.values(i) == doctest::Approx(std::log(8.0)).epsilon(1e-15));
    CHECK(std::log(8.0) == doctest::Approx(2.0794).epsilon(1e-4));
}

TEST_CASE("nearest bin ties go to the lower hypothesis")
{
    const ProbabilityVolume vol = uniform_volume(3, 1, 1, 100.0, 10.0);
    CHECK(nearest_hypothesis(vol, 0, 0, 105.0) == 0);
    CHECK(nearest_hypothesis(vol, 0, 0, 105.0001) == 1);
    CHECK(nearest_hypothesis(vol, 0, 0, 115.0) == 1);
    CHECK(nearest_hypothesis(vol, 0, 0, 120.0) == 2);
}

TEST_CASE("zero probability on the target bin hits the floor")
{
    ProbabilityVolume vol = uniform_volume(2, 1, 1, 100.0, 10.0);
    vol.probs[0](0, 0) = 0.0;
    vol.probs[1](0, 0) = 1.0;
    const ErrorMap e = cross_entropy_error(vol, DepthMap::from_values(Grid::Constant(1, 1, 100.0)));
    CHECK(e.values(0, 0) == doctest::Approx(-std::log(1e-12)).epsilon(1e-15));
}

TEST_CASE("unsupervised and out-of-range ground truth is masked out")
{
    const ProbabilityVolume vol = uniform_volume(4, 1, 4, 100.0, 10.0);
    Grid gt(1, 4);
    gt << 0.0, 99.0, 131.0, 110.0;
    const ErrorMap e = cross_entropy_error(vol, DepthMap::from_values(gt));
    CHECK_FALSE(e.valid(0, 0));
    CHECK_FALSE(e.valid(0, 1));
    CHECK_FALSE(e.valid(0, 2));
    CHECK(e.valid(0, 3));
}

TEST_CASE("unnormalized or negative distributions are rejected")
{
    ProbabilityVolume vol = uniform_volume(4, 2, 2, 100.0, 10.0);
    const DepthMap gt = DepthMap::from_values(Grid::Constant(2, 2, 110.0));
    vol.probs[1](1, 0) += 2e-5;
    CHECK_THROWS_AS(cross_entropy_error(vol, gt), ComputeError);
    vol.probs[1](1, 0) -= 2e-5;
    vol.probs[1](1, 0) += 5e-6;
    CHECK_NOTHROW(cross_entropy_error(vol, gt));

    ProbabilityVolume neg = uniform_volume(2, 1, 1, 100.0, 10.0);
    neg.probs[0](0, 0) = -0.5;
    neg.probs[1](0, 0) = 1.5;
    CHECK_THROWS_AS(cross_entropy_error(neg, DepthMap::from_values(Grid::Constant(1, 1, 100.0))), ComputeError);

    // Pixels without supervision are not checked.
    ProbabilityVolume junk = uniform_volume(2, 1, 1, 100.0, 10.0);
    junk.probs[0](0, 0) = 7.0;
    CHECK_NOTHROW(cross_entropy_error(junk, DepthMap(1, 1)));
}

TEST_CASE("volume shape problems are rejected")
{
    ProbabilityVolume vol = uniform_volume(3, 2, 2, 100.0, 10.0);
    vol.shared_hypotheses[2] = vol.shared_hypotheses[1];
    CHECK_THROWS_AS(vol.check_shape(), std::invalid_argument);
    vol = uniform_volume(3, 2, 2, 100.0, 10.0);
    vol.probs[1] = Grid::Constant(2, 3, 1.0 / 3);
    CHECK_THROWS_AS(vol.check_shape(), std::invalid_argument);
    vol = uniform_volume(3, 2, 2, 100.0, 10.0);
    CHECK_THROWS_AS(cross_entropy_error(vol, DepthMap(3, 2)), std::invalid_argument);
}

TEST_CASE("cross entropy matches the naive loop")
{
    std::mt19937_64 rng(31);
    for (bool per_pixel : {false, true}) {
        const ProbabilityVolume vol = random_volume(rng, 16, 20, 24, per_pixel);
        std::uniform_real_distribution<double> gt_d(410.0, 600.0), u(0.0, 1.0);
        DepthMap gt(20, 24);
        for (Eigen::Index r = 0; r < 20; ++r)
            for (Eigen::Index c = 0; c < 24; ++c)
                if (u(rng) < 0.9) {
                    gt.values(r, c) = gt_d(rng);
                    gt.valid(r, c) = true;
                }
        const ErrorMap e = cross_entropy_error(vol, gt);
        const Grid want = oracle::cross_entropy(vol, gt);
        for (Eigen::Index r = 0; r < 20; ++r)
            for (Eigen::Index c = 0; c < 24; ++c) {
                REQUIRE(e.valid(r, c) == !std::isnan(want(r, c)));
                if (e.valid(r, c))
                    CHECK(std::abs(e.values(r, c) - want(r, c)) <= 1e-10);
            }
    }
}

TEST_CASE("cross entropy is non-negative and zero only for certain predictions")
{
    std::mt19937_64 rng(32);
    const ProbabilityVolume vol = random_volume(rng, 6, 10, 10, false);
    const ErrorMap e = cross_entropy_error(vol, DepthMap::from_values(Grid::Constant(10, 10, 445.0)));
    for (Eigen::Index r = 0; r < 10; ++r)
        for (Eigen::Index c = 0; c < 10; ++c) {
            CHECK(e.values(r, c) >= 0.0);
            CHECK((e.values(r, c) == 0.0) == (vol.probs[2](r, c) == 1.0));
        }
}

TEST_CASE("stage loss worked example")
{
    Grid xi_p(2, 2), xi_d(2, 2);
    xi_p << 1.0, 2.0, 1.0, 1.5;
    xi_d << 1.0, 1.0, 2.0, 4.0;
    CHECK(stage_loss(xi_p, xi_d, Mask::Constant(2, 2, true)) == 2.75);
}

TEST_CASE("stage loss reductions")
{
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.0, 5.0), pen(1.0, 2.0);
    Grid err(30, 30), p(30, 30);
    Mask valid(30, 30);
    double plain_sum = 0.0;
    long n = 0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        err(i) = u(rng);
        p(i) = pen(rng);
        valid(i) = i % 7 != 0;
        if (valid(i)) {
            plain_sum += err(i);
            ++n;
        }
    }
    const double mean_err = plain_sum / double(n);
    CHECK(stage_loss(Grid::Ones(30, 30), err, valid) == doctest::Approx(mean_err).epsilon(1e-14));
    CHECK(stage_loss(p, Grid::Zero(30, 30), valid) == 0.0);

    const double weighted = stage_loss(p, err, valid);
    CHECK(weighted >= mean_err * (1 - 1e-15));
    CHECK(weighted <= 2.0 * mean_err * (1 + 1e-15));

    for (double c : {0.5, 1.5, 3.0})
        CHECK(stage_loss(Grid::Constant(30, 30, c), err, valid) ==
              doctest::Approx(c * stage_loss(Grid::Ones(30, 30), err, valid)).epsilon(1e-15));

    CHECK_THROWS_WITH_AS(stage_loss(p, err, Mask::Constant(30, 30, false)), "no supervised pixels", ComputeError);
    CHECK_THROWS_AS(stage_loss(p, Grid::Zero(3, 3), valid), std::invalid_argument);
}

TEST_CASE("stage loss is insensitive to summation order")
{
    // Values spanning many magnitudes; a reversed layout must agree to 1e-12.
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> e(-8.0, 8.0);
    Grid err(1, 4096), rev(1, 4096);
    for (Eigen::Index i = 0; i < err.size(); ++i)
        err(i) = std::pow(10.0, e(rng));
    rev = err.reverse();
    const Mask all = Mask::Constant(1, 4096, true);
    CHECK(std::abs(stage_loss(Grid::Ones(1, 4096), err, all) - stage_loss(Grid::Ones(1, 4096), rev, all)) <=
          1e-12 * stage_loss(Grid::Ones(1, 4096), err, all));
}

TEST_CASE("penalty-map overload uses the error mask")
{
    PenaltyMap p;
    p.m = 1;
    p.values = Grid::Constant(1, 3, 2.0);
    p.mask_sum = Image<int>::Ones(1, 3);
    ErrorMap e{Grid::Zero(1, 3), Mask::Constant(1, 3, false)};
    e.values << 1.0, 100.0, 3.0;
    e.valid << true, false, true;
    CHECK(stage_loss(p, e) == 4.0);
}

TEST_CASE("total loss")
{
    CHECK(total_loss({1.0, 1.0, 1.0}, StageWeights{}) == 4.0);
    CHECK(total_loss({1.0, 1.0, 1.0}, StageWeights{0.0, 0.0, 0.0}) == 0.0);
    CHECK(total_loss({0.5, 0.25, 0.125}, StageWeights{}) == 1.0);
    CHECK(total_loss({0.3, 0.7, 1.1}, StageWeights{2.0, 0.5, 4.0}) == 2.0 * 0.3 + 0.5 * 0.7 + 4.0 * 1.1);
    const StageWeights defaults;
    CHECK(defaults.alpha == 1.0);
    CHECK(defaults.beta == 1.0);
    CHECK(defaults.gamma == 2.0);
}
