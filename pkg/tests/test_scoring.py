"""Rule-based composition fitness and the external scorer hook."""
from __future__ import annotations

import itertools

import numpy as np
import pytest

from retargetkit import (
    CompositionContext,
    EnergyMap,
    ExternalToolError,
    FootprintOutOfBoundsError,
    RasterImage,
    UnparsableScoreError,
    score_external,
    score_rule_based,
)


def uniform_context(canvas=90, footprint=(25, 25, 10, 10), ratio=None):
    background = RasterImage(np.full((canvas, canvas, 3), 0.5))
    energy = EnergyMap(np.zeros((canvas, canvas)))
    fh, fw = footprint[2], footprint[3]
    if ratio is None:
        ratio = (fh * fw) / (canvas * canvas)
    return CompositionContext(background, energy, footprint, ratio)


class TestRuleBased:
    def test_centroid_on_thirds_gives_full_thirds(self):
        # 10x10 footprint at (25, 25): centroid (30, 30) == (90/3, 90/3)
        report = score_rule_based(uniform_context())
        assert report.components["thirds"] == pytest.approx(1.0, abs=1e-12)

    def test_zero_energy_gives_full_occlusion(self):
        report = score_rule_based(uniform_context())
        assert report.components["occlusion"] == 1.0

    def test_matching_area_ratio_gives_full_scale(self):
        report = score_rule_based(uniform_context())
        assert report.components["scale"] == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_weights_select_one_term(self):
        ctx = uniform_context(footprint=(40, 40, 10, 10))
        weights = {"thirds": 1.0, "occlusion": 0.0, "clearance": 0.0, "scale": 0.0}
        report = score_rule_based(ctx, weights=weights)
        assert report.total == pytest.approx(report.components["thirds"], abs=1e-12)

    def test_exhaustive_sweep_peaks_on_thirds_intersection(self):
        canvas, side = 90, 10
        background = RasterImage(np.full((canvas, canvas, 3), 0.5))
        energy = EnergyMap(np.zeros((canvas, canvas)))
        ratio = side * side / (canvas * canvas)
        best_total, best_centroids = -1.0, []
        for row, col in itertools.product(range(canvas - side + 1), repeat=2):
            ctx = CompositionContext(background, energy, (row, col, side, side), ratio)
            total = score_rule_based(ctx).total
            if total > best_total + 1e-12:
                best_total, best_centroids = total, [(row + side / 2, col + side / 2)]
            elif abs(total - best_total) <= 1e-12:
                best_centroids.append((row + side / 2, col + side / 2))
        intersections = {
            (canvas * fy, canvas * fx) for fy in (1 / 3, 2 / 3) for fx in (1 / 3, 2 / 3)
        }
        assert any(c in intersections for c in best_centroids)

    def test_weight_scaling_invariance(self):
        ctx = uniform_context(footprint=(12, 30, 8, 14), ratio=0.05)
        base = {"thirds": 0.35, "occlusion": 0.30, "clearance": 0.15, "scale": 0.20}
        scaled = {k: 7.3 * v for k, v in base.items()}
        assert score_rule_based(ctx, base).total == pytest.approx(
            score_rule_based(ctx, scaled).total, abs=1e-12
        )

    def test_translation_symmetry(self):
        # mirror placements: same thirds distance, same margins, same footprint
        left = score_rule_based(uniform_context(footprint=(25, 25, 10, 10)))
        right = score_rule_based(uniform_context(footprint=(25, 55, 10, 10)))
        assert left.total == pytest.approx(right.total, abs=1e-12)

    def test_clearance_monotone_in_margin(self):
        canvas = 120
        background = RasterImage(np.full((canvas, canvas, 3), 0.5))
        energy = EnergyMap(np.zeros((canvas, canvas)))
        previous = -1.0
        # slide a row-centered footprint away from the left edge; keep the
        # smaller margin as the driver
        for col in (0, 5, 10, 20, 30):
            ctx = CompositionContext(background, energy, (55, col, 10, 10), 0.01)
            clearance = score_rule_based(ctx).components["clearance"]
            assert clearance >= previous
            previous = clearance

    def test_all_terms_in_unit_interval(self, rng):
        canvas_h, canvas_w = 40, 60
        background = RasterImage(rng.uniform(size=(canvas_h, canvas_w, 3)))
        energy = EnergyMap(rng.uniform(size=(canvas_h, canvas_w)))
        for _ in range(200):
            fh = int(rng.integers(1, canvas_h + 1))
            fw = int(rng.integers(1, canvas_w + 1))
            row = int(rng.integers(0, canvas_h - fh + 1))
            col = int(rng.integers(0, canvas_w - fw + 1))
            ctx = CompositionContext(
                background, energy, (row, col, fh, fw), float(rng.uniform(0.01, 0.5))
            )
            report = score_rule_based(ctx)
            assert 0.0 <= report.total <= 1.0
            assert all(0.0 <= v <= 1.0 for v in report.components.values())

    def test_out_of_bounds_footprint_rejected(self):
        background = RasterImage(np.full((20, 20, 3), 0.5))
        energy = EnergyMap(np.zeros((20, 20)))
        ctx = CompositionContext(background, energy, (15, 15, 10, 10), 0.1)
        with pytest.raises(FootprintOutOfBoundsError):
            score_rule_based(ctx)

    def test_occlusion_penalizes_busy_footprint(self):
        canvas = 30
        background = RasterImage(np.full((canvas, canvas, 3), 0.5))
        values = np.zeros((canvas, canvas))
        values[10:20, 10:20] = 1.0
        energy = EnergyMap(values)
        busy = CompositionContext(background, energy, (10, 10, 10, 10), 0.1)
        calm = CompositionContext(background, energy, (0, 0, 10, 10), 0.1)
        assert (
            score_rule_based(busy).components["occlusion"]
            < score_rule_based(calm).components["occlusion"]
        )

    def test_scale_log_symmetry(self):
        half = uniform_context(footprint=(10, 10, 10, 10), ratio=2 * 100 / 90**2)
        double = uniform_context(footprint=(10, 10, 10, 10), ratio=0.5 * 100 / 90**2)
        assert score_rule_based(half).components["scale"] == pytest.approx(
            score_rule_based(double).components["scale"], abs=1e-12
        )


class TestExternalScorer:
    def image(self, rng):
        return RasterImage(rng.uniform(size=(4, 4, 3)))

    def test_parses_decimal(self, rng, tool_factory):
        command = tool_factory("score", "print('4.2')")
        assert score_external(self.image(rng), command) == 4.2

    def test_garbage_output(self, rng, tool_factory):
        command = tool_factory("garbage", "print('abc')")
        with pytest.raises(UnparsableScoreError):
            score_external(self.image(rng), command)

    def test_nonzero_exit(self, rng, tool_factory):
        command = tool_factory("dies", "import sys; sys.exit(2)")
        with pytest.raises(ExternalToolError):
            score_external(self.image(rng), command)
