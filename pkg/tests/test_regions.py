import numpy as np
import pytest

from topoarch.errors import InvalidParameterError, UnsupportedDimensionError
from topoarch.mlp import Architecture, MLPModel, init_model
from topoarch.persistence import BettiProfile
from topoarch.regions import (
    DecisionMask,
    expressivity,
    homology_match,
    mask_betti,
    mask_euler_characteristic,
    padded_bbox,
    rasterize,
    write_pgm,
)

from oracles import cubical_betti, cubical_euler


def test_all_ones_mask():
    mask = np.ones((20, 20), dtype=bool)
    assert mask_betti(mask) == (1, 0)
    assert mask_euler_characteristic(mask) == 1


def test_annulus_raster():
    yy, xx = np.mgrid[0:64, 0:64]
    r2 = (xx - 32) ** 2 + (yy - 32) ** 2
    ring = (r2 <= 28**2) & (r2 >= 12**2)
    assert mask_betti(ring) == (1, 1)
    assert mask_euler_characteristic(ring) == 0


def test_empty_mask():
    assert mask_betti(np.zeros((16, 16), dtype=bool)) == (0, 0)
    assert mask_euler_characteristic(np.zeros((16, 16), dtype=bool)) == 0


def test_diagonal_pair_connectivity_convention():
    # corner-sharing cells form one component (8-connected foreground, like
    # the glued cubical complex), and the background stays one outside region
    mask = np.zeros((2, 2), dtype=bool)
    mask[0, 0] = mask[1, 1] = True
    assert mask_betti(mask) == (1, 0)
    assert mask_euler_characteristic(mask) == 1


def test_border_touching_hole():
    mask = np.ones((8, 8), dtype=bool)
    mask[3:5, 3:5] = False
    assert mask_betti(mask) == (1, 1)
    mask[0, :] = False  # open the frame: still one component, hole intact
    assert mask_betti(mask) == (1, 1)


@pytest.mark.parametrize("seed", range(10))
def test_random_masks_match_cubical_oracle(seed):
    rng = np.random.default_rng(seed)
    h, w = rng.integers(4, 33, size=2)
    mask = rng.random((h, w)) < rng.uniform(0.25, 0.75)
    b0, b1 = cubical_betti(mask)
    assert mask_betti(mask) == (b0, b1)
    assert mask_euler_characteristic(mask) == cubical_euler(mask)
    assert b0 - b1 == cubical_euler(mask)


def constant_positive_model():
    w = np.zeros((2, 2))
    b = np.array([0.0, 1.0])
    return MLPModel([w], [b])


def test_rasterize_constant_positive():
    mask = rasterize(constant_positive_model(), ((0.0, 0.0), (1.0, 1.0)), 32)
    assert mask.grid.all()
    assert mask_betti(mask) == (1, 0)


def test_rasterize_tie_goes_negative():
    model = MLPModel([np.zeros((2, 2))], [np.zeros(2)])
    mask = rasterize(model, ((0.0, 0.0), (1.0, 1.0)), 32)
    assert not mask.grid.any()


def test_rasterize_requires_2d():
    model = init_model(Architecture(1, 4), input_dim=3, beta0=1, seed=0)
    with pytest.raises(UnsupportedDimensionError):
        rasterize(model, ((0.0, 0.0), (1.0, 1.0)), 32)


def test_resolution_minimum():
    with pytest.raises(InvalidParameterError):
        DecisionMask(np.zeros((8, 8), dtype=bool), ((0, 0), (1, 1)), 8)


def test_halfplane_model_region():
    # logit difference = x - 0.5: right half positive
    w = np.array([[0.0, 1.0], [0.0, 0.0]])
    b = np.array([0.0, -0.5])
    model = MLPModel([w], [b])
    mask = rasterize(model, ((0.0, 0.0), (1.0, 1.0)), 64)
    assert mask_betti(mask) == (1, 0)
    assert not mask.grid[:, 0].any()
    assert mask.grid[:, -1].all()


def test_resolution_stability_on_clean_regions():
    yy, xx = np.mgrid[0:64, 0:64]
    disk_lo = ((xx - 32) ** 2 + (yy - 32) ** 2) <= 20**2
    yy, xx = np.mgrid[0:128, 0:128]
    disk_hi = ((xx - 64) ** 2 + (yy - 64) ** 2) <= 40**2
    assert mask_betti(disk_lo) == mask_betti(disk_hi) == (1, 0)


def test_expressivity_examples():
    assert expressivity(BettiProfile((2, 1)), BettiProfile((4, 2))).values == (0.5, 0.5)
    assert expressivity(BettiProfile((6, 3)), BettiProfile((4, 2))).values == (1.0, 1.0)
    assert expressivity(BettiProfile((3, 0)), BettiProfile((3, 0))).values == (1.0, 1.0)
    assert expressivity(BettiProfile((1, 0)), BettiProfile((2, 1))).values == (0.5, 0.0)


def test_homology_match_examples():
    assert homology_match(BettiProfile((2, 0)), BettiProfile((2, 0)))
    assert not homology_match(BettiProfile((2, 0)), BettiProfile((4, 2)))
    prof = BettiProfile((3, 2))
    assert homology_match(prof, prof)


def test_expressivity_full_iff_match_or_exceeds():
    f, d = BettiProfile((5, 3)), BettiProfile((4, 2))
    score = expressivity(f, d)
    assert score.full() and not homology_match(f, d)
    f2 = BettiProfile((4, 2))
    assert expressivity(f2, d).full() and homology_match(f2, d)


def test_padded_bbox():
    pts = np.array([[0.0, 0.0], [2.0, 4.0]])
    (x0, y0), (x1, y1) = padded_bbox(pts, pad=0.1)
    assert x0 == pytest.approx(-0.2)
    assert x1 == pytest.approx(2.2)
    assert y0 == pytest.approx(-0.4)
    assert y1 == pytest.approx(4.4)


def test_pgm_export(tmp_path):
    mask = np.zeros((16, 16), dtype=bool)
    mask[4:12, 4:12] = True
    path = tmp_path / "mask.pgm"
    write_pgm(mask, path)
    data = path.read_bytes()
    assert data.startswith(b"P5\n16 16\n255\n")
    payload = data.split(b"\n", 3)[3]
    assert len(payload) == 256
    assert payload[4 * 16 + 4] == 255
    assert payload[0] == 0
