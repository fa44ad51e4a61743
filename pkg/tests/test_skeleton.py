import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import count_components_8, zhang_suen_oracle
from shapes import corpus
from skelgcn import skeletonize, thinning_pass
from skelgcn.errors import ParameterError

# produced by oracles.zhang_suen_oracle on a solid 3x10 block
BAR_3X10_SKELETON = [
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 1, 1, 1, 1, 1, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
]


@st.composite
def blobby_images(draw):
    """Random unions of filled rectangles, sized for the oracle."""
    h = draw(st.integers(4, 24))
    w = draw(st.integers(4, 24))
    img = np.zeros((h, w), np.uint8)
    for _ in range(draw(st.integers(0, 5))):
        r0 = draw(st.integers(0, h - 1))
        c0 = draw(st.integers(0, w - 1))
        img[r0:r0 + draw(st.integers(1, 8)), c0:c0 + draw(st.integers(1, 8))] = 1
    return img


def test_empty():
    img = np.zeros((5, 7), np.uint8)
    assert np.array_equal(skeletonize(img), img)


def test_single_pixel_survives():
    img = np.zeros((5, 5), np.uint8)
    img[2, 2] = 1
    assert np.array_equal(skeletonize(img), img)


def test_solid_bar():
    out = skeletonize(np.ones((3, 10), np.uint8))
    assert out.tolist() == BAR_3X10_SKELETON
    assert np.array_equal(out, zhang_suen_oracle(np.ones((3, 10), np.uint8).tolist()))


def test_pass_on_empty():
    out, deleted = thinning_pass(np.zeros((4, 4), np.uint8), 1)
    assert deleted == 0 and not out.any()


@pytest.mark.parametrize("sub_pass", [1, 2])
@pytest.mark.parametrize("embed", [False, True])
def test_pass_on_line(sub_pass, embed):
    # tips have one neighbour (B = 1 < 2); interior pixels see two 0->1
    # transitions (A = 2), so neither is deletable
    line = np.ones((1, 5), np.uint8)
    if embed:
        line = np.pad(line, 2)
    out, deleted = thinning_pass(line, sub_pass)
    assert deleted == 0
    assert np.array_equal(out, line)


@pytest.mark.parametrize("name,img", corpus()[::6])
def test_fixed_point_has_no_deletions(name, img):
    skel = skeletonize(img)
    for sp in (1, 2):
        assert thinning_pass(skel, sp)[1] == 0


def test_pass_counts_deletions():
    block = np.ones((4, 4), np.uint8)
    out, deleted = thinning_pass(block, 1)
    assert deleted == int(block.sum() - out.sum()) > 0


def test_bad_sub_pass():
    with pytest.raises(ParameterError):
        thinning_pass(np.zeros((2, 2), np.uint8), 3)


def test_two_by_two_block_vanishes():
    # a known Zhang-Suen property: every pixel of a 2x2 block is deletable
    assert not skeletonize(np.ones((2, 2), np.uint8)).any()


@given(blobby_images())
@settings(max_examples=80, deadline=None)
def test_matches_oracle_and_properties(img):
    skel = skeletonize(img)
    assert np.array_equal(skel, zhang_suen_oracle(img.tolist()))
    assert not (skel & (1 - img)).any()
    assert np.array_equal(skeletonize(skel), skel)


def test_trace_records_each_sub_pass():
    img = np.ones((7, 12), np.uint8)
    seen = []
    final = skeletonize(img, trace=lambda it, sp, im: seen.append((it, sp, int(im.sum()))))
    assert [s[1] for s in seen] == [1, 2] * (len(seen) // 2)
    assert seen[-1][2] == seen[-2][2] == final.sum()
    counts = [s[2] for s in seen]
    assert counts == sorted(counts, reverse=True)


@pytest.mark.parametrize("name,img", corpus())
def test_connectivity_preserved(name, img):
    assert count_components_8(skeletonize(img)) == count_components_8(img)
