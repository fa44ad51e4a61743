"""Synthetic binary shapes (all at least 3 px thick, at most 64×64) for thinning tests."""
import numpy as np


def _canvas(h=48, w=48):
    return np.zeros((h, w), dtype=np.uint8)


def _grid(h, w):
    return np.mgrid[0:h, 0:w].astype(float)


def bar(h, w, thick, length, angle_deg=0.0):
    img = _canvas(h, w)
    rr, cc = _grid(h, w)
    t = np.deg2rad(angle_deg)
    r0, c0 = h / 2, w / 2
    along = (cc - c0) * np.cos(t) - (rr - r0) * np.sin(t)
    across = (cc - c0) * np.sin(t) + (rr - r0) * np.cos(t)
    img[(np.abs(along) <= length / 2) & (np.abs(across) <= thick / 2)] = 1
    return img


def ring(h, w, r_out, r_in):
    rr, cc = _grid(h, w)
    d = np.hypot(rr - h / 2, cc - w / 2)
    return ((d <= r_out) & (d >= r_in)).astype(np.uint8)


def cross(h, w, arm, thick):
    img = _canvas(h, w)
    cr, cc = h // 2, w // 2
    img[cr - thick // 2:cr - thick // 2 + thick, cc - arm:cc + arm + 1] = 1
    img[cr - arm:cr + arm + 1, cc - thick // 2:cc - thick // 2 + thick] = 1
    return img


def ellipse(h, w, a, b, angle_deg=0.0):
    rr, cc = _grid(h, w)
    t = np.deg2rad(angle_deg)
    x = (cc - w / 2) * np.cos(t) - (rr - h / 2) * np.sin(t)
    y = (cc - w / 2) * np.sin(t) + (rr - h / 2) * np.cos(t)
    return ((x / a) ** 2 + (y / b) ** 2 <= 1.0).astype(np.uint8)


def letter_l(h, w, thick):
    img = _canvas(h, w)
    img[6:h - 6, 6:6 + thick] = 1
    img[h - 6 - thick:h - 6, 6:w - 6] = 1
    return img


def two_blobs(h, w, rad):
    rr, cc = _grid(h, w)
    a = np.hypot(rr - h / 3, cc - w / 3) <= rad
    b = np.hypot(rr - 2 * h / 3, cc - 2 * w / 3) <= rad
    return (a | b).astype(np.uint8)


def corpus():
    """List of ``(name, image)``; 55 shapes."""
    shapes = []
    for thick in (3, 4, 5, 7):
        for length in (12, 25):
            for ang in (0, 30, 45, 90):
                shapes.append((f"bar-t{thick}-l{length}-a{ang}", bar(40, 40, thick, length, ang)))
    for r_out, r_in in ((10, 6), (14, 9), (18, 12), (20, 16), (12, 8)):
        shapes.append((f"ring-{r_out}-{r_in}", ring(48, 48, r_out, r_in)))
    for arm, thick in ((8, 3), (12, 4), (15, 5), (20, 7)):
        shapes.append((f"cross-{arm}-{thick}", cross(48, 48, arm, thick)))
    for a, b, ang in ((10, 4, 0), (15, 6, 30), (20, 8, 60), (12, 12, 0), (18, 5, 45)):
        shapes.append((f"ellipse-{a}-{b}-{ang}", ellipse(48, 48, a, b, ang)))
    for thick in (3, 5, 8):
        shapes.append((f"L-{thick}", letter_l(40, 40, thick)))
    for rad in (5, 8, 10):
        shapes.append((f"blobs-{rad}", two_blobs(48, 48, rad)))
    shapes.append(("solid-3x10", np.ones((3, 10), dtype=np.uint8)))
    shapes.append(("full-64", np.ones((64, 64), dtype=np.uint8)))
    shapes.append(("border-frame", ring(64, 64, 40, 25)))
    return shapes


def shape(name):
    return dict(corpus())[name]
