import math

import numpy as np
import pytest

from emtshape.geometry import (
    Disk,
    Ellipse,
    FourierCurve,
    Kite,
    PerturbedDisk,
    Starfish,
    descriptor_from_json,
    descriptor_to_json,
    fourier_coefficient,
    sample,
)


@pytest.mark.parametrize("n", [3, 5, 2, 0, -4])
def test_node_count_validation(n):
    with pytest.raises(ValueError, match="even"):
        sample(Disk(0.0, 1.0), n)


def test_disk_sampling_exact():
    curve = sample(Disk(1.0 - 2.0j, 0.7), 32)
    assert np.allclose(curve.z, 1.0 - 2.0j + 0.7 * np.exp(1j * curve.theta))
    assert np.allclose(curve.dz, 0.7j * np.exp(1j * curve.theta))
    assert np.allclose(curve.normal, np.exp(1j * curve.theta))
    assert curve.perimeter == pytest.approx(2.0 * math.pi * 0.7, rel=1e-14)


def test_orientation_normalized():
    # e^{-i theta} runs clockwise; sampling must flip it
    cw = FourierCurve((1.0,), min_index=-1)
    curve = sample(cw, 16)
    area = 0.5 * (2.0 * math.pi / curve.n) * float(np.imag(np.conj(curve.z) @ curve.dz))
    assert area > 0.0
    assert np.allclose(np.abs(curve.z), 1.0)
    # outward normal points away from the origin on a centered circle
    assert np.allclose(curve.normal * np.conj(curve.z / np.abs(curve.z)), 1.0)


def test_self_intersecting_curve_rejected():
    # limacon with an inner loop: r = 1 + 2 cos(theta)
    with pytest.raises(ValueError, match="not simple"):
        sample(Starfish(0.0, 1.0, 1), 64)


def test_degenerate_speed_rejected():
    with pytest.raises(ValueError, match="speed"):
        sample(FourierCurve((1.0,), min_index=0), 16)


def test_ellipse_perimeter_spectral_convergence():
    # 4:1 aspect ratio; branch points of the speed cap the geometric rate, so
    # the doubling gap reaches 1e-12 one refinement later than for mild shapes
    ellipse = Ellipse(0.0, 4.0, 1.0)
    p64 = sample(ellipse, 64).perimeter
    p128 = sample(ellipse, 128).perimeter
    p256 = sample(ellipse, 256).perimeter
    assert abs(p128 - p64) < 1e-7
    assert abs(p256 - p128) < 1e-12


def test_kite_matches_formula():
    kite = Kite(0.6 + 0.8j, 0.65)
    curve = sample(kite, 16)
    theta = curve.theta
    assert np.allclose(curve.z, 0.6 + 0.8j + np.exp(1j * theta) + 0.65 * np.cos(2 * theta))


def test_starfish_profile():
    star = Starfish(0.0, 0.125, 5)
    curve = sample(star, 64)
    radii = np.abs(curve.z)
    assert np.allclose(radii, 1.0 + 0.25 * np.cos(5 * curve.theta))


def test_perturbed_disk_zero_modes_is_disk():
    plain = sample(Disk(0.2 - 0.1j, 1.1), 32)
    perturbed = sample(PerturbedDisk(0.2 - 0.1j, 1.1, (0.0, 0.0)), 32)
    assert np.allclose(plain.z, perturbed.z)
    assert np.allclose(plain.dz, perturbed.dz)


def test_perturbed_disk_single_mode():
    d = PerturbedDisk(0.0, 1.0, (0.0, 0.0, 0.0, 0.02))
    curve = sample(d, 64)
    assert np.allclose(np.abs(curve.z), 1.0 + 0.04 * np.cos(3 * curve.theta))


def test_fourier_coefficient_band_limited_exact():
    curve = sample(Disk(0.0, 1.0), 16)
    f = np.exp(3j * curve.theta) + 2.0 * np.exp(-2j * curve.theta) + 0.5
    assert fourier_coefficient(curve, 3, f) == pytest.approx(1.0, abs=1e-14)
    assert fourier_coefficient(curve, -2, f) == pytest.approx(2.0, abs=1e-14)
    assert fourier_coefficient(curve, 0, f) == pytest.approx(0.5, abs=1e-14)
    assert fourier_coefficient(curve, 4, f) == pytest.approx(0.0, abs=1e-14)


def test_fourier_coefficient_shape_mismatch():
    curve = sample(Disk(0.0, 1.0), 16)
    with pytest.raises(ValueError):
        fourier_coefficient(curve, 1, np.ones(8))


@pytest.mark.parametrize("descriptor", [
    Disk(0.1 + 0.2j, 0.9),
    Ellipse(-0.3j, 1.3, 0.7),
    Kite(0.6 + 0.8j, 0.65),
    Starfish(-0.9 + 1.2j, 0.125, 5),
    PerturbedDisk(0.05j, 1.02, (0.01, 0.0, 0.003 - 0.001j)),
    FourierCurve((0.1, 0.0, 1.0, 0.05j), min_index=-1),
])
def test_descriptor_json_round_trip(descriptor):
    assert descriptor_from_json(descriptor_to_json(descriptor)) == descriptor


@pytest.mark.parametrize("doc", [
    {"kind": "polygon"},
    {"kind": "disk", "center": [0.0, 0.0]},
    {"kind": "disk", "center": "origin", "radius": 1.0},
    {"kind": "starfish", "center": [0.0, 0.0], "modeAmplitude": 0.1},
    {"radius": 1.0},
])
def test_descriptor_json_malformed(doc):
    with pytest.raises(ValueError):
        descriptor_from_json(doc)


@pytest.mark.parametrize("make", [
    lambda: Disk(0.0, -1.0),
    lambda: Ellipse(0.0, 1.0, 0.0),
    lambda: Starfish(0.0, 0.1, 0),
    lambda: PerturbedDisk(0.0, 0.0, ()),
    lambda: FourierCurve(()),
])
def test_descriptor_validation(make):
    with pytest.raises(ValueError):
        make()
