import numpy as np
import pytest

from muqsim.geometry import (GROUPS, LATTICE_CONSTANT, SHELL_SIZES, ShellGeometry, caf2_geometry,
                             distance_groups, lattice_sites)


def test_shell_sizes_and_radii():
    sites = lattice_sites()
    assert len(sites) == sum(SHELL_SIZES)
    a = LATTICE_CONSTANT
    radii = sorted({round(float(np.linalg.norm(p)), 9) for _, p in sites})
    assert radii == pytest.approx([a * np.sqrt(v) for v in (0.25, 1.25, 2.25, 3.25)])
    groups = [g for g, _ in sites]
    assert groups.count("nn-nn-ca") == 4 and groups.count("nn-nn-void") == 4
    assert groups.count("nn-nn-axial") == 2


def test_qubit_counts():
    assert [caf2_geometry(k).n_qubits for k in (1, 2, 3, 4)] == [3, 11, 21, 29]


def test_ca_split_matches_brute_force():
    # Ca sits at centres a*(i+1/2, j+1/2, k) with i+j+k even relative to the bond;
    # check that "ca" sites are the ones closer to an occupied cube centre
    a = LATTICE_CONSTANT
    for g, p in lattice_sites():
        if g not in ("nn-nn-ca", "nn-nn-void"):
            continue
        x, y = p[0] / a, p[1] / a
        assert (x * y > 0) == (g == "nn-nn-ca")


def test_displacement_moves_group_only():
    geo = ShellGeometry(2, displacements={"nn": -0.18})
    assert geo.group_distance("nn") == pytest.approx(LATTICE_CONSTANT / 2 - 0.18)
    assert geo.group_distance("n-nn") == pytest.approx(LATTICE_CONSTANT * np.sqrt(1.25))
    s = geo.system()
    assert list(distance_groups(s).values())[0] == [1, 2]


def test_geometry_errors():
    with pytest.raises(ValueError):
        ShellGeometry(2, displacements={"nnn-nn": 0.1})
    with pytest.raises(ValueError):
        ShellGeometry(1, displacements={"nn": -2.0}).sites()
    with pytest.raises(ValueError):
        ShellGeometry(5)


def test_groups_cover_shells():
    assert sorted(set(GROUPS.values())) == [1, 2, 3, 4]
