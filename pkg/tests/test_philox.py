import numpy as np
import pytest

from becknerlab.philox import normal_scalar, normals, philox4x32, philox4x32_scalar, split_seed

# Random123 known-answer vectors for Philox4x32-10
KAT = [
    ((0, 0, 0, 0), (0, 0), (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8)),
    ((0xFFFFFFFF,) * 4, (0xFFFFFFFF,) * 2, (0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD)),
    ((0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344), (0xA4093822, 0x299F31D0),
     (0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1)),
]


@pytest.mark.parametrize("ctr,key,expected", KAT)
def test_known_answers(ctr, key, expected):
    out = philox4x32(*[np.array([c]) for c in ctr], *key)
    assert tuple(int(o[0]) for o in out) == expected
    out = philox4x32_scalar(*[np.uint64(c) for c in ctr], np.uint64(key[0]), np.uint64(key[1]))
    assert tuple(int(o) for o in out) == expected


def test_split_seed():
    assert split_seed(0) == (0, 0)
    assert split_seed(2**32 + 5) == (5, 1)
    with pytest.raises(ValueError):
        split_seed(-1)


def test_scalar_matches_vector_normals():
    k0, k1 = (np.uint64(v) for v in split_seed(12345))
    paths = np.arange(50, dtype=np.uint64)
    for step in (1, 7, 1024):
        for pair in (0, 1):
            z0, z1 = normals(paths, step, pair, k0, k1)
            for i in (0, 13, 49):
                assert normal_scalar(i, step, 2 * pair, k0, k1) == z0[i]
                assert normal_scalar(i, step, 2 * pair + 1, k0, k1) == z1[i]


def test_normals_are_standard():
    z0, z1 = normals(np.arange(200_000, dtype=np.uint64), 3, 0, 9, 0)
    z = np.concatenate([z0, z1])
    se = 1.0 / np.sqrt(z.size)
    assert abs(z.mean()) < 4 * se
    assert abs(z.var() - 1.0) < 4 * np.sqrt(2.0) * se
    assert abs(np.corrcoef(z0, z1)[0, 1]) < 4 / np.sqrt(z0.size)
    assert abs(np.mean(z**4) - 3.0) < 0.05


def test_streams_differ_by_counter_and_key():
    p = np.arange(8, dtype=np.uint64)
    a = normals(p, 1, 0, 1, 0)[0]
    assert not np.array_equal(a, normals(p, 2, 0, 1, 0)[0])
    assert not np.array_equal(a, normals(p, 1, 1, 1, 0)[0])
    assert not np.array_equal(a, normals(p, 1, 0, 2, 0)[0])
