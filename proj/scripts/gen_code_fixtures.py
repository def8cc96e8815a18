#!/usr/bin/env python3
"""Write the code fixture files under data/codes/.

Each file is a one-line JSON preamble followed by named matrix sections in the
"rows cols" + one-line-per-row sparse text format.
"""

import json
import os
import sys

import numpy as np


def shift(size, power):
    return np.roll(np.eye(size, dtype=np.uint8), power, axis=1)


def circulant(size, exps):
    out = np.zeros((size, size), dtype=np.uint8)
    for e in exps:
        out ^= shift(size, e)
    return out


def gf2_rank(mat):
    a = mat.copy() % 2
    rank = 0
    rows, cols = a.shape
    for c in range(cols):
        hits = np.nonzero(a[rank:, c])[0]
        if hits.size == 0:
            continue
        pivot = rank + hits[0]
        a[[rank, pivot]] = a[[pivot, rank]]
        mask = a[:, c].astype(bool)
        mask[rank] = False
        a[mask] ^= a[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def matrix_text(mat):
    lines = [f"{mat.shape[0]} {mat.shape[1]}"]
    for row in mat:
        lines.append(" ".join(str(c) for c in np.nonzero(row)[0]))
    return "\n".join(lines) + "\n"


def write_fixture(path, preamble, sections):
    with open(path, "w") as f:
        f.write(json.dumps(preamble) + "\n")
        for name, mat in sections:
            f.write(f"[{name}]\n")
            f.write(matrix_text(mat))


BB_SOURCE = "bivariate bicycle polynomials from Bravyi et al., Nature 627, 778 (2024)"

BB = [
    ("bb_72_12_6", 6, 6, [[3, 0], [0, 1], [0, 2]], [[0, 3], [1, 0], [2, 0]], 12, 6),
    ("bb_90_8_10", 15, 3, [[9, 0], [0, 1], [0, 2]], [[0, 0], [2, 0], [7, 0]], 8, 10),
    ("bb_108_8_10", 9, 6, [[3, 0], [0, 1], [0, 2]], [[0, 3], [1, 0], [2, 0]], 8, 10),
    ("bb_144_12_12", 12, 6, [[3, 0], [0, 1], [0, 2]], [[0, 3], [1, 0], [2, 0]], 12, 12),
]


def b1_matrices():
    ell = 63
    first_row = [[27], [], [], [], [], [0], [54]]
    a = np.zeros((7 * ell, 7 * ell), dtype=np.uint8)
    for i in range(7):
        for j in range(7):
            exps = first_row[(j - i) % 7]
            if exps:
                a[i * ell:(i + 1) * ell, j * ell:(j + 1) * ell] = circulant(ell, exps)
    b_block = np.kron(np.eye(7, dtype=np.uint8), circulant(ell, [0, 1, 6]))
    hx = np.hstack([a, b_block])
    hz = np.hstack([b_block.T, a.T])
    return hx, hz


def main(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    for name, l, m, at, bt, k, d in BB:
        write_fixture(
            os.path.join(out_dir, name + ".code"),
            {"name": name, "n": 2 * l * m, "k": k, "d_upper": d, "construction": "bivariate_bicycle",
             "l": l, "m": m, "a_terms": at, "b_terms": bt, "provenance": BB_SOURCE},
            [],
        )

    hx, hz = b1_matrices()
    assert not ((hx.astype(np.int64) @ hz.T.astype(np.int64)) % 2).any()
    k = hx.shape[1] - gf2_rank(hx) - gf2_rank(hz)
    assert k == 24, k
    write_fixture(
        os.path.join(out_dir, "b1_882_24.code"),
        {"name": "b1_882_24", "n": 882, "k": 24, "d_upper": 24, "construction": "explicit",
         "provenance": "generalized hypergraph product over 63x63 circulants: A has first block row "
                       "(x^27, 0, 0, 0, 0, 1, x^54) shifted cyclically, b = 1 + x + x^6, hx = [A | bI], "
                       "hz = [b^T I | A^T] (Panteleev and Kalachev, Quantum 5, 585 (2021)); (n, k) verified"},
        [("hx", hx), ("hz", hz)],
    )

    h = circulant(31, [0, 2, 5])
    write_fixture(
        os.path.join(out_dir, "c2_1922_50.code"),
        {"name": "c2_1922_50", "n": 1922, "k": 50, "d_upper": 16, "construction": "hypergraph_product",
         "provenance": "hypergraph product of the 31x31 circulant 1 + x^2 + x^5 with itself; reproduces "
                       "(n, k); distance not verified"},
        [("h1", h), ("h2", h)],
    )

    rep = np.array([[1, 1, 0], [0, 1, 1]], dtype=np.uint8)
    write_fixture(
        os.path.join(out_dir, "hgp_rep3_13_1.code"),
        {"name": "hgp_rep3_13_1", "n": 13, "k": 1, "d_upper": 3, "construction": "hypergraph_product",
         "provenance": "hypergraph product of the 3-bit repetition code with itself"},
        [("h1", rep), ("h2", rep)],
    )


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "data", "codes"))
