#!/usr/bin/env python3
"""Generate circuit-level detector error models for a bivariate bicycle code memory experiment.

Z-basis memory: data qubits start in |0>, each round measures every X and Z check with one
ancilla per check, and a final transversal Z measurement closes the Z-check detectors. Only
Z-check detectors and Z logical observables are declared, so the model is the X-error
decoding problem.

Schedules: "interleaved" (default) is the depth-8 cycle where X and Z CNOT layers overlap;
"sequential" runs all X-check CNOTs and then all Z-check CNOTs.

Noise (strength p): X/Z errors after ancilla reset and before measurement, DEPOLARIZE2 after
every CNOT layer, DEPOLARIZE1 on data qubits idle during a layer and after each cycle.

Requires stim (pip install stim). Outputs flat DEM text accepted by qdiv's parser.
"""

import argparse
import sys

import numpy as np
import stim


def cyclic_shift(size, power):
    return np.roll(np.eye(size, dtype=np.uint8), power, axis=1)


def monomial(l, m, i, j):
    return np.kron(cyclic_shift(l, i), cyclic_shift(m, j)) % 2


def gf2_rank(mat):
    a = mat.copy() % 2
    rank = 0
    rows, cols = a.shape
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if a[r, c]), None)
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        for r in range(rows):
            if r != rank and a[r, c]:
                a[r] ^= a[rank]
        rank += 1
    return rank


def gf2_kernel(mat):
    a = mat.copy() % 2
    rows, cols = a.shape
    pivots = []
    rank = 0
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if a[r, c]), None)
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        for r in range(rows):
            if r != rank and a[r, c]:
                a[r] ^= a[rank]
        pivots.append(c)
        rank += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.uint8)
        v[f] = 1
        for r, pc in enumerate(pivots):
            if a[r, f]:
                v[pc] = 1
        basis.append(v)
    return np.array(basis, dtype=np.uint8)


def z_logicals(hx, hz):
    """Basis of ker(hx) modulo rowspace(hz)."""
    out = []
    current = hz.copy()
    base = gf2_rank(current)
    for v in gf2_kernel(hx):
        trial = np.vstack([current, v])
        r = gf2_rank(trial)
        if r > base:
            current, base = trial, r
            out.append(v)
    return np.array(out, dtype=np.uint8)


def code_blocks(l, m, a_terms, b_terms):
    a_blocks = [monomial(l, m, i, j) for i, j in a_terms]
    b_blocks = [monomial(l, m, i, j) for i, j in b_terms]
    a = sum(a_blocks) % 2
    b = sum(b_blocks) % 2
    return a_blocks, b_blocks, np.hstack([a, b]), np.hstack([b.T, a.T])


def perm(block, i):
    return int(np.argmax(block[i]))


def build_circuit(l, m, a_terms, b_terms, rounds, p, schedule="interleaved"):
    size = l * m
    a_blocks, b_blocks, hx, hz = code_blocks(l, m, a_terms, b_terms)
    n = 2 * size
    data = list(range(n))
    xanc = [n + i for i in range(size)]
    zanc = [n + size + i for i in range(size)]
    lz = z_logicals(hx, hz)

    # Neighbour of each check in direction d: X checks reach L via A1..A3 and R via B1..B3;
    # Z checks reach L via B1^T..B3^T and R via A1^T..A3^T.
    def x_nb(i, d):
        return perm(a_blocks[d], i) if d < 3 else size + perm(b_blocks[d - 3], i)

    def z_nb(i, d):
        return perm(b_blocks[d].T, i) if d < 3 else size + perm(a_blocks[d - 3].T, i)

    c = stim.Circuit()
    c.append("R", data + zanc)
    c.append("X_ERROR", data + zanc, p)

    def layer(pairs):
        flat = [q for pair in pairs for q in pair]
        c.append("CX", flat)
        c.append("DEPOLARIZE2", flat, p)
        busy = set(flat)
        idle = [q for q in data if q not in busy]
        if idle:
            c.append("DEPOLARIZE1", idle, p)

    def x_layer(d):
        return [(xanc[i], x_nb(i, d)) for i in range(size)]

    def z_layer(d):
        return [(z_nb(i, d), zanc[i]) for i in range(size)]

    for r in range(rounds):
        if schedule == "interleaved":
            # Depth-8 cycle: X and Z CNOT layers interleaved so each layer touches every data qubit once.
            s_x = [None, 1, 4, 3, 5, 0, 2]
            s_z = [3, 5, 0, 1, 2, 4, None]
            c.append("RX", xanc)
            c.append("Z_ERROR", xanc, p)
            for t in range(7):
                pairs = []
                if s_x[t] is not None:
                    pairs += x_layer(s_x[t])
                if s_z[t] is not None:
                    pairs += z_layer(s_z[t])
                if t == 6:
                    c.append("X_ERROR", zanc, p)
                    c.append("M", zanc)
                layer(pairs)
            c.append("Z_ERROR", xanc, p)
            c.append("MX", xanc)
            c.append("DEPOLARIZE1", data, p)
            c.append("R", zanc)
            c.append("X_ERROR", zanc, p)
            z_rec = -2 * size
            prev_z = -4 * size
        else:
            # Sequential: all X-check CNOTs, then all Z-check CNOTs.
            c.append("RX", xanc)
            c.append("Z_ERROR", xanc, p)
            for d in range(6):
                layer(x_layer(d))
            for d in range(6):
                layer(z_layer(d))
            c.append("Z_ERROR", xanc, p)
            c.append("MX", xanc)
            c.append("X_ERROR", zanc, p)
            c.append("M", zanc)
            c.append("R", zanc)
            c.append("X_ERROR", zanc, p)
            z_rec = -size
            prev_z = -3 * size
        for i in range(size):
            cur = stim.target_rec(z_rec + i)
            if r == 0:
                c.append("DETECTOR", [cur])
            else:
                c.append("DETECTOR", [cur, stim.target_rec(prev_z + i)])

    c.append("X_ERROR", data, p)
    c.append("M", data)
    last_z = -n - 2 * size if schedule == "interleaved" else -n - size
    for i in range(size):
        targets = [stim.target_rec(-n + q) for q in np.nonzero(hz[i])[0]]
        targets.append(stim.target_rec(last_z + i))
        c.append("DETECTOR", targets)
    for k, row in enumerate(lz):
        c.append("OBSERVABLE_INCLUDE", [stim.target_rec(-n + q) for q in np.nonzero(row)[0]], k)
    return c


PRESETS = {
    "bb_72_12_6": (6, 6, [(3, 0), (0, 1), (0, 2)], [(0, 3), (1, 0), (2, 0)]),
}


def main(argv):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--code", default="bb_72_12_6", choices=sorted(PRESETS))
    ap.add_argument("--rounds", type=int, default=6)
    ap.add_argument("--p", type=float, required=True)
    ap.add_argument("--schedule", default="interleaved", choices=["interleaved", "sequential"])
    ap.add_argument("--out", required=True)
    args = ap.parse_args(argv)
    l, m, at, bt = PRESETS[args.code]
    circuit = build_circuit(l, m, at, bt, args.rounds, args.p, args.schedule)
    dem = circuit.detector_error_model(decompose_errors=False, flatten_loops=True)
    header = (
        f"# {args.code} Z-memory, {args.rounds} rounds, {args.schedule} schedule, circuit noise p={args.p}\n"
        f"# generated by scripts/gen_bb_dem.py with stim {stim.__version__}\n"
    )
    with open(args.out, "w") as f:
        f.write(header)
        f.write(str(dem))
        f.write("\n")
    print(f"{args.out}: {dem.num_detectors} detectors, {dem.num_observables} observables, {dem.num_errors} mechanisms")


if __name__ == "__main__":
    main(sys.argv[1:])
