"""Pure-Python orbit-image kernel (fallback for the compiled ``_orbit``)."""

import numpy as np


def orbit_images(perm, scal, odd, strides, level, monos, twist):
    perm = np.asarray(perm).tolist()
    scal = np.asarray(scal).tolist()
    odd = np.asarray(odd).tolist()
    strides = np.asarray(strides).tolist()
    twist = np.asarray(twist).tolist()
    rows = np.asarray(monos).tolist()
    half = level // 2
    tgts, ress = [], []
    for mono in rows:
        present = [(g, e) for g, e in enumerate(mono) if e]
        trow, rrow = [], []
        for p, sc, tw in zip(perm, scal, twist):
            tgt = 0
            res = tw
            seq = []
            for g, e in present:
                pg = p[g]
                tgt += e * strides[pg]
                res += e * sc[g]
                if odd[g]:
                    seq.append(pg)
            if len(seq) > 1:
                inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
                if inv & 1:
                    res += half
            trow.append(tgt)
            rrow.append(res % level)
        tgts.append(trow)
        ress.append(rrow)
    shape = (len(rows), len(perm))
    return (np.array(tgts, dtype=np.int64).reshape(shape),
            np.array(ress, dtype=np.int64).reshape(shape))
