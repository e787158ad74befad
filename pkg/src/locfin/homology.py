"""Exact simplicial homology: integer Smith normal form and field coefficients.

Integer homology (Betti numbers and torsion coefficients) comes from a sparse
Smith normal form over arbitrary-precision ints: a cascade of unimodular
eliminations at unit pivots, followed by the classical algorithm on the small
residual matrix.  Field homology and induced maps use a left-to-right column
reduction (the standard persistence-style algorithm) over GF(p) or the
rationals.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence, Union

from .core import Complex, SimplicialMap

# ---------------------------------------------------------------------------
# chain complexes
# ---------------------------------------------------------------------------

@dataclass
class ChainComplex:
    """Bases of simplices per dimension and sparse boundary columns.

    ``boundaries[d]`` has one ``{row: coeff}`` dict per d-simplex; rows index
    the (d-1)-simplices.  Signs alternate along the sorted vertex order.
    """
    basis: dict            # d -> sorted list of d-simplices
    index: dict            # d -> {simplex: position}
    boundaries: dict       # d -> list of sparse columns

    def size(self, d: int) -> int:
        return len(self.basis.get(d, []))

    @property
    def dim(self) -> int:
        return max(self.basis, default=-1)


def chain_complex(C: Complex) -> ChainComplex:
    basis = {d: sorted(group) for d, group in sorted(C.by_dim.items())}
    index = {d: {s: i for i, s in enumerate(g)} for d, g in basis.items()}
    boundaries = {}
    for d, group in basis.items():
        if d == 0:
            boundaries[0] = [{} for _ in group]
            continue
        rows = index[d - 1]
        cols = []
        for s in group:
            col = {}
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                col[rows[face]] = 1 if i % 2 == 0 else -1
            cols.append(col)
        boundaries[d] = cols
    _assert_dd_zero(boundaries)
    return ChainComplex(basis, index, boundaries)


def _assert_dd_zero(boundaries: dict) -> None:
    for d, cols in boundaries.items():
        if d < 2:
            continue
        lower = boundaries[d - 1]
        for col in cols:
            acc: dict = {}
            for row, c in col.items():
                for r2, c2 in lower[row].items():
                    acc[r2] = acc.get(r2, 0) + c * c2
            if any(acc.values()):
                raise AssertionError("boundary of boundary is nonzero")


# ---------------------------------------------------------------------------
# integer Smith normal form
# ---------------------------------------------------------------------------

@dataclass
class SNFResult:
    factors: list          # nonzero diagonal entries, divisibility-ordered
    rank: int

    @property
    def torsion(self) -> list:
        return [f for f in self.factors if f > 1]


def smith_normal_form(A: Union[Sequence[Sequence[int]], list]) -> SNFResult:
    """Smith normal form of an integer matrix given as dense rows."""
    rows: dict = {}
    for i, row in enumerate(A):
        entries = {j: int(v) for j, v in enumerate(row) if v}
        if entries:
            rows[i] = entries
    return _snf_sparse(rows)


def _snf_sparse(rows: dict) -> SNFResult:
    """SNF of a sparse matrix ``{i: {j: v}}``; destroys its argument."""
    cols: dict = {}
    for i, r in rows.items():
        for j in r:
            cols.setdefault(j, set()).add(i)

    unit_count = 0
    heap = []
    for i, r in rows.items():
        for j, v in r.items():
            if v == 1 or v == -1:
                heapq.heappush(heap, (len(r), i, j))

    def eliminate(i, j):
        piv = rows[i][j]
        prow = rows[i]
        for i2 in list(cols[j]):
            if i2 == i:
                continue
            f = rows[i2][j] * piv      # piv is +-1, so piv^-1 == piv
            r2 = rows[i2]
            for j2, v in prow.items():
                old = r2.get(j2)
                if old is None:
                    nv = -f * v
                    r2[j2] = nv
                    cols.setdefault(j2, set()).add(i2)
                    if nv == 1 or nv == -1:
                        heapq.heappush(heap, (len(r2), i2, j2))
                else:
                    nv = old - f * v
                    if nv:
                        r2[j2] = nv
                        if nv == 1 or nv == -1:
                            heapq.heappush(heap, (len(r2), i2, j2))
                    else:
                        del r2[j2]
                        cols[j2].discard(i2)
            if not r2:
                del rows[i2]
        # column j now lives only in row i; clearing row i uses column ops
        # that touch no other row, so the pivot row can simply be dropped.
        for j2 in prow:
            cols[j2].discard(i)
            if not cols[j2]:
                del cols[j2]
        del rows[i]

    while heap:
        _, i, j = heapq.heappop(heap)
        r = rows.get(i)
        if r is None:
            continue
        v = r.get(j)
        if v != 1 and v != -1:
            continue
        eliminate(i, j)
        unit_count += 1

    factors = [1] * unit_count
    if rows:
        factors.extend(_dense_snf([dict(r) for r in rows.values()]))
    factors = _fix_divisibility(factors)
    return SNFResult(factors, len(factors))


def _dense_snf(cols_as_rows: list) -> list:
    """Classical SNF on a small residual, rows given as sparse dicts."""
    col_ids = sorted({j for r in cols_as_rows for j in r})
    remap = {j: k for k, j in enumerate(col_ids)}
    M = [[0] * len(col_ids) for _ in cols_as_rows]
    for i, r in enumerate(cols_as_rows):
        for j, v in r.items():
            M[i][remap[j]] = v

    factors = []
    nr, nc = len(M), len(col_ids)
    top = 0
    while True:
        pivot = None
        best = None
        for i in range(top, nr):
            for j in range(top, nc):
                v = abs(M[i][j])
                if v and (best is None or v < best):
                    best, pivot = v, (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        M[top], M[pi] = M[pi], M[top]
        for row in M:
            row[top], row[pj] = row[pj], row[top]
        while True:
            restart = False
            for i in range(top + 1, nr):
                if M[i][top]:
                    q = M[i][top] // M[top][top]
                    for j in range(top, nc):
                        M[i][j] -= q * M[top][j]
                    if M[i][top]:
                        M[top], M[i] = M[i], M[top]
                        restart = True
                        break
            if restart:
                continue
            for j in range(top + 1, nc):
                if M[top][j]:
                    q = M[top][j] // M[top][top]
                    for i in range(top, nr):
                        M[i][j] -= q * M[i][top]
                    if M[top][j]:
                        for i in range(top, nr):
                            M[i][top], M[i][j] = M[i][j], M[i][top]
                        restart = True
                        break
            if restart:
                continue
            piv = M[top][top]
            bad = None
            for i in range(top + 1, nr):
                for j in range(top + 1, nc):
                    if M[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            for j in range(top, nc):
                M[top][j] += M[bad][j]
        factors.append(abs(M[top][top]))
        top += 1
        if top >= nr or top >= nc:
            for i in range(top, nr):
                for j in range(top, nc):
                    if M[i][j]:
                        raise AssertionError("SNF left nonzero residual")
            break
    return factors


def _fix_divisibility(factors: list) -> list:
    ones = sum(1 for f in factors if f in (1, -1))
    fs = sorted(abs(f) for f in factors if f and f not in (1, -1))
    changed = True
    while changed:
        changed = False
        for a in range(len(fs)):
            for b in range(a + 1, len(fs)):
                if fs[b] % fs[a]:
                    g = gcd(fs[a], fs[b])
                    fs[a], fs[b] = g, fs[a] * fs[b] // g
                    changed = True
        if changed:
            fs.sort()
    return [1] * ones + fs


# ---------------------------------------------------------------------------
# integer homology
# ---------------------------------------------------------------------------

@dataclass
class HomologyResult:
    betti: dict            # d -> rank
    torsion: dict          # d -> invariant factors > 1, each dividing the next
    reduced: bool = False

    def betti_vector(self) -> list:
        top = max(self.betti, default=-1)
        return [self.betti.get(d, 0) for d in range(top + 1)]

    def is_trivial(self) -> bool:
        return (all(b == 0 for b in self.betti.values())
                and all(not t for t in self.torsion.values()))

    def same_groups(self, other: "HomologyResult") -> bool:
        dims = set(self.betti) | set(other.betti)
        return all(self.betti.get(d, 0) == other.betti.get(d, 0)
                   and self.torsion.get(d, []) == other.torsion.get(d, [])
                   for d in dims)

    def __str__(self) -> str:
        parts = []
        for d in sorted(set(self.betti) | set(self.torsion)):
            desc = [str(self.betti.get(d, 0))]
            desc += [f"Z/{t}" for t in self.torsion.get(d, [])]
            parts.append(f"H{d}=({'+'.join(desc)})")
        return " ".join(parts) or "H=0"


def homology(C: Complex, reduced: bool = False) -> HomologyResult:
    """Integer homology from Smith normal forms of the boundary matrices."""
    cc = chain_complex(C)
    top = cc.dim
    snf = {}
    for d in range(1, top + 1):
        rows: dict = {}
        for j, col in enumerate(cc.boundaries[d]):
            for i, v in col.items():
                rows.setdefault(i, {})[j] = v
        snf[d] = _snf_sparse(rows)
    betti, torsion = {}, {}
    for d in range(0, top + 1):
        rank_d = snf[d].rank if d >= 1 else 0
        rank_up = snf[d + 1].rank if d + 1 <= top else 0
        betti[d] = cc.size(d) - rank_d - rank_up
        torsion[d] = snf[d + 1].torsion if d + 1 <= top else []
    if reduced:
        if cc.size(0):
            betti[0] -= 1      # augmentation has rank 1 on a nonempty complex
    return HomologyResult(betti, torsion, reduced)


def is_acyclic(C: Complex) -> bool:
    """True iff the reduced integer homology vanishes in every dimension."""
    if not C.simplices:
        raise ValueError("is_acyclic is undefined for the empty complex")
    return homology(C, reduced=True).is_trivial()


# ---------------------------------------------------------------------------
# field coefficients
# ---------------------------------------------------------------------------

class _Rationals:
    name = "Q"

    @staticmethod
    def of(v):
        return Fraction(v)

    zero = Fraction(0)
    one = Fraction(1)

    @staticmethod
    def div(a, b):
        return Fraction(a) / Fraction(b)


class _PrimeField:
    def __init__(self, p: int):
        if p < 2:
            raise ValueError("field characteristic must be a prime >= 2")
        self.p = p
        self.name = f"GF({p})"
        self.zero = 0
        self.one = 1 % p

    def of(self, v):
        return v % self.p

    def div(self, a, b):
        return (a * pow(b, -1, self.p)) % self.p


def coefficient_field(coeff) -> Union[_Rationals, _PrimeField]:
    if coeff in ("Q", "q", 0, None, "rational", "rationals"):
        return _Rationals()
    if isinstance(coeff, str) and coeff.startswith("mod-"):
        coeff = int(coeff[4:])
    return _PrimeField(int(coeff))


def _to_field_cols(cols, F):
    if isinstance(F, _Rationals):
        return [dict(c) for c in cols]      # ints are exact rationals
    return [{i: v % F.p for i, v in col.items() if v % F.p} for col in cols]


def _addmul(dst: dict, src: dict, factor, F) -> None:
    """dst -= factor * src, elementwise over the field, dropping zeros."""
    mod = F.p if isinstance(F, _PrimeField) else None
    for i, v in src.items():
        nv = dst.get(i, 0) - factor * v
        if mod is not None:
            nv %= mod
        if nv:
            dst[i] = nv
        else:
            dst.pop(i, None)


def _reduce_columns(cols: list, F, track: bool = False):
    """Left-to-right column reduction; returns (reduced, pivots, V).

    ``pivots`` maps the largest-index nonzero row of each nonzero reduced
    column to the column position.  With ``track``, V records the column
    operations so that ``reduced = input . V``.  Over the rationals this
    dispatches to an integer implementation (columns are scale-free here).
    """
    if isinstance(F, _Rationals):
        return _reduce_columns_int(cols, track)
    reduced = [dict(c) for c in cols]
    V = [{j: F.one} for j in range(len(cols))] if track else None
    pivots: dict = {}
    for j, col in enumerate(reduced):
        while col:
            low = max(col)
            k = pivots.get(low)
            if k is None:
                pivots[low] = j
                break
            f = F.div(col[low], reduced[k][low])
            _addmul(col, reduced[k], f, F)
            if track:
                _addmul(V[j], V[k], f, F)
    return reduced, pivots, V


def _normalize_int_col(col: dict, partner: Optional[dict] = None) -> None:
    """Divide an integer column (and its tracking partner) by their content."""
    g = 0
    for v in col.values():
        g = gcd(g, v)
        if g == 1:
            return
    if partner:
        for v in partner.values():
            g = gcd(g, v)
            if g == 1:
                return
    if g > 1:
        for i in col:
            col[i] //= g
        if partner:
            for i in partner:
                partner[i] //= g


def _int_eliminate(col: dict, ref: dict, low: int, vj: Optional[dict],
                   vk: Optional[dict]) -> bool:
    """col := a*col - b*ref with a, b chosen to kill row ``low``; the same
    operation is applied to the tracking column.  Returns True if the column
    was rescaled (callers renormalize periodically)."""
    a_l, b_l = col[low], ref[low]
    g = gcd(a_l, b_l)
    ma, mb = b_l // g, a_l // g
    scaled = ma not in (1, -1)
    if ma != 1:
        for i in col:
            col[i] *= ma
        if vj is not None:
            for i in vj:
                vj[i] *= ma
    for i, v in ref.items():
        nv = col.get(i, 0) - mb * v
        if nv:
            col[i] = nv
        else:
            col.pop(i, None)
    if vj is not None:
        for i, v in vk.items():
            nv = vj.get(i, 0) - mb * v
            if nv:
                vj[i] = nv
            else:
                vj.pop(i, None)
    return scaled


def _reduce_columns_int(cols: list, track: bool = False):
    """Rational column reduction on integer columns.

    Each column may be rescaled by a positive rational at any time, which
    preserves lows, ranks and spans; with tracking, a column and its partner
    are always rescaled together so ``reduced[j]`` stays proportional to
    ``input . V[j]`` with the same constant.
    """
    reduced = [dict(c) for c in cols]
    V = [{j: 1} for j in range(len(cols))] if track else None
    pivots: dict = {}
    for j, col in enumerate(reduced):
        vj = V[j] if track else None
        steps = 0
        while col:
            low = max(col)
            k = pivots.get(low)
            if k is None:
                pivots[low] = j
                break
            scaled = _int_eliminate(col, reduced[k], low,
                                    vj, V[k] if track else None)
            steps += 1
            if scaled or steps % 64 == 0:
                _normalize_int_col(col, vj)
    return reduced, pivots, V


# -- GF(2) fast path: columns as int bitmasks -------------------------------

def _mask_of(col: dict) -> int:
    m = 0
    for i, v in col.items():
        if v & 1:
            m |= 1 << i
    return m


def _mask_bits(m: int):
    while m:
        lowbit = m & -m
        yield lowbit.bit_length() - 1
        m ^= lowbit


def _reduce_masks(masks: list, track: bool = False):
    V = [1 << j for j in range(len(masks))] if track else None
    pivots: dict = {}
    for j in range(len(masks)):
        col = masks[j]
        while col:
            low = col.bit_length() - 1
            k = pivots.get(low)
            if k is None:
                pivots[low] = j
                break
            col ^= masks[k]
            if track:
                V[j] ^= V[k]
        masks[j] = col
    return masks, pivots, V


def field_betti(C: Complex, coeff="Q", reduced: bool = False) -> dict:
    """Betti numbers over a field, from boundary ranks."""
    F = coefficient_field(coeff)
    cc = chain_complex(C)
    top = cc.dim
    ranks = {}
    for d in range(1, top + 1):
        if isinstance(F, _PrimeField) and F.p == 2:
            _, pivots, _ = _reduce_masks([_mask_of(c) for c in cc.boundaries[d]])
        else:
            _, pivots, _ = _reduce_columns(_to_field_cols(cc.boundaries[d], F), F)
        ranks[d] = len(pivots)
    betti = {}
    for d in range(0, top + 1):
        betti[d] = cc.size(d) - ranks.get(d, 0) - ranks.get(d + 1, 0)
    if reduced and cc.size(0):
        betti[0] -= 1
    return betti


# ---------------------------------------------------------------------------
# induced maps on homology
# ---------------------------------------------------------------------------

def _sign_of_sort(seq) -> int:
    """Parity sign of the permutation sorting ``seq`` (distinct entries)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[j] < seq[i]:
                sign = -sign
    return sign


def _chain_map_columns(f: SimplicialMap, d: int, src: ChainComplex,
                       dst: ChainComplex, F) -> list:
    """Columns of the induced chain map C_d(source) -> C_d(target)."""
    cols = []
    rows = dst.index.get(d, {})
    mod = F.p if isinstance(F, _PrimeField) else None
    for s in src.basis.get(d, []):
        images = [f.mapping[v] for v in s]
        if len(set(images)) != len(images):
            cols.append({})
            continue
        sign = _sign_of_sort(images)
        img = tuple(sorted(images))
        cols.append({rows[img]: sign % mod if mod else sign})
    return cols


def _homology_basis_gf2(cc: ChainComplex, d: int, with_boundaries: bool):
    n = cc.size(d)
    masks = [_mask_of(c) for c in cc.boundaries.get(d, [{} for _ in range(n)])]
    red, _, V = _reduce_masks(masks, track=True)
    kernel = [V[j] for j in range(n) if not red[j]]
    up = [_mask_of(c) for c in cc.boundaries.get(d + 1, [])]
    bred, _, _ = _reduce_masks(up)
    b_masks = [m for m in bred if m]
    b_piv = {m.bit_length() - 1: i for i, m in enumerate(b_masks)}
    h_masks, h_piv = [], {}
    for z in kernel:
        while z:
            low = z.bit_length() - 1
            if low in b_piv:
                z ^= b_masks[b_piv[low]]
            elif low in h_piv:
                z ^= h_masks[h_piv[low]]
            else:
                h_piv[low] = len(h_masks)
                h_masks.append(z)
                break
    h_cols = [{i: 1 for i in _mask_bits(m)} for m in h_masks]
    if not with_boundaries:
        return h_cols, [], {}, dict(h_piv)
    b_cols = [{i: 1 for i in _mask_bits(m)} for m in b_masks]
    return h_cols, b_cols, b_piv, h_piv


def _homology_basis(cc: ChainComplex, d: int, F, with_boundaries: bool = True):
    """Cycle representatives of a homology basis, in mutually reduced form.

    Returns ``(h_cols, b_cols, b_pivots, h_pivots)`` where ``b_cols`` are the
    reduced boundary columns (basis of the boundary space, distinct lows) and
    ``h_cols`` are reduced cycles completing them to a basis of the cycles.
    Over the rationals the columns hold ints, scaled representatives.
    """
    if isinstance(F, _PrimeField) and F.p == 2:
        return _homology_basis_gf2(cc, d, with_boundaries)
    n = cc.size(d)
    rational = isinstance(F, _Rationals)
    cols_d = _to_field_cols(cc.boundaries.get(d, [{} for _ in range(n)]), F)
    red_d, _, V = _reduce_columns(cols_d, F, track=True)
    kernel = [V[j] for j in range(n) if not red_d[j]]

    cols_up = _to_field_cols(cc.boundaries.get(d + 1, []), F)
    red_up, _, _ = _reduce_columns(cols_up, F)
    b_cols = [c for c in red_up if c]
    b_pivots = {max(c): i for i, c in enumerate(b_cols)}

    h_cols, h_pivots = [], {}
    for z in kernel:
        z = dict(z)
        steps = 0
        while z:
            low = max(z)
            if low in b_pivots:
                ref = b_cols[b_pivots[low]]
            elif low in h_pivots:
                ref = h_cols[h_pivots[low]]
            else:
                h_pivots[low] = len(h_cols)
                h_cols.append(z)
                break
            if rational:
                scaled = _int_eliminate(z, ref, low, None, None)
                steps += 1
                if scaled or steps % 64 == 0:
                    _normalize_int_col(z)
            else:
                _addmul(z, ref, F.div(z[low], ref[low]), F)
    return h_cols, b_cols, b_pivots, h_pivots


def _express(w: dict, b_cols, b_pivots, h_cols, h_pivots, F):
    """Coordinates of a cycle ``w`` on the homology basis, mod boundaries.

    Exact field arithmetic throughout; only used on the small target side.
    """
    w = dict(w)
    coords = {}
    while w:
        low = max(w)
        if low in b_pivots:
            ref = b_cols[b_pivots[low]]
            idx = None
        elif low in h_pivots:
            idx = h_pivots[low]
            ref = h_cols[idx]
        else:
            raise AssertionError("cycle not in span of boundaries and basis")
        f = F.div(w[low], ref[low])
        if idx is not None:
            coords[idx] = coords.get(idx, F.zero) + f
        _addmul(w, ref, f, F)
    return coords


def _matrix_rank(mat: list, F) -> int:
    cols = []
    for j in range(len(mat[0]) if mat else 0):
        col = {i: mat[i][j] for i in range(len(mat)) if mat[i][j]}
        if col and isinstance(F, _Rationals):
            mult = 1
            for v in col.values():
                mult = mult * Fraction(v).denominator // gcd(mult, Fraction(v).denominator)
            col = {i: int(v * mult) for i, v in col.items()}
        cols.append(col)
    _, pivots, _ = _reduce_columns(cols, F)
    return len(pivots)


@dataclass
class InducedMapResult:
    coefficients: str
    matrices: dict         # d -> matrix (rows: target basis, cols: source basis)
    iso: dict              # d -> bool

    @property
    def all_iso(self) -> bool:
        return all(self.iso.values())


def induced_map_homology(f: SimplicialMap, coeff="Q") -> InducedMapResult:
    """Matrices of the map induced on homology with field coefficients.

    A d-simplex maps to its image when the image keeps d+1 distinct vertices
    (signed by the parity of the sorting permutation) and to zero otherwise.
    """
    rep = f.validate()
    if not rep.ok:
        raise ValueError("invalid simplicial map: " + "; ".join(rep.problems))
    F = coefficient_field(coeff)
    src = chain_complex(f.source)
    dst = chain_complex(f.target)
    top = max(src.dim, dst.dim)
    matrices, iso = {}, {}
    for d in range(0, top + 1):
        sh, _, _, _ = _homology_basis(src, d, F, with_boundaries=False)
        th, tb, tbp, thp = _homology_basis(dst, d, F)
        P = _chain_map_columns(f, d, src, dst, F)
        mat = [[F.zero] * len(sh) for _ in range(len(th))]
        for j, z in enumerate(sh):
            w: dict = {}
            for i, v in z.items():
                _addmul(w, P[i], -v, F)
            coords = _express(w, tb, tbp, th, thp, F)
            for i, v in coords.items():
                mat[i][j] = v
        matrices[d] = mat
        iso[d] = (len(sh) == len(th)
                  and (len(sh) == 0 or _matrix_rank(mat, F) == len(sh)))
    return InducedMapResult(F.name, matrices, iso)
