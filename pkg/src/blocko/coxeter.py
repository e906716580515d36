"""Abstract Coxeter systems from a Coxeter matrix.

Only crystallographic bond labels {2, 3, 4, 6, infinity} are supported, which
covers every integral Weyl group of a symmetrizable Kac-Moody algebra.  For
these labels the standard reflection representation can be realized by
integer matrices acting on the root lattice, so element arithmetic, length
and Bruhat order are exact.

Elements are kept in ShortLex normal form (the lexicographically least
reduced word), computed greedily from left descents.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import TruncationError, UnsupportedError

INFINITY = None  # Coxeter matrix entry for infinite order

# off-diagonal Chevalley pairs (-c_ij, -c_ji) realizing each bond label
_BOND_PAIRS = {2: (0, 0), 3: (1, 1), 4: (1, 2), 6: (1, 3), INFINITY: (2, 2)}


def _tuple_matrix(m):
    return tuple(tuple(row) for row in m)


class CoxeterSystem:
    """A Coxeter system with its integral reflection representation."""

    def __init__(self, matrix):
        matrix = tuple(
            tuple(INFINITY if x in (INFINITY, 0, "inf") else int(x) for x in row)
            for row in matrix
        )
        n = len(matrix)
        for i in range(n):
            if len(matrix[i]) != n:
                raise ValueError("Coxeter matrix must be square")
            for j in range(n):
                if matrix[i][j] != matrix[j][i]:
                    raise ValueError("Coxeter matrix must be symmetric")
                if i == j:
                    if matrix[i][j] != 1:
                        raise ValueError("Coxeter matrix diagonal must be 1")
                elif matrix[i][j] not in _BOND_PAIRS:
                    raise UnsupportedError(
                        f"bond label {matrix[i][j]} not in {{2,3,4,6,inf}}"
                    )
        self.matrix = matrix
        self.generator_count = n
        # Cartan-style pairing: s_i(alpha_j) = alpha_j - cartan[i][j] alpha_i
        cartan = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                cij, cji = _BOND_PAIRS[matrix[i][j]]
                cartan[i][j] = -cij
                cartan[j][i] = -cji
        self.cartan = _tuple_matrix(cartan)
        self.gen_matrices = tuple(
            self._reflection_matrix(i) for i in range(n)
        )

    def _reflection_matrix(self, i):
        n = self.generator_count
        m = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
        for j in range(n):
            m[i][j] -= self.cartan[i][j]
        return _tuple_matrix(m)

    def __eq__(self, other):
        return isinstance(other, CoxeterSystem) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    # -- words ------------------------------------------------------------

    def _mat_mul(self, a, b):
        n = self.generator_count
        return tuple(
            tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
            for i in range(n)
        )

    def _word_matrices(self, word):
        """(W, W^-1) for the product s_{word[0]} ... s_{word[-1]}."""
        n = self.generator_count
        ident = _tuple_matrix(
            [[1 if r == c else 0 for c in range(n)] for r in range(n)]
        )
        w = winv = ident
        for i in word:
            w = self._mat_mul(w, self.gen_matrices[i])
            winv = self._mat_mul(self.gen_matrices[i], winv)
        return w, winv

    def normal_form(self, word):
        """ShortLex normal form of an arbitrary word (0-based indices)."""
        n = self.generator_count
        for i in word:
            if not 0 <= i < n:
                raise ValueError(f"generator index {i} out of range")
        w, winv = self._word_matrices(word)
        out = []
        while True:
            # left descent test: s_i w < w iff w^-1(alpha_i) < 0, i.e. the
            # i-th column of winv has nonpositive entries
            i = next(
                (
                    i
                    for i in range(n)
                    if all(winv[r][i] <= 0 for r in range(n))
                    and any(winv[r][i] for r in range(n))
                ),
                None,
            )
            if i is None:
                break
            out.append(i)
            w = self._mat_mul(self.gen_matrices[i], w)
            winv = self._mat_mul(winv, self.gen_matrices[i])
        return tuple(out)

    def element(self, word=()):
        return Element(self, self.normal_form(tuple(word)))

    def identity(self):
        return Element(self, ())

    def generator(self, i):
        return self.element((i,))


@dataclass(frozen=True)
class Element:
    system: CoxeterSystem
    word: tuple  # ShortLex normal form, 0-based generator indices

    @property
    def length(self):
        return len(self.word)

    def __mul__(self, other):
        if self.system is not other.system and self.system != other.system:
            raise ValueError("elements of different Coxeter systems")
        return Element(self.system, self.system.normal_form(self.word + other.word))

    def inverse(self):
        return Element(self.system, self.system.normal_form(self.word[::-1]))

    def matrix(self):
        return self.system._word_matrices(self.word)[0]

    def __str__(self):
        return " ".join(str(i + 1) for i in self.word) if self.word else "e"

    @classmethod
    def from_string(cls, system, s):
        word = tuple(int(t) - 1 for t in s.split())
        return system.element(word)


def length(w: Element) -> int:
    return w.length


def multiply(a: Element, b: Element) -> Element:
    return a * b


def descents(w: Element):
    """Right descent set {i : l(w s_i) < l(w)}."""
    mat = w.matrix()
    n = w.system.generator_count
    return {
        i
        for i in range(n)
        if all(mat[r][i] <= 0 for r in range(n))
    }


def bruhat_leq(x: Element, w: Element) -> bool:
    """Bruhat order via the subword property."""
    return _bruhat_leq_words(x.system, x.word, w.word)


@lru_cache(maxsize=None)
def _bruhat_leq_words(system, xw, ww):
    if len(xw) > len(ww):
        return False
    if xw == ww or not xw:
        return True
    s = ww[0]  # a left descent of w
    sw = ww[1:]  # reduced: normal form tails are reduced
    sx = system.normal_form((s,) + xw)
    if len(sx) < len(xw):
        return _bruhat_leq_words(system, sx, sw)
    return _bruhat_leq_words(system, xw, sw)


@lru_cache(maxsize=None)
def _lower_cone_words(system, ww):
    """All elements <= w, as normal-form words (subword enumeration)."""
    out = {ww}
    for k in range(len(ww)):
        sub = ww[:k] + ww[k + 1 :]
        out.update(_lower_cone_words(system, system.normal_form(sub)))
    return frozenset(out)


def lower_cone(w: Element):
    """All x <= w in Bruhat order."""
    return sorted(
        (Element(w.system, word) for word in _lower_cone_words(w.system, w.word)),
        key=lambda e: (e.length, e.word),
    )


def interval(x: Element, w: Element):
    """The Bruhat interval [x, w]."""
    return [y for y in lower_cone(w) if bruhat_leq(x, y)]


def elements_up_to(system: CoxeterSystem, length_bound: int):
    """All elements of length <= length_bound (BFS on right multiplication)."""
    out = {(): system.identity()}
    frontier = [system.identity()]
    for _ in range(length_bound):
        nxt = []
        for w in frontier:
            for i in range(system.generator_count):
                ws = w * system.generator(i)
                if ws.length == w.length + 1 and ws.word not in out:
                    out[ws.word] = ws
                    nxt.append(ws)
        frontier = nxt
    return sorted(out.values(), key=lambda e: (e.length, e.word))


def all_elements(system: CoxeterSystem, safety_bound: int = 64):
    """All elements of a finite Coxeter group; error if not closed within
    the safety bound."""
    prev = None
    for bound in range(1, safety_bound + 1):
        cur = elements_up_to(system, bound)
        if prev is not None and len(cur) == len(prev):
            return cur
        prev = cur
    raise TruncationError("group did not close; is it infinite?")


def upper_cone(w: Element, length_bound: int):
    """All y >= w with l(y) <= length_bound."""
    return [
        y
        for y in elements_up_to(w.system, length_bound)
        if bruhat_leq(w, y)
    ]


def coset_min_reps(system: CoxeterSystem, stab_gens, length_bound: int):
    """Minimal-length representatives of W / <stab_gens> for a standard
    parabolic subgroup, up to the length bound."""
    stab = set(stab_gens)
    return [
        w
        for w in elements_up_to(system, length_bound)
        if not (descents(w) & stab)
    ]


def is_finite(system: CoxeterSystem, safety_bound: int = 64) -> bool:
    try:
        all_elements(system, safety_bound)
        return True
    except TruncationError:
        return False
