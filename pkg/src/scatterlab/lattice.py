"""The geometric lattice generated by A[h+1], its Möbius function and
characteristic polynomial."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError, VerificationError, check_guard
from .fields import FiniteField
from .qmath import gauss_binomial
from .scattered import max_scattered_dimension
from .spreads import PartialSpread
from .subspaces import Subspace, canonicalize, enumerate_subspaces, matmul, zero_space

ATOM_GUARD = 10**7
LATTICE_GUARD = 10**6


def atoms_of(A: PartialSpread, h: int) -> list[Subspace]:
    """All (h+1)-subspaces of the elements of A, deduplicated and sorted."""
    m = A.m
    if h < 0:
        raise ValidationError("h must be >= 0")
    if h + 1 > m:
        return []
    F = A.field
    check_guard("atoms", gauss_binomial(m, h + 1, F.order) * len(A), ATOM_GUARD)
    if h + 1 == m:
        return sorted(A.elements)
    coeffs = np.concatenate(list(enumerate_subspaces(F, m, h + 1).batches()))
    out = set()
    for S in A.elements:
        imgs = matmul(F, coeffs, S.rows)
        for M in imgs:
            out.add(canonicalize(F, M, A.N))
    return sorted(out)


@dataclass
class LatticeL:
    field: FiniteField
    N: int
    elements: list[Subspace]
    atoms: list[Subspace]
    mobius: list[int]
    below: list[list[int]] = field(repr=False, default_factory=list)

    @property
    def bottom(self) -> Subspace:
        return self.elements[0]

    @property
    def top(self) -> Subspace:
        return self.elements[-1]

    def __len__(self) -> int:
        return len(self.elements)


def build_lattice(atoms: list[Subspace], field: FiniteField, N: int) -> LatticeL:
    """Close the atoms under sums; Möbius values from the bottom {0}."""
    bottom = zero_space(field, N)
    atoms = sorted(set(atoms))
    if any(a.N != N or a.field != field for a in atoms):
        raise ValidationError("atom in wrong ambient space")
    def mask_of(V: Subspace) -> int:
        return sum(1 << i for i, A in enumerate(atoms) if V.contains_subspace(A))

    # every element is a join of atoms, so W <= V iff atoms(W) is a subset of atoms(V)
    masks = {A: 1 << i for i, A in enumerate(atoms)}
    full = (1 << len(atoms)) - 1
    frontier = list(atoms)
    while frontier:
        nxt = []
        for X in frontier:
            todo = full & ~masks[X]
            while todo:
                i = (todo & -todo).bit_length() - 1
                Y = X.join(atoms[i])
                if Y not in masks:
                    masks[Y] = mask_of(Y)
                    nxt.append(Y)
                    check_guard("lattice size", len(masks), LATTICE_GUARD)
                todo &= ~(1 << i)
                if Y.dim == X.dim + 1:  # then X + b = Y for every atom b of Y not in X
                    todo &= ~masks[Y]
        frontier = nxt
    elements = [bottom] + sorted(masks, key=lambda S: (S.dim, S.key))
    mk = [0] + [masks[V] for V in elements[1:]]
    below: list[list[int]] = [[] for _ in elements]
    for i in range(1, len(elements)):
        mi = mk[i]
        below[i] = [j for j in range(i) if mk[j] & mi == mk[j] and mk[j] != mi]
    mob = [0] * len(elements)
    mob[0] = 1
    for i in range(1, len(elements)):
        mob[i] = -sum(mob[j] for j in below[i])
    return LatticeL(field, N, elements, atoms, mob, below)


@dataclass
class CharPoly:
    N: int
    coeffs: dict[int, int]  # exponent -> coefficient

    def __call__(self, x: int) -> int:
        return sum(c * x**e for e, c in self.coeffs.items())

    def descending(self) -> list[int]:
        return [self.coeffs.get(e, 0) for e in range(self.N, -1, -1)]

    def __str__(self) -> str:
        parts = []
        for e in range(self.N, -1, -1):
            c = self.coeffs.get(e, 0)
            if c == 0:
                continue
            mag = abs(c)
            body = ("" if mag == 1 and e else str(mag)) + ("x" if e else "") + (f"^{e}" if e > 1 else "")
            parts.append(("-" if c < 0 else "+") + body)
        s = "".join(parts) or "0"
        return s[1:] if s.startswith("+") else s


def characteristic_polynomial(L: LatticeL) -> CharPoly:
    coeffs: dict[int, int] = {}
    for V, mu in zip(L.elements, L.mobius):
        e = L.N - V.dim
        coeffs[e] = coeffs.get(e, 0) + mu
    return CharPoly(L.N, {e: c for e, c in coeffs.items() if c})


def critical_exponent(L: LatticeL, q: int) -> int:
    chi = characteristic_polynomial(L)
    for s in range(L.N + 1):
        if chi(q**s) != 0:
            return s
    raise VerificationError("characteristic polynomial vanishes at every q^s, s <= N")


def lattice_of(A: PartialSpread, h: int) -> LatticeL:
    return build_lattice(atoms_of(A, h), A.field, A.N)


@dataclass
class CrapoRotaReport:
    lhs: int
    rhs: int
    chi: CharPoly
    critical_exponent: int
    lattice_size: int

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs

    def to_dict(self) -> dict:
        return {"max_scattered_dim": self.lhs, "N_minus_critical_exponent": self.rhs,
                "holds": self.holds, "chi": self.chi.descending(), "chi_str": str(self.chi),
                "critical_exponent": self.critical_exponent, "lattice_size": self.lattice_size}


def verify_crapo_rota(A: PartialSpread, h: int, raise_on_failure: bool = True) -> CrapoRotaReport:
    """Max dimension of an (A,h)-scattered subspace against N - critical exponent.

    The exhaustive search starts at N so it does not lean on any bound.
    """
    L = lattice_of(A, h)
    chi = characteristic_polynomial(L)
    s = critical_exponent(L, A.field.order)
    lhs = max_scattered_dimension(A, h, "exhaustive", start=A.N).k_max
    rep = CrapoRotaReport(lhs, A.N - s, chi, s, len(L))
    if raise_on_failure and not rep.holds:
        raise VerificationError(f"Crapo-Rota equality failed: {lhs} != {A.N - s}")
    return rep
