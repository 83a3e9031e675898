"""Spin-1 operator algebra and the two chain Hamiltonians as bond operators.

The single-site basis ordering is |m=+1>, |m=0>, |m=-1>.  That ordering is
also the incoherent reference basis for every coherence measure: products of
S^z eigenstates.  A Hamiltonian is represented purely by its nearest-neighbor
9x9 bond operator; chain assembly is the business of the DMRG engine and the
exact-diagonalization oracle.

For those engines the bond is also provided in factorized form,
``h = sum_j c_j left_j (x) right_j``, where every factor is a real matrix
that shifts the local S^z quantum number by a fixed amount.  This keeps all
chain arithmetic real and lets blocks be organized by magnetization sector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import tensor_product

SQRT2 = np.sqrt(2.0)

# Real ladder representation; S^x = (S^+ + S^-)/2, S^y = (S^+ - S^-)/2i.
SPLUS = np.array([[0.0, SQRT2, 0.0],
                  [0.0, 0.0, SQRT2],
                  [0.0, 0.0, 0.0]])
SMINUS = SPLUS.T.copy()
SZ = np.diag([1.0, 0.0, -1.0])
IDENTITY3 = np.eye(3)

# S^z quantum number of each basis state and the global spin-flip m -> -m.
SITE_SZ = np.array([1, 0, -1], dtype=np.int64)
SITE_FLIP = np.array([[0.0, 0.0, 1.0],
                      [0.0, 1.0, 0.0],
                      [1.0, 0.0, 0.0]])


@dataclass(frozen=True)
class Spin1Algebra:
    """The canonical spin-1 matrices."""
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    identity: np.ndarray

    @property
    def splus(self) -> np.ndarray:
        return self.sx + 1j * self.sy

    @property
    def sminus(self) -> np.ndarray:
        return self.sx - 1j * self.sy


def spin1_operators() -> Spin1Algebra:
    """Spin-1 matrices in the |+1>, |0>, |-1> basis."""
    sx = 0.5 * (SPLUS + SMINUS).astype(complex)
    sy = (SPLUS - SMINUS) / 2j
    return Spin1Algebra(sx=sx, sy=sy, sz=SZ.astype(complex),
                        identity=IDENTITY3.astype(complex))


@dataclass(frozen=True)
class ModelSpec:
    """Which Hamiltonian to build.

    ``kind`` is ``"xxz"`` (anisotropy ``delta``) or ``"blbq"`` (coupling
    angle ``theta`` in radians, in [0, 2*pi)).  Exactly the parameter that
    belongs to the kind is meaningful.
    """
    kind: str
    delta: float = 1.0
    theta: float = 0.0

    def __post_init__(self):
        if self.kind not in ("xxz", "blbq"):
            raise ValueError(f"unknown model kind {self.kind!r}")

    @property
    def parameter(self) -> float:
        """The active sweep parameter: delta, or theta in units of pi."""
        return self.delta if self.kind == "xxz" else self.theta / np.pi

    def label(self) -> str:
        if self.kind == "xxz":
            return f"xxz:delta={self.delta:g}"
        return f"blbq:theta={self.theta / np.pi:g}"


def parse_model_spec(text: str) -> ModelSpec:
    """Parse ``xxz:delta=<float>`` or ``blbq:theta=<float in units of pi>``."""
    try:
        kind, assignment = text.split(":", 1)
        name, value = assignment.split("=", 1)
        value = float(value)
    except ValueError as exc:
        raise ValueError(f"cannot parse model spec {text!r}") from exc
    kind = kind.strip().lower()
    name = name.strip().lower()
    if kind == "xxz" and name == "delta":
        return ModelSpec(kind="xxz", delta=value)
    if kind == "blbq" and name == "theta":
        return ModelSpec(kind="blbq", theta=value * np.pi)
    raise ValueError(f"cannot parse model spec {text!r}")


def _heisenberg_bond() -> np.ndarray:
    ops = spin1_operators()
    return sum(tensor_product(s, s) for s in (ops.sx, ops.sy, ops.sz))


def bond_operator(spec: ModelSpec) -> np.ndarray:
    """The 9x9 nearest-neighbor bond operator of the model, Hermitian."""
    ss = _heisenberg_bond()
    if spec.kind == "xxz":
        ops = spin1_operators()
        h = (tensor_product(ops.sx, ops.sx)
             + tensor_product(ops.sy, ops.sy)
             + spec.delta * tensor_product(ops.sz, ops.sz))
    else:
        h = np.cos(spec.theta) * ss + np.sin(spec.theta) * (ss @ ss)
    return 0.5 * (h + h.conj().T)


# --- factorized real form used by the chain engines ----------------------

_LADDER = {"sp": SPLUS, "sm": SMINUS, "sz": SZ}
_LADDER_DSZ = {"sp": 1, "sm": -1, "sz": 0}

# S.S = (1/2) S+ S- + (1/2) S- S+ + Sz Sz, term by term homogeneous in the
# magnetization change of each factor.
_HEIS_TERMS = [(0.5, "sp", "sm"), (0.5, "sm", "sp"), (1.0, "sz", "sz")]


@dataclass(frozen=True)
class BondTerm:
    """One product term ``coeff * left (x) right`` of a bond operator."""
    coeff: float
    left: str
    right: str


def site_operator(name: str) -> np.ndarray:
    """Real single-site matrix for a term-factor name like ``sp`` or ``sp.sz``."""
    parts = name.split(".")
    op = _LADDER[parts[0]].copy()
    for p in parts[1:]:
        op = op @ _LADDER[p]
    return op


def site_operator_dsz(name: str) -> int:
    """By how much the factor raises the local S^z quantum number."""
    return sum(_LADDER_DSZ[p] for p in name.split("."))


def bond_terms(spec: ModelSpec) -> list[BondTerm]:
    """The bond operator as a sum of single-site factor products.

    The term list is symmetric under swapping left and right factors, which
    is what allows a mirrored environment block to reuse the operators of
    the grown system block.
    """
    if spec.kind == "xxz":
        return [BondTerm(0.5, "sp", "sm"),
                BondTerm(0.5, "sm", "sp"),
                BondTerm(spec.delta, "sz", "sz")]
    terms = [BondTerm(np.cos(spec.theta) * c, a, b) for c, a, b in _HEIS_TERMS]
    for c1, a1, b1 in _HEIS_TERMS:
        for c2, a2, b2 in _HEIS_TERMS:
            terms.append(BondTerm(np.sin(spec.theta) * c1 * c2,
                                  f"{a1}.{a2}", f"{b1}.{b2}"))
    return terms


def bond_operator_from_terms(spec: ModelSpec) -> np.ndarray:
    """Rebuild the 9x9 bond from its factorized form (real matrix)."""
    h = np.zeros((9, 9))
    for term in bond_terms(spec):
        h += term.coeff * np.kron(site_operator(term.left),
                                  site_operator(term.right))
    return h
