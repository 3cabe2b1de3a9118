"""Diagnostic states for scrambling and the catalogue of example dynamics."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ConfigurationError, DimensionError, DomainError, RegistryError
from .measures import tripartite_info
from .tensor import (DensityMatrix, Isometry, Ket, SubsystemLayout, apply_isometry, as_labels,
                     maximally_entangled_state, partial_trace, permute, tensor_product)

__all__ = [
    "ExampleDynamics",
    "double_arm_purification",
    "double_arm_state",
    "double_arm_i3",
    "single_arm_state",
    "single_arm_i3",
    "effective_isometry",
    "perfect_tensor_unitary",
    "example_registry",
    "get_example",
    "REGISTRY_NAMES",
]

OMEGA = np.exp(2j * np.pi / 3)


@dataclass(frozen=True, eq=False)
class ExampleDynamics:
    name: str
    generator: Isometry
    role_labels: Mapping[str, str]
    description: str = ""
    definition: str = ""
    default_pairs: tuple[tuple[str, str], ...] = field(default=())

    def __post_init__(self):
        missing = set(self.generator.output_layout.labels) - set(self.role_labels)
        if missing:
            raise RegistryError(f"{self.name}: no role for output labels {sorted(missing)}")

    @property
    def output_labels(self) -> tuple[str, ...]:
        return self.generator.output_layout.labels


def _check_two_by_two(u: Isometry) -> Isometry:
    if not u.is_unitary:
        raise DomainError(f"double-arm construction needs a unitary, got {u.input_layout.dim}→{u.output_layout.dim}")
    if len(u.input_layout) != 2 or len(u.output_layout) != 2:
        raise DimensionError("double-arm construction needs a unitary on exactly two input and two output subsystems")
    return u.relabel(("A", "B"), ("C", "D"))


def double_arm_purification(u: Isometry) -> Ket:
    """(U ⊗ I_RM)(|Ψ+⟩_AR ⊗ |Ψ+⟩_BM) as a pure state on R, C, D, M."""
    u = _check_two_by_two(u)
    da, db = u.input_layout.dims
    psi = tensor_product(maximally_entangled_state(da, ("R", "A")), maximally_entangled_state(db, ("M", "B")))
    psi = permute(psi, ("R", "A", "B", "M"))
    return apply_isometry(u, psi)


def double_arm_state(u: Isometry) -> DensityMatrix:
    """The Choi-like state on R, C, D obtained by discarding the reference M."""
    return partial_trace(double_arm_purification(u), ("R", "C", "D"))


def double_arm_i3(u: Isometry) -> float:
    return tripartite_info(double_arm_state(u), "R", "C", "D")


def effective_isometry(u: Isometry, fixed_b: Ket) -> Isometry:
    """Isometry A → outputs obtained by feeding ``fixed_b`` into the other inputs of ``u``."""
    b_labels = fixed_b.layout.labels
    for l in b_labels:
        u.input_layout.index(l)
    a_labels = u.input_layout.complement(b_labels)
    if not a_labels:
        raise ConfigurationError("the fixed input covers every input subsystem of the unitary")
    a_layout = u.input_layout.restrict(a_labels)
    cols = []
    for i in range(a_layout.dim):
        e = np.zeros(a_layout.dim)
        e[i] = 1.0
        full = permute(tensor_product(Ket(e, a_layout), fixed_b), u.input_layout.labels)
        cols.append(apply_isometry(u, full).amplitudes)
    return Isometry(np.column_stack(cols), a_layout, u.output_layout)


def single_arm_state(v: Isometry, fixed_b: Ket | None = None) -> Ket:
    """(V ⊗ I_R)|Ψ+⟩_AR on R followed by the output subsystems of ``v``.

    ``v`` is either an isometry on a single input subsystem, or a unitary on
    several inputs together with the fixed state ``fixed_b`` of all but one.
    """
    if fixed_b is not None:
        if len(v.input_layout) < 2:
            raise ConfigurationError("fixed_b given, but the generator has a single input subsystem")
        v = effective_isometry(v, fixed_b)
    elif len(v.input_layout) != 1:
        raise ConfigurationError(
            f"generator acts on {v.input_layout.labels}; supply fixed_b for all but one input")
    (a_label, d), = v.input_layout.subsystems
    if "R" in v.output_layout:
        raise ConfigurationError("output label 'R' is reserved for the reference")
    psi = maximally_entangled_state(d, ("R", a_label))
    return apply_isometry(v, psi)


def single_arm_i3(v: Isometry, c, d, fixed_b: Ket | None = None) -> float:
    """I3(R:C:D) of the single-arm state with the remaining outputs (E) traced out."""
    psi = single_arm_state(v, fixed_b)
    c, d = as_labels(c), as_labels(d)
    return tripartite_info(partial_trace(psi, ("R",) + c + d), "R", c, d)


def perfect_tensor_unitary(d: int) -> Isometry:
    """U|i⟩|j⟩ = |i+j mod d⟩|i−j mod d⟩ on A, B → C, D, for odd d ≥ 3."""
    if d < 3 or d % 2 == 0:
        raise DomainError(f"perfect-tensor unitary is defined here for odd d >= 3, got {d}")
    m = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            m[((i + j) % d) * d + (i - j) % d, i * d + j] = 1.0
    return Isometry(m, SubsystemLayout.of(("A", d), ("B", d)), SubsystemLayout.of(("C", d), ("D", d)))


_QUBIT_IN = SubsystemLayout.of(("A", 2))
_THREE_OUT = SubsystemLayout.uniform(("1", "2", "3"))
_ROLES3 = {"1": "C", "2": "D", "3": "E"}
_PAIRS3 = (("1", "2"), ("1", "3"), ("2", "3"))


def _three_qubit(columns: list[dict[str, complex]]) -> Isometry:
    cols = []
    for amplitudes in columns:
        v = np.zeros(8, dtype=complex)
        for bits, amp in amplitudes.items():
            v[int(bits, 2)] += amp
        cols.append(v)
    return Isometry(np.column_stack(cols), _QUBIT_IN, _THREE_OUT)


def _van() -> Isometry:
    s = 1 / np.sqrt(2)
    return _three_qubit([{"000": s, "110": s}, {"010": s, "100": s}])


def _pos() -> Isometry:
    s = 1 / np.sqrt(2)
    return _three_qubit([{"000": s, "111": s}, {"000": s, "111": -s}])


def _neg() -> Isometry:
    s = 1 / np.sqrt(2)
    return _three_qubit([{"000": s, "111": s}, {"001": s, "110": s}])


def _w3() -> Isometry:
    s = 1 / np.sqrt(3)
    return _three_qubit([{"100": s, "010": s, "001": s},
                         {"100": s, "010": s * OMEGA, "001": s * OMEGA ** 2}])


_FIXED = {
    "van": (_van, "I3 = 0 toy isometry",
            "V|0> = (|00>+|11>)/√2 ⊗ |0>,  V|1> = (|01>+|10>)/√2 ⊗ |0>"),
    "pos": (_pos, "I3 = +1 toy isometry (GHZ-type outputs)",
            "V|0> = (|000>+|111>)/√2,  V|1> = (|000>-|111>)/√2"),
    "neg": (_neg, "I3 = -1 toy isometry",
            "V|0> = (|000>+|111>)/√2,  V|1> = (|001>+|110>)/√2"),
    "W3": (_w3, "W-state isometry with cube-root-of-unity phases",
           "V|0> = (|100>+|010>+|001>)/√3,  V|1> = (|100>+ω|010>+ω²|001>)/√3,  ω = e^{2πi/3}"),
}

REGISTRY_NAMES = tuple(_FIXED) + ("perfect-tensor-d",)
_PT = re.compile(r"^perfect-tensor-(\d+)$")


def get_example(name: str) -> ExampleDynamics:
    """Look up a registry entry; ``perfect-tensor-<d>`` accepts any odd d ≥ 3."""
    if name in _FIXED:
        build, desc, definition = _FIXED[name]
        return ExampleDynamics(name, build(), dict(_ROLES3), desc, definition, _PAIRS3)
    m = _PT.match(name)
    if m:
        d = int(m.group(1))
        try:
            u = perfect_tensor_unitary(d)
        except DomainError as exc:
            raise RegistryError(f"{name}: {exc}") from None
        return ExampleDynamics(name, u, {"C": "C", "D": "D"},
                               f"perfect-tensor unitary on two qudits, d = {d}",
                               "U|i>|j> = |i+j mod d>|i-j mod d>", (("C", "D"),))
    raise RegistryError(f"unknown dynamics {name!r}; known: {', '.join(REGISTRY_NAMES)}")


def example_registry() -> list[ExampleDynamics]:
    """Every fixed example plus the smallest perfect-tensor instance (d = 3)."""
    return [get_example(n) for n in _FIXED] + [get_example("perfect-tensor-3")]
