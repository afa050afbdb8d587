"""
Jordan-Wigner mapping between fermionic operators and Pauli sums.

Mode q is qubit q, and a qubit in |1> is an occupied spin-orbital:

    a_q  = Z_0 ... Z_{q-1} (X_q + i Y_q) / 2
    a+_q = Z_0 ... Z_{q-1} (X_q - i Y_q) / 2
    n_q  = (I - Z_q) / 2
"""

from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union
from collections import defaultdict
import logging

from algorithms.fermion import EffectiveHamiltonian, FermionTermSum, TermKey
from algorithms.pauli import PRUNE_TOL, PauliString, PauliSum
from data.hamiltonian import MolecularHamiltonian

logger = logging.getLogger(__name__)

PauliDict = Dict[PauliString, complex]


@lru_cache(maxsize=None)
def _ladder(n_qubits: int, mode: int, create: bool) -> Tuple[Tuple[PauliString, complex], ...]:
    below = (1 << mode) - 1
    bit = 1 << mode
    y_coefficient = -0.5j if create else 0.5j
    return (
        (PauliString(n_qubits, bit, below), 0.5),
        (PauliString(n_qubits, bit, below | bit), y_coefficient),
    )


def _multiply(left: PauliDict, right: PauliDict) -> PauliDict:
    product: PauliDict = defaultdict(complex)
    for p1, c1 in left.items():
        for p2, c2 in right.items():
            phase, p3 = p1.multiply(p2)
            product[p3] += phase * c1 * c2
    return product


def ladder_product(n_qubits: int, operators: List[Tuple[int, bool]]) -> PauliDict:
    """
    Pauli image of an ordered product of ladder operators.

    Args:
        n_qubits: Number of modes
        operators: (mode, is_creation) pairs, leftmost first

    Returns:
        Map from PauliString to coefficient
    """
    image: PauliDict = {PauliString.identity(n_qubits): 1.0}
    for mode, create in operators:
        image = _multiply(image, dict(_ladder(n_qubits, mode, create)))
    return image


def fermion_terms_to_pauli(terms: FermionTermSum, tol: float = PRUNE_TOL) -> PauliSum:
    """Pauli image of a normal-ordered fermionic sum."""
    n = terms.n_modes
    creation_cache: Dict[Tuple[int, ...], PauliDict] = {}
    annihilation_cache: Dict[Tuple[int, ...], PauliDict] = {}
    accumulated: PauliDict = defaultdict(complex)

    for (creations, annihilations), coefficient in terms.items():
        if creations not in creation_cache:
            creation_cache[creations] = ladder_product(n, [(m, True) for m in creations])
        if annihilations not in annihilation_cache:
            annihilation_cache[annihilations] = ladder_product(n, [(m, False) for m in annihilations])
        for pauli, value in _multiply(creation_cache[creations], annihilation_cache[annihilations]).items():
            accumulated[pauli] += coefficient * value
    return PauliSum(n, accumulated, tol=tol)


def jw_map(
    hamiltonian: Union[MolecularHamiltonian, EffectiveHamiltonian],
    tol: float = PRUNE_TOL,
) -> PauliSum:
    """
    Jordan-Wigner image of a second-quantized Hamiltonian.

    Args:
        hamiltonian: Molecular or spin-orbital effective Hamiltonian
        tol: Coefficient pruning threshold

    Returns:
        Hermitian PauliSum over 2 * n_orbitals qubits (qubit 2p + sigma)
    """
    if isinstance(hamiltonian, MolecularHamiltonian):
        hamiltonian = EffectiveHamiltonian.from_molecular(hamiltonian)
    pauli_sum = fermion_terms_to_pauli(hamiltonian.to_fermion_terms(tol=tol), tol=tol)
    if not pauli_sum.is_hermitian(tol=1e-10):
        logger.warning(
            f"Jordan-Wigner image has imaginary coefficients up to {pauli_sum.max_imaginary():.3e}"
        )
    logger.debug(f"jw_map: {pauli_sum.n_qubits} qubits, {len(pauli_sum)} Pauli terms")
    return pauli_sum


# Majorana letter bookkeeping for reverse_jw. With m the parity of X/Y
# Majorana letters on higher qubits, the target letter T on a qubit equals
# phase * L Z^m for the Majorana letter L: (T, m) -> (L, phase).
_ODD_PARITY_LETTER = {
    "X": ("Y", -1j),
    "Y": ("X", 1j),
    "Z": ("I", 1.0),
    "I": ("Z", 1.0),
}

# gamma = a + a+ (X), gamma~ = i(a+ - a) (Y), Z = 1 - 2n: (creations, annihilations, coefficient)
_MAJORANA_EXPANSION = {
    "X": (((), (0,), 1.0), ((0,), (), 1.0)),
    "Y": (((0,), (), 1j), ((), (0,), -1j)),
    "Z": (((), (), 1.0), ((0,), (0,), -2.0)),
}


def _majorana_letters(pauli: PauliString) -> Tuple[List[Tuple[int, str]], complex]:
    """
    Write ``pauli`` as phase * prod_q g(L_q) in increasing q, where g maps
    X, Y, Z to gamma_q, gamma~_q and Z_q.

    Returns:
        ([(qubit, L) for non-identity L], phase)
    """
    letters = []
    phase = 1.0 + 0.0j
    odd = False
    for qubit in reversed(range(pauli.n_qubits)):
        target = pauli.letter(qubit)
        if odd:
            letter, factor = _ODD_PARITY_LETTER[target]
            phase *= factor
        else:
            letter = target
        if letter in ("X", "Y"):
            odd = not odd
        if letter != "I":
            letters.append((qubit, letter))
    letters.reverse()
    return letters, phase


def _normal_order(sequence: List[Tuple[int, bool]]) -> Tuple[TermKey, int]:
    """
    Stable partition of distinct-mode ladder operators (a+_q a_q pairs allowed
    adjacent) into canonical order.

    Returns:
        (key, sign)
    """
    swaps = 0
    annihilations_seen = 0
    for _, create in sequence:
        if create:
            swaps += annihilations_seen
        else:
            annihilations_seen += 1
    creations = tuple(m for m, c in sequence if c)
    annihilations = tuple(m for m, c in sequence if not c)
    return (creations, annihilations), (-1 if swaps % 2 else 1)


def reverse_jw(
    pauli_sum: PauliSum,
    max_length: Optional[int] = None,
    tol: float = PRUNE_TOL,
) -> FermionTermSum:
    """
    Map a Pauli sum back to a normal-ordered fermionic sum.

    Each string is rewritten as a product of Majorana operators and Z = 1 - 2n
    factors, which expands into normal-ordered monomials without contractions.

    Args:
        pauli_sum: Operator over M qubits
        max_length: Skip monomials with more than this many ladder operators;
            None keeps the exact map
        tol: Coefficient pruning threshold

    Returns:
        FermionTermSum equal to ``pauli_sum`` (up to the length cut, whose
        omitted coefficient mass is reported as ``truncated_weight``)
    """
    n = pauli_sum.n_qubits
    accumulated: Dict[TermKey, complex] = defaultdict(complex)
    truncated = 0.0

    for pauli, coefficient in pauli_sum.items():
        letters, phase = _majorana_letters(pauli)
        scale = coefficient * phase
        total_mass = abs(scale)
        partials: List[Tuple[List[Tuple[int, bool]], complex]] = [([], scale)]
        cut = False
        for qubit, letter in letters:
            total_mass *= 3.0 if letter == "Z" else 2.0
            extended = []
            for sequence, value in partials:
                for creations, annihilations, factor in _MAJORANA_EXPANSION[letter]:
                    ops = sequence + [(qubit, True)] * len(creations) + [(qubit, False)] * len(annihilations)
                    if max_length is not None and len(ops) > max_length:
                        cut = True
                        continue
                    extended.append((ops, value * factor))
            partials = extended
        kept_mass = 0.0
        for sequence, value in partials:
            key, sign = _normal_order(sequence)
            accumulated[key] += sign * value
            kept_mass += abs(value)
        if cut:
            truncated += max(total_mass - kept_mass, 0.0)

    if truncated > 0.0:
        logger.debug(f"reverse_jw: truncated coefficient mass {truncated:.3e} (max_length={max_length})")
    return FermionTermSum(n, accumulated, truncated_weight=truncated, tol=tol)
