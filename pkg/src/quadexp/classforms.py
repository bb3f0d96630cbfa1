"""Class groups of quadratic orders via binary quadratic forms.

Definite class numbers come from the |b| <= a <= c reduced-form box;
indefinite ones from cycles of reduced forms under the reduction step.
For real orders the headline class number is the wide (module) count,
obtained by merging reduction cycles that are GL2(Z)-equivalent; the
proper (form class / narrow) count is carried alongside, since the two
differ exactly when every unit has norm +1.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from .errors import BoundExceeded, DomainError, NoMatchWithinBound
from .quadfield import OrderDescriptor, QuadraticIrrational, sl2_equivalent

DEFAULT_DISC_LIMIT = 10**8


@dataclass(frozen=True)
class BinaryQuadraticForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self) -> bool:
        return gcd(gcd(abs(self.a), abs(self.b)), abs(self.c)) == 1

    def is_reduced_definite(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if self.discriminant >= 0 or a <= 0:
            return False
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def is_reduced_indefinite(self) -> bool:
        # 0 < b < sqrt(disc) and sqrt(disc) - b < 2|a| < sqrt(disc) + b
        disc = self.discriminant
        if disc <= 0 or self.b <= 0 or self.b * self.b >= disc:
            return False
        aa = 2 * abs(self.a)
        if disc >= (aa + self.b) ** 2:
            return False
        return aa <= self.b or (aa - self.b) ** 2 < disc

    def rho(self) -> "BinaryQuadraticForm":
        """Reduction step for indefinite forms; permutes the reduced forms."""
        disc = self.discriminant
        if disc <= 0:
            raise DomainError("rho applies to indefinite forms")
        s = isqrt(disc)
        c = self.c
        two_c = 2 * abs(c)
        r = (-self.b) % two_c
        # shift r into (s - 2|c|, s]
        r += ((s - r) // two_c) * two_c
        return BinaryQuadraticForm(c, r, (r * r - disc) // (4 * c))

    def theta(self) -> QuadraticIrrational:
        """Larger root of a x^2 + b x + c (a > 0 required)."""
        if self.a <= 0:
            raise DomainError("theta needs a > 0")
        disc = self.discriminant
        if disc <= 0:
            raise DomainError("theta needs an indefinite form")
        return QuadraticIrrational(-self.b, 1, 2 * self.a, disc)

    def to_json(self):
        return [self.a, self.b, self.c]


def _definite_reduced_forms(disc: int) -> list[BinaryQuadraticForm]:
    """All primitive reduced forms of discriminant disc < 0."""
    forms = []
    b = disc & 1
    while b * b <= -disc // 3:
        m = (b * b - disc) // 4
        a = max(b, 1)
        while a * a <= m:
            if a != 0 and m % a == 0:
                c = m // a
                f = BinaryQuadraticForm(a, b, c)
                if f.is_primitive():
                    forms.append(f)
                    if 0 < b < a < c:
                        forms.append(BinaryQuadraticForm(a, -b, c))
            a += 1
        b += 2
    return sorted(forms, key=lambda f: (f.a, f.b, f.c))


def _indefinite_reduced_forms(disc: int) -> list[BinaryQuadraticForm]:
    """All primitive reduced forms of non-square discriminant disc > 0."""
    s = isqrt(disc)
    if s * s == disc:
        raise DomainError("square discriminant")
    forms = []
    b = 2 - (disc & 1)
    while b <= s:
        n = (disc - b * b) // 4
        a = 1
        while a * a <= n:
            if n % a == 0:
                for aa in (a, n // a):
                    if s - b < 2 * aa <= s + b:
                        for f in (BinaryQuadraticForm(aa, b, -(n // aa)),
                                  BinaryQuadraticForm(-aa, b, n // aa)):
                            if f.is_primitive():
                                forms.append(f)
                    if a == n // a:
                        break
            a += 1
        b += 2
    return sorted(set(forms), key=lambda f: (f.a, f.b, f.c))


def _indefinite_cycles(forms) -> list[list[BinaryQuadraticForm]]:
    remaining = set(forms)
    cycles = []
    for start in forms:
        if start not in remaining:
            continue
        cyc = []
        f = start
        while True:
            cyc.append(f)
            remaining.discard(f)
            f = f.rho()
            if f == start:
                break
            if f not in remaining and f in cyc:
                break
        cycles.append(cyc)
    return cycles


@dataclass
class ClassGroupSummary:
    order: OrderDescriptor
    h: int
    representatives: list[BinaryQuadraticForm]
    h_proper: int  # form-class (proper/narrow) count; equals h when definite

    def to_json(self) -> dict:
        return {"order": self.order.to_json(), "h": self.h,
                "h_proper": self.h_proper,
                "representatives": [f.to_json() for f in self.representatives]}


@dataclass
class PseudoLatticeRep:
    theta: QuadraticIrrational
    source_form: BinaryQuadraticForm

    def to_json(self) -> dict:
        return {"theta": self.theta.to_json(),
                "source_form": self.source_form.to_json()}


@dataclass
class ConductorMatch:
    given_side: str
    given_conductor: int
    matched_conductor: int
    h_common: int

    def to_json(self) -> dict:
        return {"given_side": self.given_side,
                "given_conductor": self.given_conductor,
                "matched_conductor": self.matched_conductor,
                "h_common": self.h_common}


def _principal_form(disc: int) -> BinaryQuadraticForm:
    b = disc & 1
    return BinaryQuadraticForm(1, b, (b * b - disc) // 4)


def reduced_form_count(disc: int) -> int:
    """Primitive reduced forms: the definite count is the class number,
    the indefinite count sums cycle lengths (not the class number)."""
    if disc % 4 not in (0, 1):
        raise DomainError("discriminant must be 0 or 1 mod 4")
    if disc < 0:
        return len(_definite_reduced_forms(disc))
    return len(_indefinite_reduced_forms(disc))


def class_group(order: OrderDescriptor,
                disc_limit: int = DEFAULT_DISC_LIMIT) -> ClassGroupSummary:
    """Class number and one reduced representative per class.

    Imaginary side: count of primitive reduced definite forms. Real side:
    h is the number of GL2-merged cycle classes (module classes); h_proper
    counts the cycles themselves.
    """
    disc = order.discriminant
    if abs(disc) > disc_limit:
        raise BoundExceeded(f"|disc|={abs(disc)} exceeds limit {disc_limit}")
    if order.field_kind == "imaginary":
        forms = _definite_reduced_forms(disc)
        return ClassGroupSummary(order, len(forms), forms, len(forms))
    cycles = _indefinite_cycles(_indefinite_reduced_forms(disc))
    merged = _merge_wide(cycles)
    principal_cycle = _cycle_of_principal(cycles, disc)
    ordered = _order_groups(merged, principal_cycle)
    reps = [_group_representative(grp, principal_cycle) for grp in ordered]
    return ClassGroupSummary(order, len(merged), reps, len(cycles))


def _has_cycle(group, cycle) -> bool:
    return any(c is cycle for c in group)


def _group_representative(group, principal_cycle) -> BinaryQuadraticForm:
    for cyc in group:
        if cyc is principal_cycle:
            return _cycle_representative(cyc)
    return _cycle_representative(group[0])


def _order_groups(merged, principal_cycle):
    def key(grp):
        f = _group_representative(grp, principal_cycle)
        return (not _has_cycle(grp, principal_cycle), f.a, f.b, f.c)

    return sorted(merged, key=key)


def _cycle_of_principal(cycles, disc):
    pf = _principal_form(disc)
    # the principal form may not be reduced; walk it into the reduced set
    f = pf
    for _ in range(4 * (isqrt(abs(disc)) + 2)):
        if f.is_reduced_indefinite():
            break
        f = f.rho()
    for cyc in cycles:
        if f in cyc:
            return cyc
    raise DomainError("principal cycle not found")


def _cycle_representative(cycle) -> BinaryQuadraticForm:
    pos = [f for f in cycle if f.a > 0]
    return sorted(pos, key=lambda f: (f.a, f.b, f.c))[0]


def _merge_wide(cycles) -> list[list[list[BinaryQuadraticForm]]]:
    """Group proper cycles into GL2(Z) (module) classes via theta tails."""
    thetas = [_cycle_representative(c).theta() for c in cycles]
    n = len(cycles)
    groups: list[list[int]] = []
    assigned = [False] * n
    for i in range(n):
        if assigned[i]:
            continue
        grp = [i]
        assigned[i] = True
        for j in range(i + 1, n):
            if not assigned[j] and sl2_equivalent(thetas[i], thetas[j]).gl2:
                grp.append(j)
                assigned[j] = True
        groups.append(grp)
    return [[cycles[i] for i in grp] for grp in groups]


def pseudo_lattice_reps(order: OrderDescriptor,
                        disc_limit: int = DEFAULT_DISC_LIMIT) -> list[PseudoLatticeRep]:
    """One theta per module class of the order, principal class first.

    Each theta is the larger root of a reduced indefinite representative
    with positive leading coefficient, so it lies in (0, 1); distinct
    representatives are pairwise GL2- (hence SL2-) inequivalent.
    """
    if order.field_kind != "real":
        raise DomainError("pseudo-lattices live on the real side")
    disc = order.discriminant
    if abs(disc) > disc_limit:
        raise BoundExceeded(f"|disc|={abs(disc)} exceeds limit {disc_limit}")
    cycles = _indefinite_cycles(_indefinite_reduced_forms(disc))
    merged = _merge_wide(cycles)
    principal_cycle = _cycle_of_principal(cycles, disc)
    reps = []
    for grp in _order_groups(merged, principal_cycle):
        form = _group_representative(grp, principal_cycle)
        theta = form.theta()
        assert theta > 0 and theta < 1
        reps.append(PseudoLatticeRep(theta, form))
    return reps


def match_conductor(given: OrderDescriptor, search_bound: int = 100,
                    disc_limit: int = DEFAULT_DISC_LIMIT) -> ConductorMatch:
    """Least conductor on the opposite side with the same class number."""
    h_given = class_group(given, disc_limit).h
    for f in range(1, search_bound + 1):
        other = given.opposite(f)
        if class_group(other, disc_limit).h == h_given:
            return ConductorMatch(given.field_kind, given.conductor, f, h_given)
    raise NoMatchWithinBound(
        f"no conductor <= {search_bound} matches h={h_given}", search_bound)
