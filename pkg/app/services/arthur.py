"""
Normal forms pi(psi, l, eta) for psi = phi + (rho x S_{2x} x S_2)^t, the
highest rho|.|^x-derivative and socle on them, and duals of tempered
representations.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from app.core.exceptions import DatumValidationError, PreconditionError
from app.models.datum import (
    GroupType,
    LanglandsDatum,
    RhoLabel,
    Segment,
    Sign,
    TemperedData,
    parity_sign,
)
from app.models.halfint import HalfInt


@dataclass(frozen=True, slots=True)
class AParamForm:
    """soc((rho|.|^{-x})^s x pi(psi, l, eta)) with psi = phi + (rho x S_{2x} x S_2)^t.

    ``phi`` is the tempered part of psi. ``eta_a`` is eta on the S_{2x} x S_2
    block; it is +1 whenever l = 1.
    """

    group: GroupType
    rho: RhoLabel
    x: HalfInt
    t: int
    l: int
    phi: TemperedData
    s: int = 0
    eta_a: Sign = Sign.PLUS

    def __post_init__(self) -> None:
        if self.x <= 0:
            raise DatumValidationError([f"A-parameter form needs x > 0, got {self.x}"])
        if self.t < 0 or self.s < 0:
            raise DatumValidationError(["A-parameter form needs t, s >= 0"])
        if self.x == HalfInt(1) and self.s:
            raise DatumValidationError(["s must vanish at x = 1/2"])
        object.__setattr__(self, "l", self.l % 2)

    @property
    def d_plus(self) -> int:
        return self.x.twice + 1

    @property
    def d_minus(self) -> int:
        """2x - 1; zero at x = 1/2."""
        return self.x.twice - 1

    @property
    def m(self) -> int:
        return self.phi.multiplicity(self.rho, self.d_plus)

    @property
    def m_prime(self) -> int:
        """Multiplicity of rho x S_{2x-1}, formally 1 at x = 1/2."""
        if self.d_minus == 0:
            return 1
        return self.phi.multiplicity(self.rho, self.d_minus)

    @property
    def sign_minus(self) -> Sign:
        if self.d_minus == 0:
            return Sign.PLUS
        return self.phi.sign(self.rho, self.d_minus)

    @property
    def sign_plus(self) -> Sign:
        return self.phi.sign(self.rho, self.d_plus)


def normalized(a: AParamForm) -> AParamForm:
    """Re-derive ``l`` and ``eta_a`` from the packet-membership conditions."""
    if a.t == 0 or a.l == 1:
        return replace(a, l=1, eta_a=Sign.PLUS)
    if a.d_minus == 0:
        eta_a = Sign.MINUS
    elif a.phi.multiplicity(a.rho, a.d_minus):
        eta_a = a.sign_minus
    elif a.m:
        eta_a = parity_sign(a.t).times(a.sign_plus)
    else:
        eta_a = a.eta_a
    return replace(a, eta_a=eta_a)


def m_psi_effective(a: AParamForm) -> int:
    """Multiplicity of rho x S_{2x-1} in psi; the formal S_0 is absorbed on the l = 0 branch."""
    if a.d_minus == 0:
        return 0 if (a.l == 0 and a.t > 0) else 1
    return a.m_prime


def to_aparam(
    t: int, phi: TemperedData, x: HalfInt, rho: RhoLabel, group: GroupType, s: int = 0
) -> AParamForm:
    """Rewrite L((rho|.|^{-x})^s, D[x-1,-x]^t; pi(phi, eta)) as an A-parameter form."""
    probe = AParamForm(group, rho, x, t, 1, phi, s)
    m, m_prime = probe.m, probe.m_prime
    if m and m_prime and probe.sign_plus.times(probe.sign_minus) is parity_sign(t + 1):
        reduced = phi.remove(rho, probe.d_plus).remove(rho, probe.d_minus)
        eta_a = probe.sign_minus if probe.d_minus else Sign.MINUS
        return normalized(AParamForm(group, rho, x, t + 1, 0, reduced, s, eta_a))
    return normalized(probe)


def from_aparam(a: AParamForm) -> LanglandsDatum:
    segments = [Segment(a.rho, -a.x, -a.x)] * a.s
    ladder = Segment(a.rho, a.x - 1, -a.x)
    if a.t == 0 or a.l == 1:
        segments += [ladder] * a.t
        temp = a.phi
    else:
        segments += [ladder] * (a.t - 1)
        if a.d_minus == 0:
            temp = a.phi.add(a.rho, 2, 1, parity_sign(a.t))
        else:
            temp = a.phi.add(a.rho, a.d_minus, 1, a.eta_a)
            temp = temp.add(a.rho, a.d_plus, 1, parity_sign(a.t).times(a.eta_a))
    return LanglandsDatum(a.group, tuple(segments), temp)


def is_compatible(a: AParamForm) -> bool:
    """eta(S_{2x-1}) eta(S_{2x+1}) = (-1)^t whenever m m' != 0."""
    if not (a.m and a.m_prime):
        return True
    return a.sign_plus.times(a.sign_minus) is parity_sign(a.t)


def lowered(a: AParamForm, n: int) -> AParamForm:
    """psi - (rho x S_{2x+1})^n + (rho x S_{2x-1})^n with l + n."""
    if n == 0:
        return a
    sign = parity_sign(a.t).times(a.sign_plus)
    phi = a.phi.remove(a.rho, a.d_plus, n).add(a.rho, a.d_minus, n, sign)
    return normalized(replace(a, phi=phi, l=(a.l + n) % 2))


def der_special(a: AParamForm) -> tuple[int, AParamForm]:
    if not is_compatible(a):
        raise PreconditionError("der_special", "signs on S_{2x-1} and S_{2x+1} are incompatible")
    m, m_prime = a.m, a.m_prime
    k = m + max(a.s - m_prime, 0)
    if k == 0:
        return 0, a
    return k, normalized(replace(lowered(a, m), s=min(a.s, m_prime)))


def soc_special(a: AParamForm) -> AParamForm:
    if not is_compatible(a):
        raise PreconditionError("soc_special", "signs on S_{2x-1} and S_{2x+1} are incompatible")
    if a.s < a.m_prime:
        raised = parity_sign(a.t).times(a.sign_minus)
        phi = a.phi.remove(a.rho, a.d_minus).add(a.rho, a.d_plus, 1, raised)
        return normalized(replace(a, phi=phi, l=(a.l - 1) % 2))
    return replace(a, s=a.s + 1)


def packet_character(a: AParamForm) -> dict[str, Sign]:
    """The character of the component group attached to pi(psi, l, eta)."""
    character = {f"{b.rho.id}/S_{b.d}": b.sign for b in a.phi.signed}
    if a.t:
        if a.d_minus == 0:
            character[f"{a.rho.id}/S_1xS_2"] = a.eta_a if a.l == 0 else Sign.PLUS
        else:
            character[f"{a.rho.id}/S_{a.x.twice}xS_2"] = parity_sign(a.l - 1)
    return character


def check_star(temp: TemperedData) -> bool:
    """Every signed block with d >= 2 is simple and alternates in sign with S_{d-2}."""
    for block in temp.signed:
        if block.d < 2:
            continue
        if block.mult != 1:
            return False
        if block.d == 2:
            below = Sign.PLUS
        else:
            companion = temp.find(block.rho, block.d - 2)
            if companion is None:
                return False
            below = companion.sign
        if block.sign is below:
            return False
    return True


def dual_tempered(temp: TemperedData, group: GroupType) -> LanglandsDatum:
    if not check_star(temp):
        raise PreconditionError(
            "dual_tempered", "tempered part is not reduced at nonzero exponents"
        )
    segments = []
    result = temp
    rhos = {b.rho.id: b.rho for b in temp.signed}
    for rho_id in sorted(rhos):
        rho = rhos[rho_id]
        m1 = temp.multiplicity(rho, 1)
        if m1 == 0 or m1 % 2:
            continue
        result = result.flipped(rho)
        y_twice = max(b.d for b in temp.on(rho) if b.sign is not Sign.UNSET) - 1
        if y_twice > 0:
            segments.append(Segment(rho, HalfInt(0), HalfInt(-y_twice)))
            result = result.remove(rho, 1).remove(rho, y_twice + 1)
    return LanglandsDatum(group, tuple(segments), result)
