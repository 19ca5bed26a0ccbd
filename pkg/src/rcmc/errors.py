"""Exception taxonomy for the rcmc package."""


class RcmcError(Exception):
    """Base class for all rcmc errors."""


# --- rate constant matrix validation ---------------------------------------

class NegativeRate(RcmcError):
    """An off-diagonal rate constant is negative."""


class NonpositivePi(RcmcError):
    """A stationary-distribution entry is zero or negative."""


class AsymmetricPattern(RcmcError):
    """K_uv is stored but K_vu is not (or vice versa)."""


class DetailedBalanceViolation(RcmcError):
    """K_uv*pi_v != K_vu*pi_u beyond tolerance; carries the worst pair."""

    def __init__(self, u, v, residual, tol):
        self.u, self.v, self.residual, self.tol = u, v, residual, tol
        super().__init__(
            f"detailed balance violated at pair ({u}, {v}): "
            f"relative residual {residual:.3e} > {tol:.1e}"
        )


# --- dense linear algebra ---------------------------------------------------

class SingularPivot(RcmcError):
    """A pivot diagonal is <= 0 during Schur elimination."""


class SingularPrefix(RcmcError):
    """det of a principal minor is zero where a nonzero value is required."""


class NegativeDiagonal(RcmcError):
    """A Schur-complement diagonal went negative beyond roundoff (non-PSD input)."""


class OracleOutOfRange(RcmcError):
    """The dense matrix-exponential oracle was called outside its safe regime."""


# --- segment trees ----------------------------------------------------------

class NegativeLeaf(RcmcError):
    """Attempt to store a negative value in a nonnegative-sum segment tree."""


class IndexOutOfRange(RcmcError):
    """Segment-tree index outside [1, m]."""


class BankInvariantViolation(RcmcError):
    """Debug audit found a segment-tree bank column out of sync."""


# --- stable refresh ---------------------------------------------------------

class ZeroPivotColumn(RcmcError):
    """Factor pivot entry C_{s,l} is zero where a division is required."""


class PreconditionViolation(RcmcError):
    """Inputs violate the hypotheses of the subtraction error bound."""


# --- projection / harness ---------------------------------------------------

class IncompatibleFactor(RcmcError):
    """Cholesky factor pivot order disagrees with the greedy result."""


class DisconnectedNetwork(RcmcError):
    """The reaction network splits into several components; carries them."""

    def __init__(self, components):
        self.components = components
        super().__init__(
            f"network has {len(components)} connected components: "
            + "; ".join(",".join(str(v + 1) for v in comp) for comp in components)
        )


class InvalidSpec(RcmcError):
    """Invalid synthetic-instance generator parameters."""


class ParseError(RcmcError):
    """Malformed instance file; carries the offending line number."""

    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")
