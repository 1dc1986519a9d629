"""Shared exception types.

`DomainError` covers inputs outside the supported mathematical domain
(non-commuting pairs, irrational spectra, zero parameters, ...).
`ParseError` covers malformed input files.  `CrossCheckError` flags an
internal disagreement between two routes that must agree.
"""


class DomainError(ValueError):
    pass


class ParseError(ValueError):
    pass


class CrossCheckError(AssertionError):
    pass
