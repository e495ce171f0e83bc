"""Line-oriented scenario files.

A scenario bundles a structure, a policy, and optional inputs for the
analyses.  Sections are bracket headers; entries are whitespace-separated
tokens; '#' starts a comment.  Customer classes are bare integers, server
classes carry an 's' prefix, weights are exact rationals ('1/3'; decimal
points are rejected), the empty word is '-'.

Sections::

    [classes]   customers N / servers N
    [E]         one 'c s' pair per line, or 'complete'
    [F]         same
    [policy]    kind fcfs|lcfs|rand|ml|ms; optional 'sigma c s...'
                and 'gamma s c...' rows pinning a preference profile
    [mu]        'c s p' weight lines
    [input]     'pair c s' lines (periodic sample), or 'iid runs R horizon H'
    [erasing]   target_c / target_s / couple_c / couple_s / strong yes|no
    [subadd]    piece1_c / piece1_s / piece2_c / piece2_s word lines
    [budgets]   'name value' integers (max_len, max_count, seed, window,
                max_backsteps, runs, horizon, max_single_len)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ScenarioError
from .model import MatchingStructure, build_structure
from .policy import Policy
from .state import BufferDetail, PreferenceProfile, Word, validate_profile
from .stability import ArrivalDistribution, build_distribution

KNOWN_SECTIONS = (
    "classes",
    "e",
    "f",
    "policy",
    "mu",
    "input",
    "erasing",
    "subadd",
    "budgets",
)


@dataclass
class Scenario:
    structure: MatchingStructure
    policy: Policy
    mu: ArrivalDistribution | None = None
    input_pairs: tuple[tuple[int, int], ...] | None = None
    iid: bool = False
    erasing_target: BufferDetail | None = None
    erasing_couple: tuple[Word, Word] | None = None
    erasing_strong: bool = False
    subadd_pieces: tuple | None = None
    budgets: dict = field(default_factory=dict)

    def budget(self, name: str, default: int) -> int:
        return int(self.budgets.get(name, default))


def _parse_customer(tok: str, line: int) -> int:
    if not tok.isdigit():
        raise ScenarioError(f"bad customer class {tok!r}", line)
    return int(tok)


def _parse_server(tok: str, line: int) -> int:
    if not (tok.startswith("s") and tok[1:].isdigit()):
        raise ScenarioError(f"bad server class {tok!r} (expected sN)", line)
    return int(tok[1:])


def _parse_weight(tok: str, line: int) -> Fraction:
    if "." in tok:
        raise ScenarioError(f"weight {tok!r} must be an exact rational", line)
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise ScenarioError(f"bad weight {tok!r}: {exc}", line)


def _parse_word(tokens, line: int, server: bool) -> Word:
    if tokens == ["-"]:
        return ()
    parse = _parse_server if server else _parse_customer
    return tuple(parse(tok, line) for tok in tokens)


def parse_scenario(text: str) -> Scenario:
    sections: dict[str, list[tuple[int, list[str]]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip().lower()
            if current not in KNOWN_SECTIONS:
                raise ScenarioError(f"unknown section [{current}]", lineno)
            sections.setdefault(current, [])
            continue
        if current is None:
            raise ScenarioError("entry before any section header", lineno)
        sections[current].append((lineno, stripped.split()))

    for required in ("classes", "e", "f", "policy"):
        if required not in sections:
            raise ScenarioError(f"missing [{required}] section")

    counts = {}
    for lineno, toks in sections["classes"]:
        if len(toks) != 2 or toks[0] not in ("customers", "servers"):
            raise ScenarioError("expected 'customers N' or 'servers N'", lineno)
        counts[toks[0]] = int(toks[1])
    if set(counts) != {"customers", "servers"}:
        raise ScenarioError("[classes] must define customers and servers")
    n_c, n_s = counts["customers"], counts["servers"]

    def parse_edges(name):
        entries = sections[name]
        if len(entries) == 1 and entries[0][1] == ["complete"]:
            return [(c, s) for c in range(1, n_c + 1) for s in range(1, n_s + 1)]
        edges = []
        for lineno, toks in entries:
            if len(toks) != 2:
                raise ScenarioError(f"expected 'c s' pair in [{name.upper()}]", lineno)
            edges.append((_parse_customer(toks[0], lineno), _parse_server(toks[1], lineno)))
        return edges

    structure = build_structure(
        n_c, n_s, parse_edges("e"), parse_edges("f"), require_connected=False
    )

    kind = None
    sigma_rows: dict[int, Word] = {}
    gamma_rows: dict[int, Word] = {}
    for lineno, toks in sections["policy"]:
        if toks[0] == "kind" and len(toks) == 2:
            kind = toks[1]
        elif toks[0] == "sigma" and len(toks) >= 3:
            sigma_rows[_parse_customer(toks[1], lineno)] = _parse_word(
                toks[2:], lineno, server=True
            )
        elif toks[0] == "gamma" and len(toks) >= 3:
            gamma_rows[_parse_server(toks[1], lineno)] = _parse_word(
                toks[2:], lineno, server=False
            )
        else:
            raise ScenarioError(f"bad policy entry {' '.join(toks)!r}", lineno)
    if kind is None:
        raise ScenarioError("[policy] must set 'kind'")
    profile = None
    if sigma_rows or gamma_rows:
        sig = tuple(
            sigma_rows.get(c, structure.S(c)) for c in structure.customers
        )
        gam = tuple(gamma_rows.get(s, structure.C(s)) for s in structure.servers)
        profile = validate_profile(structure, PreferenceProfile(sigma=sig, gamma=gam))
    try:
        policy = Policy(kind, profile=profile)
    except ValueError as exc:
        raise ScenarioError(str(exc))

    scenario = Scenario(structure=structure, policy=policy)

    if "mu" in sections:
        weights = {}
        for lineno, toks in sections["mu"]:
            if len(toks) != 3:
                raise ScenarioError("expected 'c s weight'", lineno)
            edge = (_parse_customer(toks[0], lineno), _parse_server(toks[1], lineno))
            weights[edge] = _parse_weight(toks[2], lineno)
        try:
            scenario.mu = build_distribution(structure, weights)
        except Exception as exc:
            raise ScenarioError(str(exc))

    if "input" in sections:
        pairs = []
        for lineno, toks in sections["input"]:
            if toks[0] == "pair" and len(toks) == 3:
                pairs.append(
                    (_parse_customer(toks[1], lineno), _parse_server(toks[2], lineno))
                )
            elif toks[0] == "iid":
                scenario.iid = True
                rest = toks[1:]
                while rest:
                    if len(rest) < 2:
                        raise ScenarioError("iid options come in pairs", lineno)
                    scenario.budgets[rest[0]] = int(rest[1])
                    rest = rest[2:]
            else:
                raise ScenarioError(f"bad input entry {' '.join(toks)!r}", lineno)
        if pairs:
            scenario.input_pairs = tuple(pairs)

    if "erasing" in sections:
        fields: dict[str, Word] = {}
        strong = False
        for lineno, toks in sections["erasing"]:
            key = toks[0]
            if key == "strong" and len(toks) == 2:
                strong = toks[1].lower() in ("yes", "true", "1")
            elif key in ("target_c", "couple_c"):
                fields[key] = _parse_word(toks[1:], lineno, server=False)
            elif key in ("target_s", "couple_s"):
                fields[key] = _parse_word(toks[1:], lineno, server=True)
            else:
                raise ScenarioError(f"bad erasing entry {key!r}", lineno)
        scenario.erasing_strong = strong
        if "target_c" in fields or "target_s" in fields:
            scenario.erasing_target = BufferDetail(
                w=fields.get("target_c", ()), z=fields.get("target_s", ())
            )
        if "couple_c" in fields or "couple_s" in fields:
            scenario.erasing_couple = (
                fields.get("couple_c", ()),
                fields.get("couple_s", ()),
            )

    if "subadd" in sections:
        words: dict[str, Word] = {}
        for lineno, toks in sections["subadd"]:
            key = toks[0]
            if key in ("piece1_c", "piece2_c"):
                words[key] = _parse_word(toks[1:], lineno, server=False)
            elif key in ("piece1_s", "piece2_s"):
                words[key] = _parse_word(toks[1:], lineno, server=True)
            else:
                raise ScenarioError(f"bad subadd entry {key!r}", lineno)
        if words:
            for key in ("piece1_c", "piece1_s", "piece2_c", "piece2_s"):
                if key not in words:
                    raise ScenarioError(f"[subadd] missing {key}")
            scenario.subadd_pieces = (
                (words["piece1_c"], words["piece1_s"]),
                (words["piece2_c"], words["piece2_s"]),
            )

    if "budgets" in sections:
        for lineno, toks in sections["budgets"]:
            if len(toks) != 2:
                raise ScenarioError("expected 'name value'", lineno)
            try:
                scenario.budgets[toks[0]] = int(toks[1])
            except ValueError:
                raise ScenarioError(f"budget {toks[0]!r} must be an integer", lineno)

    return scenario


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_scenario(handle.read())
