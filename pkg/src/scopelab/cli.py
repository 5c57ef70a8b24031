"""Command-line interface: ``scope-lab <command> ...``.

Reports are CSV on standard output (or ``--out``), preceded by one
``# schema=1`` comment line. States are JSON files (see :mod:`scopelab.io`).

Exit codes: 0 success, 1 a verification residual exceeded its tolerance,
2 usage, parse or validation error.
"""

import argparse
import csv
import io as _stdio
import json
import math
import sys

import numpy as np

from . import io, measures
from . import numerics as nu
from .dynamics import (HamiltonianSpec, WavefunctionGrid, consistency_check, decoherence_matrix,
                       evolve, gaussian, history_lattice, odd_cat, wigner_grid)
from .errors import ScopeLabError
from .identities import (MAX_N, ghz_family, mixture_identity, random_coefficient_pairs,
                         verify_sum_identities)
from .states import (FAMILIES, DensityMatrix, EnsembleDecomposition, PureState,
                     ScopeDecomposition, bell_state, build_family, make_scope, wfes_density)

SCHEMA = "# schema=1"
VERIFY_TOL = 1e-8
MIXTURE_TOL = 1e-12


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_vector(text: str) -> np.ndarray:
    """``"0.6,0.8"`` or ``"0.5+0.5j,1"`` -> complex vector."""
    try:
        return np.array([complex(tok.strip().replace(" ", "")) for tok in text.split(",")])
    except ValueError:
        raise UsageError(f"cannot parse vector {text!r}") from None


def parse_vectors(text: str):
    """Semicolon-separated vectors: ``"1,0;0.6,0.8"``."""
    return [parse_vector(part) for part in text.split(";")]


def parse_floats(text: str):
    try:
        return [float(tok) for tok in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse numbers {text!r}") from None


def parse_pairing(text: str):
    if text in ("direct", "cross"):
        return text
    try:
        if "-" in text:
            return [tuple(int(x) for x in tok.split("-")) for tok in text.split(",")]
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse pairing {text!r}") from None


def parse_axis(text: str) -> np.ndarray:
    """Either a comma list or ``start:stop:count``."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range must be start:stop:count, got {text!r}")
        try:
            return np.linspace(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError:
            raise UsageError(f"cannot parse range {text!r}") from None
    return np.array(parse_floats(text))


def parse_matrix_json(text: str) -> np.ndarray:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"matrix is not valid JSON: {exc}") from None
    return io.decode_complex(data, 2)


def fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        return {True: "true", False: "false", None: ""}[x]
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


class Report:
    """Collects CSV rows and writes them with the schema line."""

    def __init__(self, command: str, header):
        self.command = command
        self.header = list(header)
        self.rows = []

    def add(self, *values):
        self.rows.append([fmt(v) for v in values])

    def render(self) -> str:
        buf = _stdio.StringIO()
        buf.write(f"{SCHEMA} command={self.command}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        writer.writerows(self.rows)
        return buf.getvalue()


def emit(text: str, out) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# gen


def _grid_args(args):
    return dict(x_min=args.x_min, x_max=args.x_max, dx=args.dx)


def generate(args):
    family = args.family.replace("-", "_")
    if family == "bell":
        return bell_state()
    if family == "gaussian":
        return WavefunctionGrid.from_function(
            lambda x: gaussian(x, args.center, args.momentum), **_grid_args(args))
    if family == "odd_cat":
        return WavefunctionGrid.from_function(lambda x: odd_cat(x, args.separation),
                                              **_grid_args(args))
    if family == "scope":
        if args.coeffs is None:
            raise UsageError("scope needs --coeffs")
        return make_scope(parse_vector(args.coeffs))[0]
    if family == "wfes":
        if args.gamma is None or args.members is None:
            raise UsageError("wfes needs --gamma and --members")
        return wfes_density(EnsembleDecomposition.from_gamma(parse_vector(args.gamma),
                                                             parse_vectors(args.members)))
    if family not in FAMILIES:
        raise UsageError(f"unknown family {args.family!r}")

    params = {}
    if args.a is not None:
        params["a"] = parse_vector(args.a)
    if args.b is not None:
        params["b"] = parse_vector(args.b)
    if args.pairing is not None:
        params["pairing"] = parse_pairing(args.pairing)
    if args.weights is not None:
        params["weights"] = parse_floats(args.weights)
    if args.lambdas is not None:
        params["lambdas"] = parse_vectors(args.lambdas)
    if args.dims is not None:
        params["dims"] = [int(x) for x in parse_floats(args.dims)]
    if args.index is not None:
        params["index"] = [int(x) for x in parse_floats(args.index)]
    for key in ("locals_a", "locals_b"):
        text = getattr(args, key)
        if text is not None:
            params[key] = parse_vectors(text)

    if family in ("separable", "ensemble_product"):
        if args.d != 1:
            raise UsageError("only d = 1 (one acted-out state per member) is supported")
        n = len(params.get("weights", ()))
        if n and "locals_a" not in params and "locals_b" not in params:
            # classical form: member xi is |xi>|xi>
            dim = max(n, 2)
            params["locals_a"] = [nu.ket(i, dim) for i in range(n)]
            params["locals_b"] = [nu.ket(i, dim) for i in range(n)]
    return build_family(family, **params)


def cmd_gen(args):
    obj = generate(args)
    text = io.dumps(obj) + "\n"
    emit(text, args.out)
    return 0


# ---------------------------------------------------------------------------
# analyze


def _pure_vector(rho: DensityMatrix):
    """Dominant eigenvector when the state is pure, else None."""
    if rho.purity < 1.0 - 1e-9:
        return None
    res = nu.eigh(rho.matrix)
    return res.eigenvectors[:, -1]


def _analyze_density(rho: DensityMatrix, rep: Report):
    rep.add("dims", "x".join(str(d) for d in rho.dims))
    rep.add("purity", rho.purity)
    rep.add("entropy_bits", measures.von_neumann_entropy(rho))
    vec = _pure_vector(rho)
    if len(rho.dims) == 2:
        rep.add("negativity", measures.negativity(rho))
        if vec is not None:
            lam = np.linalg.svd(vec.reshape(rho.dims), compute_uv=False)
            rep.add("entanglement_degree_schmidt", measures.degree_of_entanglement(lam))
        if rho.dims == (2, 2) and vec is not None:
            c = measures.concurrence(vec)
            rep.add("concurrence", c)
            rep.add("entanglement_of_formation", measures.entanglement_of_formation(c))
    if len(rho.dims) == 1 and vec is not None:
        rep.add("superposition_degree", measures.degree_of_superposition(vec))

    prof = measures.classify(rho)
    rep.add("family", prof.family if prof.family is not None else "unknown")
    if prof.family is not None:
        rep.add("flag_entanglement", prof.entanglement)
        rep.add("entanglement", prof.entanglement_value)
        rep.add("flag_decohered_classicality", prof.decohered_classicality)
        rep.add("flag_nonorthogonality", prof.nonorthogonality)
        rep.add("nonorthogonality", prof.nonorthogonality_value)
        rep.add("flag_coarse_grained_classicality", prof.coarse_grained_classicality)
        rep.add("coarse_grained_entropy_bits", prof.coarse_grained_entropy)


def analyze(obj) -> Report:
    rep = Report("analyze", ["quantity", "value"])
    if isinstance(obj, PureState):
        rep.add("kind", "pure")
        _analyze_density(obj.density(), rep)
    elif isinstance(obj, DensityMatrix):
        rep.add("kind", "density")
        _analyze_density(obj, rep)
    elif isinstance(obj, EnsembleDecomposition):
        rep.add("kind", "ensemble")
        rep.add("nonorthogonality", measures.nonorthogonality(obj))
        rep.add("coarse_grained_entropy_bits", measures.shannon_entropy(obj.weights))
        _analyze_density(DensityMatrix(obj.density(), obj.dims), rep)
    elif isinstance(obj, ScopeDecomposition):
        rep.add("kind", "scope")
        rep.add("shape", obj.shape)
        for mu, c in enumerate(obj.coeffs):
            rep.add(f"superposition_degree_party{mu}", measures.degree_of_superposition(c))
        if obj.branch_map is not None:
            amps = obj.branch_amplitudes()
            rep.add("entanglement", measures.degree_of_entanglement(amps / np.linalg.norm(amps)))
    elif isinstance(obj, WavefunctionGrid):
        rep.add("kind", "grid")
        rep.add("norm", float(np.sum(np.abs(obj.samples) ** 2) * obj.dx))
        rep.add("mean_x", float(np.sum(obj.x * np.abs(obj.samples) ** 2) * obj.dx))
    else:
        raise UsageError(f"analyze does not handle {type(obj).__name__}")
    return rep


def cmd_analyze(args):
    emit(analyze(io.read_state(args.state)).render(), args.out)
    return 0


# ---------------------------------------------------------------------------
# identities


def cmd_verify(args):
    if not 2 <= args.n <= MAX_N:
        raise UsageError(f"--n must lie in [2, {MAX_N}]")
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    rep = Report("verify", ["trial", "n", "sum_beta", "sum_alpha", "sum_alpha_over_E",
                            "residual_beta", "residual_alpha", "residual_alpha_over_E"])
    worst = 0.0
    for t, (a, b) in enumerate(random_coefficient_pairs(args.n, args.trials, args.seed)):
        r = verify_sum_identities(a, b)
        worst = max(worst, r.max_abs_residual)
        # sums at 12 significant digits; the residual columns carry full precision
        rep.add(t, args.n, *(float(f"{x:.12g}") for x in (r.sum_beta, r.sum_alpha,
                                                          r.sum_alpha_over_E)),
                r.sum_beta_residual, r.sum_alpha_residual, r.sum_alpha_over_E_residual)
    rep.add("max", args.n, "", "", "", "", "", worst)
    emit(rep.render(), args.out)
    return 0 if worst <= VERIFY_TOL else 1


def cmd_ghz(args):
    if args.coeffs is not None:
        parties = parse_vectors(args.coeffs)
    else:
        if args.m is None or args.m < 2:
            raise UsageError("give --coeffs or --m >= 2")
        parties = [np.full(2, math.sqrt(0.5))] * args.m
    reports, e_dagger = ghz_family(parties)
    product = math.prod(measures.degree_of_superposition(p) for p in parties)
    rep = Report("ghz", ["pattern", "c1", "c2", "entanglement"])
    for r in reports:
        rep.add("".join(str(s) for s in r.pattern), r.coeffs[0], r.coeffs[1], r.entanglement)
    rep.add("E_dagger", "", "", e_dagger)
    rep.add("product_of_superposition_degrees", "", "", product)
    emit(rep.render(), args.out)
    return 0 if abs(e_dagger - product) <= 1e-12 else 1


def cmd_mixture(args):
    p2 = 1.0 - args.p1 if args.p2 is None else args.p2
    lhs, rhs = mixture_identity(args.ed, args.ec, args.p1, p2)
    rep = Report("mixture-identity", ["lhs", "rhs", "residual"])
    rep.add(lhs, rhs, abs(lhs - rhs))
    emit(rep.render(), args.out)
    return 0 if abs(lhs - rhs) <= MIXTURE_TOL else 1


# ---------------------------------------------------------------------------
# dynamics


def cmd_histories(args):
    spec = io.read_state(args.spec)
    if not hasattr(spec, "steps"):
        raise UsageError("histories needs a document of kind 'histories'")
    d = decoherence_matrix(spec)
    lattice = history_lattice(spec)
    rep = Report("histories", ["alpha", "alpha_prime", "re", "im"])
    label = ["-".join(str(i) for i in h) for h in lattice]
    for i, a in enumerate(label):
        for j, b in enumerate(label):
            rep.add(a, b, d[i, j].real, d[i, j].imag)
    consistent, worst = consistency_check(spec)
    rep.add("consistent", consistent, "", "")
    rep.add("max_offdiag", worst, "", "")
    rep.add("diagonal_sum", float(np.trace(d).real), "", "")
    emit(rep.render(), args.out)
    return 0


def cmd_wigner(args):
    if args.state is not None:
        psi = io.read_state(args.state)
        if not isinstance(psi, WavefunctionGrid):
            raise UsageError("wigner needs a document of kind 'grid'")
    else:
        psi = WavefunctionGrid.from_function(gaussian)
    q, p = parse_axis(args.q), parse_axis(args.p)
    w = wigner_grid(psi, q, p)
    rep = Report("wigner", ["q", "p", "W"])
    for i, qi in enumerate(q):
        for j, pj in enumerate(p):
            rep.add(float(qi), float(pj), w[i, j])
    emit(rep.render(), args.out)
    return 0


def cmd_evolve(args):
    state = io.read_state(args.state)
    if args.hamiltonian_file is not None:
        with open(args.hamiltonian_file) as fh:
            h = parse_matrix_json(fh.read())
    elif args.hamiltonian is not None:
        h = parse_matrix_json(args.hamiltonian)
    else:
        raise UsageError("give --hamiltonian or --hamiltonian-file")
    if not isinstance(state, (PureState, DensityMatrix)):
        raise UsageError("evolve needs a pure or density document")
    out = evolve(state, HamiltonianSpec(h), args.t)
    emit(io.dumps(out) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scope-lab",
                                     description="Superposition and entanglement toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="construct a state and write it as JSON")
    g.add_argument("family", help="state family, or bell, scope, wfes, gaussian, odd-cat")
    g.add_argument("--a", help="party A amplitudes, e.g. 0.6,0.8")
    g.add_argument("--b", help="party B amplitudes")
    g.add_argument("--pairing", help="direct, cross, a permutation 1,0 or pairs 0-1,1-0")
    g.add_argument("--weights", help="ensemble weights")
    g.add_argument("--locals-a", dest="locals_a", help="members of A, e.g. 1,0;0.6,0.8")
    g.add_argument("--locals-b", dest="locals_b", help="members of B")
    g.add_argument("--lambdas", help="Schmidt vectors per member, e.g. 0.6,0.8;0.8,0.6")
    g.add_argument("--d", type=int, default=1, help="acted-out states per member (only 1)")
    g.add_argument("--dims", help="product_basis dimensions, e.g. 2,2")
    g.add_argument("--index", help="product_basis index, e.g. 0,1")
    g.add_argument("--coeffs", help="scope coefficients")
    g.add_argument("--gamma", help="WFES amplitudes")
    g.add_argument("--members", help="WFES member states")
    g.add_argument("--x-min", dest="x_min", type=float, default=-8.0)
    g.add_argument("--x-max", dest="x_max", type=float, default=8.0)
    g.add_argument("--dx", type=float, default=0.01)
    g.add_argument("--center", type=float, default=0.0)
    g.add_argument("--momentum", type=float, default=0.0)
    g.add_argument("--separation", type=float, default=3.0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("analyze", help="measure report for a state file")
    a.add_argument("state")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="check the permutation sum identities")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--trials", type=int, default=1)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    gh = sub.add_parser("ghz", help="GHZ-type family and its reduced entanglement")
    gh.add_argument("--m", type=int, help="number of equal-weight qubit parties")
    gh.add_argument("--coeffs", help="per-party amplitudes, e.g. 0.6,0.8;0.8,0.6")
    gh.add_argument("--out")
    gh.set_defaults(func=cmd_ghz)

    m = sub.add_parser("mixture-identity", help="both sides of the mixture identity")
    m.add_argument("--ed", type=float, required=True)
    m.add_argument("--ec", type=float, required=True)
    m.add_argument("--p1", type=float, required=True)
    m.add_argument("--p2", type=float)
    m.add_argument("--out")
    m.set_defaults(func=cmd_mixture)

    h = sub.add_parser("histories", help="decoherence functional of a history spec")
    h.add_argument("spec")
    h.add_argument("--out")
    h.set_defaults(func=cmd_histories)

    w = sub.add_parser("wigner", help="Wigner function of a grid wave function")
    w.add_argument("state", nargs="?", help="grid document (default: Gaussian ground state)")
    w.add_argument("--q", default="0", help="list or start:stop:count")
    w.add_argument("--p", default="0", help="list or start:stop:count")
    w.add_argument("--out")
    w.set_defaults(func=cmd_wigner)

    e = sub.add_parser("evolve", help="apply exp(-iHt) to a state file")
    e.add_argument("state")
    e.add_argument("--hamiltonian", help="JSON matrix of numbers or [re, im] pairs")
    e.add_argument("--hamiltonian-file", dest="hamiltonian_file")
    e.add_argument("--t", type=float, required=True)
    e.add_argument("--out")
    e.set_defaults(func=cmd_evolve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ScopeLabError, ValueError, IndexError) as exc:
        print(f"scope-lab {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
