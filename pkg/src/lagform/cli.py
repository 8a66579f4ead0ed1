"""Command line front end.

Exit codes: 0 success, 1 domain error (tagged), 2 usage error.
"""

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from lagform import formfile
from lagform.moduli import SHIFT, f_invariant, sample_csv, sample_members, shift_check
from lagform.torus import experiment_csv, systole, systolic_experiment, torus_volume
from lagform.uspace import (
    MEMBER_THRESHOLD,
    DomainError,
    is_member,
    normal_form_u3,
    product,
    q_invariants,
    reduce,
    s_matrix,
    standard_coisotropic,
    vol_ratio,
)


@dataclass(frozen=True)
class CommandResult:
    code: int
    text: str
    csv_path: str | None = None
    tag: str | None = None


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}\n")

    def exit(self, status=0, message=None):
        raise _UsageError(message or "")


def _g(x):
    return f"{x + 0.0:.12g}"  # + 0.0 turns -0.0 into 0.0


def _c(z):
    z = complex(z)
    return f"{_g(z.real)}{'+' if z.imag >= 0 else '-'}{_g(abs(z.imag))}i"


def _matrix(M):
    return "\n".join("  [" + ", ".join(_g(v) for v in row) + "]" for row in np.asarray(M))


def _component(sign):
    return {1: "U^+", -1: "U^-"}.get(sign, "none")


def _cmd_check(args, ff):
    rep = is_member(ff.form, seed=args.seed, threshold=args.tol, geometricity=True)
    head = [rep.verdict]
    if rep.is_member:
        head += [_component(rep.sign), rep.geometricity]
    lines = [", ".join(head)]
    lines.append(f"verdict: {rep.verdict}")
    lines.append(f"component: {_component(rep.sign)}")
    lines.append(f"margin: {_g(rep.margin)}")
    lines.append(f"certificate: {rep.certificate}")
    lines.append(f"geometricity: {rep.geometricity}")
    for key in sorted(rep.residuals):
        val = rep.residuals[key]
        if isinstance(val, float):
            lines.append(f"{key}: {_g(val)}")
    return "\n".join(lines)


def _cmd_invariants(args, ff):
    form = ff.form
    n = form.n
    lines = [f"n: {n}", f"vol_ratio: {_g(vol_ratio(form))}", f"norm: {_g(form.norm())}"]
    if n == 1:
        a, b = form.vec
        det = a.real * b.imag - a.imag * b.real
        lines.append(f"orientation_det: {_g(det)}")
    elif n == 2:
        S = s_matrix(form)
        lines.append("S:")
        lines.append(_matrix(S.S))
        lines.append(f"S_min_eig: {_g(S.min_eig)}")
        if S.r is not None:
            lines.append(f"r: {_g(S.r)}")
            lines.append(f"|c|: {_g(S.c_abs)}")
    elif n == 3:
        for name, part in (("Re", form.real), ("Im", form.imag)):
            qi = q_invariants(part)
            lines.append(f"q_{name} min eig: {_g(np.linalg.eigvalsh(qi.q)[0])}")
            lines.append(f"d_{name}: {_g(qi.d)}")
    return "\n".join(lines)


def _cmd_normal_form(args, ff):
    form = ff.form
    if form.n == 2:
        S = s_matrix(form)
        if S.r is None:
            raise DomainError("non_member", "S is not positive definite")
        return f"form: r dz1^dz2 + c dzbar1^dzbar2\nr: {_g(S.r)}\n|c|: {_g(S.c_abs)}"
    if form.n != 3:
        raise DomainError("unsupported_dimension", "normal forms are available for n = 2, 3")
    nf = normal_form_u3(form)
    lines = [
        f"status: {nf.status}",
        f"c1: {_c(nf.c1)}",
        f"c2: {_c(nf.c2)}",
        "lambda: " + ", ".join(_g(x) for x in nf.lambdas),
        f"residual: {_g(nf.residual)}",
        "g:",
        _matrix(nf.g),
    ]
    return "\n".join(lines)


def _cmd_reduce(args, ff):
    W, nu = standard_coisotropic(ff.form.n, args.k)
    out = reduce(ff.form, W, nu)
    return formfile.dumps(out, label=f"reduction of {ff.label}".strip()).rstrip("\n")


def _cmd_product(args, ff):
    other = formfile.load(args.file2)
    out = product(ff.form, other.form)
    return formfile.dumps(out, label=f"{ff.label} x {other.label}".strip()).rstrip("\n")


def _cmd_systole(args, ff):
    torus = ff.torus()
    res = systole(ff.form, torus, seed=args.seed, radius_cap=args.height)
    cert = "certified" if res.certified else "uncertified"
    lines = [
        f"sys = {_g(res.sys)} ({cert}), witness {res.witness.label()}",
        f"lgr_min: {_g(res.m)}",
        f"radius: {_g(res.radius)}",
        f"classes: {res.classes}",
        f"support_ratio: {_g(res.support_ratio)}",
    ]
    return "\n".join(lines)


def _cmd_volume(args, ff):
    torus = ff.torus()
    ratio = vol_ratio(ff.form)
    vol = torus_volume(ff.form, torus)
    return f"vol_ratio: {_g(ratio)}\nvolume: {_g(vol)}\nsign: {int(np.sign(ratio))}"


def _cmd_shift(args, ff):
    d = shift_check(ff.form)
    return f"f: {_g(f_invariant(ff.form))}\ndelta_f: {d!r}\nerror: {abs(d - SHIFT):.3e}"


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _cmd_experiment(args):
    rows = systolic_experiment(args.n, args.samples, args.seed)
    text = experiment_csv(rows)
    _write(args.out, text)
    summary = []
    for kind in ("geometric", "ag"):
        vals = [r["ratio"] for r in rows if r["kind"] == kind and r["certified"]]
        if vals:
            summary.append(f"max ratio ({kind}): {_g(max(vals))}")
    summary.append(f"rows: {len(rows)}, certified: {sum(r['certified'] for r in rows)}")
    return "\n".join(summary)


def _cmd_sample(args):
    samples, rate = sample_members(args.count, args.seed, args.strategy)
    _write(args.out, sample_csv(samples))
    return f"samples: {len(samples)}\nacceptance: {_g(rate)}"


def _parser():
    p = _Parser(prog="lagform", description="Forms non-vanishing on Lagrangian subspaces.")
    p.add_argument("--tol", type=float, default=MEMBER_THRESHOLD, help="membership threshold (relative)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_file(name, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("file")
        return s

    s = with_file("check", "membership report")
    s.add_argument("--seed", type=int, default=0)
    with_file("invariants", "S matrix or q determinants")
    with_file("normal-form", "canonical parameters")
    s = with_file("reduce", "reduction along the standard coisotropic subspace")
    s.add_argument("--k", type=int, default=1)
    s = with_file("product", "product with a second form")
    s.add_argument("file2")
    s = with_file("systole", "certified systole on the torus")
    s.add_argument("--height", type=float, default=None, help="radius cap of the lattice search")
    s.add_argument("--seed", type=int, default=0)
    with_file("volume", "volume of the torus")
    with_file("shift-check", "f(T Omega) - f(Omega)")
    s = sub.add_parser("systolic-experiment", help="systole / volume table")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s = sub.add_parser("sample", help="sample unit-volume members in six dimensions")
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--strategy", choices=("geometric", "ag", "perturbed"), default="geometric")
    s.add_argument("--out", required=True)
    return p


_FILE_COMMANDS = {
    "check": _cmd_check,
    "invariants": _cmd_invariants,
    "normal-form": _cmd_normal_form,
    "reduce": _cmd_reduce,
    "product": _cmd_product,
    "systole": _cmd_systole,
    "volume": _cmd_volume,
    "shift-check": _cmd_shift,
}


def run_command(argv):
    try:
        args = _parser().parse_args(list(argv))
    except _UsageError as exc:
        return CommandResult(2, str(exc).rstrip("\n"), tag="usage")
    try:
        if args.command in _FILE_COMMANDS:
            ff = formfile.load(args.file)
            text = _FILE_COMMANDS[args.command](args, ff)
            return CommandResult(0, text)
        if args.command == "systolic-experiment":
            return CommandResult(0, _cmd_experiment(args), csv_path=args.out)
        return CommandResult(0, _cmd_sample(args), csv_path=args.out)
    except formfile.FormFileError as exc:
        return CommandResult(1, f"error[parse]: {exc}", tag="parse")
    except DomainError as exc:
        return CommandResult(1, f"error[{exc.tag}]: {exc}", tag=exc.tag)
    except OSError as exc:
        return CommandResult(1, f"error[io]: {exc}", tag="io")
    except (ValueError, RuntimeError) as exc:
        return CommandResult(1, f"error[domain]: {exc}", tag="domain")


def main(argv=None):
    res = run_command(sys.argv[1:] if argv is None else argv)
    stream = sys.stdout if res.code == 0 else sys.stderr
    if res.text:
        print(res.text, file=stream)
    return res.code


if __name__ == "__main__":
    sys.exit(main())
