""" Command-line interface: `whittaker <command> [flags]`.

Commands
--------
eval        values of I, K, J, H+, H-, j0, y0 at a list of points
spectrum    discrete points, continuous ray and trajectory of the presented spectrum
density     spectral density kernel on a (k, x, y) grid
phase       scattering multiplier g(k) and phase shift delta(k)
verify      one of the seeded verification suites

Output is JSON (complex numbers as [re, im]) or CSV (paired _re/_im
columns); the resolved run configuration is echoed first. Exit codes: 0
success, 1 verification failure, 2 some rows failed, 64 usage error, 65
domain error.
"""

import io
import os
import re
import sys
import csv
import json
import logging
import argparse

from dataclasses import asdict, dataclass
from itertools import product
from tempfile import TemporaryDirectory

import numpy as np

from .errors import DomainError, ExceptionalEnergy, WhittakerError
from .scattering_transform import GUARD_BAND, g_scattering, scattering_class
from .spectral import N_MAX, TOL_CLASSIFY, exceptional_energies, on_trajectory, spectral_density_kernel, spectrum_descriptor
from .verify import SEED, SUITES, jsonable, run_suite
from .whittaker_functions import WhittakerParams, eval_H, eval_I, eval_J, eval_K, zero_energy
from .util.test import *

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARTIAL = 2
EXIT_USAGE = 64
EXIT_DOMAIN = 65

EVALUATORS = {
    "I": eval_I,
    "K": eval_K,
    "J": eval_J,
    "H+": lambda p, z: eval_H(p, 1, z),
    "H-": lambda p, z: eval_H(p, -1, z),
    "j0": lambda p, z: zero_energy(p, "j", z),
    "y0": lambda p, z: zero_energy(p, "y", z),
}


class ArgumentParser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # values such as -0.75,-2.4 are arguments, not flags
        self._negative_number_matcher = re.compile(r"^-\.?\d")

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def complex_pair(text):
    """'re,im' or 're' to a complex number."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're,im' or 're', got '{text}'")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved command line; echoed into every output."""

    command: str
    beta: complex = 0j
    m: complex = 0.5 + 0j
    func: str = None
    z: tuple = ()
    phi: float = 0.0
    nmax: int = N_MAX
    t_max: float = 20.0
    t_count: int = 400
    k: tuple = ()
    x: tuple = ()
    y: tuple = ()
    suite: str = None
    seed: int = SEED
    processes: int = 1
    draws: int = None
    tol: float = None
    format: str = "json"
    out: str = None
    verbose: bool = False

    @classmethod
    def from_args(cls, args):
        known = {name for name in cls.__dataclass_fields__}
        values = {key: value for key, value in vars(args).items() if key in known and value is not None}
        for key in ("z", "k", "x", "y"):
            if key in values:
                values[key] = tuple(values[key])
        return cls(**values)

    @property
    def params(self):
        return WhittakerParams(self.beta, self.m)

    def header(self):
        return jsonable(asdict(self))


def build_parser():
    common = ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="Output path, stdout by default")
    common.add_argument("-v", "--verbose", action="store_true", help="DEBUG logging")

    operator = ArgumentParser(add_help=False)
    operator.add_argument("--beta", type=complex_pair, default=0j, help="Coupling as re,im")
    operator.add_argument("--m", type=complex_pair, default=0.5 + 0j, help="Index as re,im")

    parser = ArgumentParser(prog="whittaker", description="Whittaker operator toolkit")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    evaluate = commands.add_parser("eval", parents=[common, operator], help="Evaluate a Whittaker-type function")
    evaluate.add_argument("func", choices=sorted(EVALUATORS))
    evaluate.add_argument("--z", type=complex_pair, nargs="*", action="extend", default=[], help="Points as re,im")

    spectrum = commands.add_parser("spectrum", parents=[common, operator], help="Presented spectrum data")
    spectrum.add_argument("--phi", type=float, default=0.0, help="Presentation angle (rad)")
    spectrum.add_argument("--nmax", type=int, default=N_MAX)
    spectrum.add_argument("--tmax", dest="t_max", type=float, default=20.0, help="Trajectory samples on [-tmax, tmax]")
    spectrum.add_argument("--tcount", dest="t_count", type=int, default=400)
    spectrum.add_argument("--tol", type=float, help=f"Classification tolerance, {TOL_CLASSIFY} by default")

    for name, text in (("density", "Spectral density kernel"), ("phase", "Scattering phase shift")):
        table = commands.add_parser(name, parents=[common, operator], help=text)
        table.add_argument("--k", type=float, nargs="*", action="extend", default=[], help="Energies k > 0")
        table.add_argument("--tol", type=float, help=f"Guard band around exceptional energies, {GUARD_BAND} by default")
        if name == "density":
            table.add_argument("--x", type=float, nargs="*", action="extend", default=[])
            table.add_argument("--y", type=float, nargs="*", action="extend", default=[])

    verify = commands.add_parser("verify", parents=[common], help="Run a verification suite")
    verify.add_argument("suite", choices=sorted(SUITES))
    verify.add_argument("--seed", type=int, default=SEED)
    verify.add_argument("--processes", type=int, default=1)
    verify.add_argument("--draws", type=int, help="Number of random cases")
    return parser


# Commands return (body, rows key or None, exit code)


def cmd_eval(config):
    evaluator = EVALUATORS[config.func]
    rows, failed = [], 0
    for z in config.z:
        try:
            if config.func in ("j0", "y0") and z.imag != 0:
                raise DomainError("zero-energy solutions are evaluated on real x > 0")
            value = complex(evaluator(config.params, z.real if config.func in ("j0", "y0") else z))
            rows.append(dict(z=z, value=value, error=None))
        except WhittakerError as error:
            logger.warning("eval %s at z=%s failed: %s", config.func, z, error)
            rows.append(dict(z=z, value=None, error=error.code))
            failed += 1
    return dict(rows=rows), "rows", EXIT_PARTIAL if failed else EXIT_OK


def cmd_spectrum(config):
    tol = TOL_CLASSIFY if config.tol is None else config.tol
    t = np.linspace(-config.t_max, config.t_max, config.t_count)
    descriptor = spectrum_descriptor(config.params, config.phi, config.nmax, t_samples=t, tol=tol)

    points = [
        dict(N=record.N, **{"lambda": value}, kind=record.kind.value, distance=on_trajectory(config.params, value, config.phi))
        for record, value in zip(descriptor.discrete, descriptor.presented)
    ]
    body = dict(
        params=dict(beta=config.beta, m=config.m),
        rotation_phase=descriptor.rotation_phase,
        ray=dict(angle=descriptor.ray_angle),
        trajectory=list(descriptor.trajectory) if config.beta != 0 else [],
        points=points,
    )
    return body, "points", EXIT_OK


def _near_exceptional(k, exceptional, guard):
    return exceptional.size > 0 and np.min(np.abs(exceptional - k)) < guard * max(1.0, k)


def cmd_density(config):
    guard = GUARD_BAND if config.tol is None else config.tol
    exceptional = exceptional_energies(config.params)
    rows, failed = [], 0
    for k, x, y in product(config.k, config.x, config.y):
        row = dict(k=k, x=x, y=y, value=None, status="ok")
        try:
            if _near_exceptional(k, exceptional, guard):
                raise ExceptionalEnergy(f"k={k} is within the guard band of an exceptional energy")
            row["value"] = complex(spectral_density_kernel(config.params, k, x, y).value)
        except ExceptionalEnergy:
            logger.warning("density row k=%s skipped: exceptional energy", k)
            row["status"] = "skipped:exceptional"
        except WhittakerError as error:
            row["status"] = error.code
            failed += 1
        rows.append(row)
    return dict(rows=rows), "rows", EXIT_PARTIAL if failed else EXIT_OK


def cmd_phase(config):
    guard = GUARD_BAND if config.tol is None else config.tol
    exceptional = exceptional_energies(config.params)
    rows, failed = [], 0
    for k in config.k:
        row = dict(k=k, delta=None, modulus=None, status="ok")
        try:
            if _near_exceptional(k, exceptional, guard):
                raise ExceptionalEnergy(f"k={k} is within the guard band of an exceptional energy")
            value = g_scattering(config.params, k, guard=guard)
            row.update(delta=value.delta, modulus=value.modulus)
        except ExceptionalEnergy:
            logger.warning("phase row k=%s skipped: exceptional energy", k)
            row["status"] = "skipped:exceptional"
        except WhittakerError as error:
            row["status"] = error.code
            failed += 1
        rows.append(row)
    body = dict(classification=scattering_class(config.params), rows=rows)
    return body, "rows", EXIT_PARTIAL if failed else EXIT_OK


def cmd_verify(config):
    report = run_suite(config.suite, seed=config.seed, processes=config.processes, draws=config.draws)
    body = report.to_dict()
    return body, None, EXIT_OK if report.passed else EXIT_FAILED


COMMANDS = {
    "eval": cmd_eval,
    "spectrum": cmd_spectrum,
    "density": cmd_density,
    "phase": cmd_phase,
    "verify": cmd_verify,
}


# Serialization


def _flatten(row):
    flat = {}
    for key, value in row.items():
        if isinstance(value, (complex, np.complexfloating)) or (value is None and key in ("value", "delta", "lambda")):
            flat[f"{key}_re"] = "" if value is None else float(value.real)
            flat[f"{key}_im"] = "" if value is None else float(value.imag)
        else:
            flat[key] = "" if value is None else jsonable(value)
    return flat


def render(config, body, rows_key):
    payload = dict(config=config.header(), **body)
    if config.format == "json":
        return json.dumps(jsonable(payload), indent=2) + "\n"

    stream = io.StringIO()
    stream.write("# config: " + json.dumps(config.header(), sort_keys=True) + "\n")
    rows = body[rows_key] if rows_key is not None else [body]
    flat = [_flatten(row) for row in rows]
    if flat:
        writer = csv.DictWriter(stream, fieldnames=list(flat[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(flat)
    return stream.getvalue()


def main(argv=None):
    args = build_parser().parse_args(argv)
    config = RunConfig.from_args(args)
    logging.basicConfig(level=logging.DEBUG if config.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")

    try:
        body, rows_key, code = COMMANDS[config.command](config)
    except WhittakerError as error:
        print(f"whittaker: {error.code}: {error}", file=sys.stderr)
        return EXIT_DOMAIN

    text = render(config, body, rows_key)
    if config.out is None:
        sys.stdout.write(text)
    else:
        with open(config.out, "w", newline="") as f:
            f.write(text)
    return code


class CliTest(TestCase):
    def run_cli(self, *argv):
        with TemporaryDirectory() as directory:
            path = os.path.join(directory, "out")
            code = main(list(argv) + ["--out", path])
            with open(path) as f:
                return code, f.read()

    def run_json(self, *argv):
        code, text = self.run_cli(*argv)
        return code, json.loads(text)

    def test_unit_complex_pair(self):
        self.assertEqual(complex_pair("1.5,-2"), 1.5 - 2j)
        self.assertEqual(complex_pair("3"), 3 + 0j)
        with self.assertRaises(argparse.ArgumentTypeError):
            complex_pair("1,2,3")

    def test_unit_eval_k(self):
        code, out = self.run_json("eval", "K", "--beta", "0,0", "--m", "0.5,0", "--z", "2")
        self.assertEqual(code, EXIT_OK)
        (row,) = out["rows"]
        self.assertEqual(row["z"], [2.0, 0.0])
        self.assertClose(complex(*row["value"]), np.exp(-1.0), rtol=1e-12)
        self.assertIsNone(row["error"])
        self.assertEqual(out["config"]["m"], [0.5, 0.0])
        self.assertEqual(out["config"]["nmax"], N_MAX)

    def test_unit_eval_empty_and_rows(self):
        code, out = self.run_json("eval", "I", "--beta", "0.5", "--m", "0.3")
        self.assertEqual((code, out["rows"]), (EXIT_OK, []))
        code, out = self.run_json("eval", "y0", "--beta", "0.7", "--m", "0.3", "--z", "1", "1,1")
        self.assertEqual(code, EXIT_PARTIAL)
        self.assertIsNone(out["rows"][0]["error"])
        self.assertEqual(out["rows"][1]["error"], "domain")

    def test_unit_usage_error(self):
        with self.assertRaises(SystemExit) as raised:
            main(["eval", "Q", "--z", "1"])
        self.assertEqual(raised.exception.code, EXIT_USAGE)
        with self.assertRaises(SystemExit) as raised:
            main(["spectrum", "--beta", "1,2,3"])
        self.assertEqual(raised.exception.code, EXIT_USAGE)

    def test_unit_spectrum_one_resonance(self):
        code, out = self.run_json("spectrum", "--beta", "1,0", "--m", "-0.75,-2.4")
        self.assertEqual(code, EXIT_OK)
        kinds = [point["kind"] for point in out["points"]]
        self.assertEqual(kinds.count("resonance"), 1)
        self.assertEqual(kinds.count("eigenvalue"), N_MAX)
        self.assertTrue(all(point["distance"] < 1e-12 for point in out["points"]))
        self.assertEqual(out["ray"]["angle"], 0.0)
        self.assertEqual(len(out["trajectory"]), 400)

    def test_unit_spectrum_round_trip(self):
        _, out = self.run_json("spectrum", "--beta", "1,0.5", "--m", "2,-2.4", "--phi", "0.3", "--tcount", "10")
        descriptor = spectrum_descriptor(WhittakerParams(1 + 0.5j, 2 - 2.4j), 0.3, N_MAX, np.linspace(-20, 20, 10))
        self.assertEqual([complex(*pair) for pair in out["trajectory"]], list(descriptor.trajectory))
        self.assertEqual([complex(*point["lambda"]) for point in out["points"]], list(descriptor.presented))

    def test_unit_spectrum_odd_tcount_real(self):
        code, out = self.run_json("spectrum", "--beta", "1", "--m", "0.5", "--tcount", "3", "--tmax", "1")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out["trajectory"], [[-0.25, 0.0], [-0.25, 0.0]])

    def test_unit_spectrum_free_and_singular(self):
        code, out = self.run_json("spectrum", "--beta", "0", "--m", "0.3")
        self.assertEqual((code, out["points"], out["trajectory"]), (EXIT_OK, [], []))
        self.assertEqual(main(["spectrum", "--beta", "0,0", "--m", "-0.5,0"]), EXIT_DOMAIN)

    def test_unit_phase_real(self):
        code, out = self.run_json("phase", "--beta", "0.8", "--m", "0.4", "--k", "0.1", "0.5", "2", "7")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out["classification"], "unitary")
        for row in out["rows"]:
            self.assertLess(abs(row["modulus"] - 1), 1e-12)

    def test_unit_density_exceptional(self):
        code, out = self.run_json("density", "--beta", "0,1", "--m", "0.3", "--k", "0.625", "1.0", "--x", "1", "--y", "2")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual([row["status"] for row in out["rows"]], ["skipped:exceptional", "ok"])
        self.assertIsNone(out["rows"][0]["value"])

    def test_unit_density_free(self):
        """beta = 0, m = 1/2: p(k^2; x, y) = sin(kx) sin(ky) / (pi k)"""
        _, out = self.run_json("density", "--m", "0.5", "--k", "1.3", "--x", "0.4", "--y", "2.2")
        (row,) = out["rows"]
        self.assertClose(complex(*row["value"]), np.sin(0.52) * np.sin(2.86) / (np.pi * 1.3), rtol=1e-10)

    def test_unit_csv(self):
        code, text = self.run_cli("eval", "K", "--m", "0.5", "--z", "2", "3", "--format", "csv")
        lines = text.splitlines()
        self.assertTrue(lines[0].startswith("# config: "))
        self.assertEqual(lines[1], "z_re,z_im,value_re,value_im,error")
        self.assertEqual(len(lines), 4)
        self.assertEqual(text, self.run_cli("eval", "K", "--m", "0.5", "--z", "2", "3", "--format", "csv")[1])

    def test_unit_verify(self):
        code, out = self.run_json("verify", "scattering", "--seed", "3", "--draws", "5")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(out["passed"])
        self.assertEqual(out["seed"], 3)


if __name__ == "__main__":
    unittest.main()
