"""Run the ratdyn binary over every subcommand and validate each JSON report."""

import json
import pathlib
import subprocess
import sys

import jsonschema

CASES = [
    (["cycles", "--map", "z^2", "--period", "2"], 0),
    (["cycles", "--map", "z^2", "--period", "1", "--exact"], 0),
    (["cycles", "--map", "lattes:-1:0:2", "--period", "1"], 0),
    (["spectrum", "--map", "z^2-1", "--max-period", "3"], 0),
    (["spectrum", "--map", "z^2-1", "--max-period", "12"], 4),
    (["field-check", "--map", "z^2-1", "--max-period", "1", "--field", "Q"], 0),
    (["field-check", "--map", "z^2-1", "--max-period", "2", "--field", "quad:5"], 0),
    (["field-check", "--map", "z^2-1", "--max-period", "1", "--field", "poly:x^2-5"], 0),
    (["classify", "--map", "z^2-2"], 0),
    (["classify", "--map", "z^2-1", "--max-period", "3"], 0),
    (["lyapunov", "--map", "z^2", "--samples", "4000", "--periodic", "4"], 0),
    (["lyapunov", "--map", "z^2-1", "--samples", "4000"], 0),
    (["equidist", "--map", "z^2-1", "--periods", "4,6", "--depth", "10"], 0),
    (["homoclinic", "--map", "z^2-1", "--point", "1.618", "--n-max", "12"], 0),
    (["homoclinic", "--map", "z^2-1", "--point", "0"], 2),
    (["zdunik", "--map", "z^2-1", "--max-period", "4", "--samples", "5000"], 0),
    (["make", "power", "--d", "3", "--sign", "-1"], 0),
    (["make", "chebyshev", "--d", "3"], 0),
    (["make", "lattes", "--a", "-1", "--b", "0", "--m", "2"], 0),
    (["cycles", "--map", "z^^2", "--period", "1"], 2),
    (["cycles", "--period", "1"], 2),
    (["nonsense"], 2),
]


def main() -> int:
    binary, schema_path = sys.argv[1], pathlib.Path(sys.argv[2])
    schema = json.loads(schema_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for args, expected in CASES:
        proc = subprocess.run([binary, *args], capture_output=True, text=True, timeout=300)
        label = " ".join(args)
        try:
            report = json.loads(proc.stdout)
        except json.JSONDecodeError as exc:
            print(f"FAIL {label}: stdout is not JSON ({exc})")
            failures += 1
            continue
        errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
        if proc.returncode != expected or report["exit_code"] != proc.returncode or errors:
            failures += 1
            print(f"FAIL {label}: exit {proc.returncode} (want {expected})")
            for e in errors[:5]:
                print(f"    {'/'.join(map(str, e.path))}: {e.message[:200]}")
        else:
            print(f"ok   {label}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
