import os
import subprocess
import sys

PROBE = (
    "import dgdeform as dg\n"
    "A = dg.catalog_get('derham', n=3)\n"
    "a = A.ctx.parse('t1*dt2 + (1+i)*h*t3^2*dt1 - dt3')\n"
    "b = A.ctx.parse('t2*dt1*dt3 + 3/2*t1 + dt2')\n"
    "print(dg.COMPILED)\n"
    "print(dg.deformed_mul(a, b, A.d))\n"
)


def probe(pure: bool) -> list[str]:
    env = dict(os.environ)
    env.pop("DGDEFORM_PURE_PYTHON", None)
    if pure:
        env["DGDEFORM_PURE_PYTHON"] = "1"
    res = subprocess.run([sys.executable, "-c", PROBE], capture_output=True, text=True, env=env, check=True)
    return res.stdout.splitlines()


def test_fallback_switch_gives_same_products():
    pure = probe(True)
    default = probe(False)
    assert pure[0] == "False"
    assert pure[1] == default[1]
