"""Independent high-precision reference values frozen into the C++ tests.

Run with: python3 tests/oracles/compute_oracles.py
Uses mpmath only; shares no code with the library.
"""
import mpmath as mp

mp.mp.dps = 30


def sinc(u):
    return mp.mpf(1) if u == 0 else mp.sin(mp.pi * u) / (mp.pi * u)


def s(delta, fc):
    return mp.mpf(fc) if delta == 0 else mp.sin(mp.pi * fc * delta) / (mp.pi * delta)


def show(name, v):
    print(f"{name:40s} {mp.nstr(v, 17)}")


# kernel values
show("s(0.5, 1)", s(mp.mpf("0.5"), 1))

# two-node closed forms, nodes {0, 0.5}, fc = 1
s12 = s(mp.mpf("0.5"), 1)
c_pp = mp.sqrt(2 / (1 + s12))
c_pm = mp.sqrt(2 / (1 - s12))
show("c* (+,+)", c_pp)
show("c  (+,-)", c_pm)
show("loglik (+,+)", -2 * mp.log(c_pp**2))
show("loglik (+,-)", -2 * mp.log(c_pm**2))
show("loglik identity n=3", -3 * mp.log(3))
q_pp = 2 + 2 * s12
q_pm = 2 - 2 * s12
show("bqp objective (+,+)", q_pp)
show("bqp objective (+,-)", q_pm)
show("upper bound (+,+)", 2 * mp.log(q_pp) - 4 * mp.log(2))
show("upper bound (+,-)", 2 * mp.log(q_pm) - 4 * mp.log(2))

# surrogate pdfs
sinc2 = lambda x: mp.mpf("0.4") * sinc(mp.mpf("0.4") * x) ** 2
sinc4mix = lambda x: mp.mpf(3) * mp.mpf("0.2") / 4 * (sinc(mp.mpf("0.2") * x) ** 4 + sinc(mp.mpf("0.2") * x + mp.mpf("0.1")) ** 4)
gauss = lambda x: mp.exp(-x * x / 2) / mp.sqrt(2 * mp.pi)
show("sinc4mix(0)", sinc4mix(0))
show("sinc(0.1)^4", sinc(mp.mpf("0.1")) ** 4)


def integral(f, period):
    # split at sinc zeros to help the oscillatory quadrature
    pts = [mp.mpf(k) * period for k in range(-400, 401)]
    core = mp.quad(f, pts)
    return core


show("int sinc2", integral(sinc2, mp.mpf("2.5")) + 2 * mp.quad(sinc2, [1000, mp.inf]))
show("int sinc2^2", integral(lambda x: sinc2(x) ** 2, mp.mpf("2.5")) + 2 * mp.quad(lambda x: sinc2(x) ** 2, [1000, mp.inf]))
show("int sinc4mix^2", integral(lambda x: sinc4mix(x) ** 2, mp.mpf("2.5")) + 2 * mp.quad(lambda x: sinc4mix(x) ** 2, [1000, mp.inf]))
show("int gauss^2", 1 / (2 * mp.sqrt(mp.pi)))

# kde kernels at u = 0
show("gauss2 K(0)", gauss(0))
show("gauss6 K(0)", mp.mpf(15) / 8 * gauss(0))
