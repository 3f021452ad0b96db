"""Print the high-precision reference values frozen into the unit tests."""
import mpmath as mp

mp.mp.dps = 50
phi = lambda x: mp.npdf(x)
Phi = lambda x: mp.ncdf(x)
mills = lambda x: mp.sqrt(mp.pi / 2) * mp.exp(mp.mpf(x) ** 2 / 2) * mp.erfc(mp.mpf(x) / mp.sqrt(2))
logPhi = lambda x: mp.log(mp.ncdf(x))

print("m(1)", mills(1))
print("m(-1)", mills(-1))
print("log m(-50)", mp.log(mills(-50)))
print("log m(600)", mp.log(mills(600)))
print("log m(-37.5)", mp.log(mills(-37.5)))
print("m(-20)", mills(-20))
print("m(-5)", mills(-5))
print("logPhi(-10)", logPhi(-10))
for lp in [-1, -10, -100, -5000, -1e4, -1e6, -1e8]:
    root = mp.findroot(lambda x: logPhi(x) - lp, -mp.sqrt(-2 * lp))
    print("root", lp, root)
for p in [1e-300, 1e-20, 1e-5, 0.025, 0.3, 0.75, 0.999]:
    print("qnorm", p, mp.sqrt(2) * mp.erfinv(2 * mp.mpf(p) - 1))


def lasso(a, b, c):
    a, b, c = mp.mpf(a), mp.mpf(b), mp.mpf(c)
    k = lambda x: mp.exp(-a * x * x / 2 + b * x - c * abs(x))
    Zn = mp.quad(k, [-mp.inf, 0])
    Zp = mp.quad(k, [0, mp.inf])
    return k, Zn, Zp


k, Zn, Zp = lasso(1, -4, 1)
print("(1,-4,1) w", Zn / (Zn + Zp), "1-w", Zp / (Zn + Zp), "logZ", mp.log(Zn + Zp))
k, Zn, Zp = lasso(2, 1, 3)
Z = Zn + Zp
print("(2,1,3) logZ", mp.log(Z), "w", Zn / Z)
# closed form for the left tail: on x < 0 the kernel is a scaled normal
# density with mean (b + c)/a; quadrature out to -inf is not reliable here
a_, bc = mp.mpf(2), mp.mpf(4)
left = mp.exp(bc ** 2 / (2 * a_)) * mp.sqrt(2 * mp.pi / a_) * mp.ncdf((-50 - bc / a_) * mp.sqrt(a_))
print("(2,1,3) log cdf(-50)", mp.log(left / Z))
for r in range(1, 5):
    print("(2,1,3) moment", r, mp.quad(lambda x: x ** r * k(x), [-mp.inf, 0, mp.inf]) / Z)
print("(2,1,3) mgf(0.5)", mp.quad(lambda x: mp.exp(x / 2) * k(x), [-mp.inf, 0, mp.inf]) / Z)
k, Zn, Zp = lasso(100, 50, 200)
print("(100,50,200) w", Zn / (Zn + Zp))

# truncated normal N(-3, 0.5^2) on (0, inf)
mu, s = mp.mpf(-3), mp.mpf("0.5")
f = lambda x: mp.exp(-(x - mu) ** 2 / (2 * s * s))
n0 = mp.quad(f, [0, mp.inf])
for r in range(1, 5):
    print("tn+(-3,0.5) moment", r, mp.quad(lambda x: x ** r * f(x), [0, mp.inf]) / n0)
mu, s = mp.mpf(-1000), mp.mpf(1)
f = lambda x: mp.exp(-(x - mu) ** 2 / (2 * s * s) - (mu ** 2) / 2)
n0 = mp.quad(f, [0, 0.01, mp.inf])
for r in range(1, 5):
    print("tn+(-1000,1) moment", r, mp.quad(lambda x: x ** r * f(x), [0, 0.01, mp.inf]) / n0)
