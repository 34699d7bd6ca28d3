import numpy as np

# Double-well on a grid: V = c4 x^4 - c2 x^2, hbar=m=1
def grid(n, xmax):
    x = np.linspace(-xmax, xmax, n)
    h = x[1] - x[0]
    return x, h

def kinetic_std(n, h, m=1.0):
    # standard 3-point Laplacian
    T = np.zeros((n, n))
    for i in range(n):
        T[i, i] = 1.0 / h**2
        if i > 0: T[i, i-1] = -0.5 / h**2
        if i < n-1: T[i, i+1] = -0.5 / h**2
    return T / m

def p_central(n, h):
    D = np.zeros((n, n))
    for i in range(n):
        if i+1 < n: D[i, i+1] = 1/(2*h)
        if i-1 >= 0: D[i, i-1] = -1/(2*h)
    return -1j * D

def spectrum(n, xmax, c2, c4, kinetic='std'):
    x, h = grid(n, xmax)
    V = c4 * x**4 - c2 * x**2
    if kinetic == 'std':
        T = kinetic_std(n, h)
    else:
        P = p_central(n, h)
        T = (P @ P).real / 1.0  # P.P
    H = T + np.diag(V)
    E, U = np.linalg.eigh(H)
    return x, E, U

for kin in ['std', 'pp']:
    x, E, U = spectrum(256, 6.0, 0.35, 0.05, kin)
    print(f"kinetic={kin}: E0..E5 =", np.round(E[:6], 6))
    print(f"  gap E1-E0 = {E[1]-E[0]:.8f}, E2-E1 = {E[2]-E[1]:.6f}, barrier=0.6125, Vmin=-0.6125")

# convergence of gap
for n in [256, 512]:
    x, E, U = spectrum(n, 6.0, 0.35, 0.05, 'std')
    print(f"n={n}: E0={E[0]:.8f} E1={E[1]:.8f} gap={E[1]-E[0]:.8f} E2={E[2]:.6f} E3={E[3]:.6f}")

# deep well candidate
for c2 in [0.6, 0.8, 1.0]:
    x, E, U = spectrum(256, 6.0, c2, 0.05, 'std')
    barrier = c2**2/(4*0.05)
    print(f"deep c2={c2}: barrier={barrier:.3f} E0={E[0]:.6f} E1={E[1]:.6f} gap={E[1]-E[0]:.3e} E2={E[2]:.4f} E3={E[3]:.4f} period={2*np.pi/(E[1]-E[0]):.1f}")

# parity of eigenvectors, localization of combos (Fig. 1 well)
x, E, U = spectrum(256, 6.0, 0.35, 0.05, 'std')
for k in range(3):
    v = U[:, k]
    sym = np.abs(v - v[::-1]).max()
    anti = np.abs(v + v[::-1]).max()
    print(f"state {k}: even-residue={sym:.2e} odd-residue={anti:.2e}")
plus = (U[:,0] + U[:,1])/np.sqrt(2)
minus = (U[:,0] - U[:,1])/np.sqrt(2)
xm = np.sqrt(0.35/(2*0.05))
print("x_min =", xm)
print("<X>_+ =", np.sum(x*np.abs(plus)**2), " <X>_- =", np.sum(x*np.abs(minus)**2))

# harmonic ladder: V = +c2 x^2, omega = sqrt(2 c2)
x, Eh, _ = spectrum(256, 6.0, -0.35, 0.0, 'std')   # c2=-0.35 -> V=+0.35x^2
om = np.sqrt(2*0.35)
sp = np.diff(Eh[:9])
print("harmonic spacings:", np.round(sp, 5), " hbar*omega =", om)
print("max rel dev over first 8 spacings:", np.max(np.abs(sp - om))/om)
