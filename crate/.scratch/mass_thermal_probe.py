import numpy as np

def build(n, xmax, c2, c4, m=1.0):
    x = np.linspace(-xmax, xmax, n)
    h = x[1] - x[0]
    T = np.zeros((n, n))
    for i in range(n):
        T[i, i] = 1.0 / h**2
        if i > 0: T[i, i-1] = -0.5 / h**2
        if i < n-1: T[i, i+1] = -0.5 / h**2
    T /= m
    V = c4 * x**4 - c2 * x**2
    H = T + np.diag(V)
    E, U = np.linalg.eigh(H)
    return x, h, E, U, np.diag(V)

print("=== mass scan, Fig.1 well c2=0.35 c4=0.05, barrier 0.6125 ===")
for m in [1.0, 1.5, 2.0, 2.5, 3.0, 4.0]:
    x, h, E, U, _ = build(256, 6.0, 0.35, 0.05, m)
    gap = E[1]-E[0]
    ratio = gap/(E[2]-E[1])
    print(f"m={m}: E0={E[0]:.5f} E1={E[1]:.5f} E2={E[2]:.5f} gap={gap:.6f} ratio={ratio:.4f} T_tun={2*np.pi/gap:.1f} below_barrier={E[1]<0}")

# pick m=2: check localization + parity
m = 2.0
x, h, E, U, V = build(256, 6.0, 0.35, 0.05, m)
plus = (U[:,0] + U[:,1])/np.sqrt(2)
minus = (U[:,0] - U[:,1])/np.sqrt(2)
xm = np.sqrt(0.35/(2*0.05))
print("m=2: <X>_+ =", np.sum(x*np.abs(plus)**2), " <X>_- =", np.sum(x*np.abs(minus)**2), " 0.5*xmin =", 0.5*xm)
print("m=2 grid conv: ", end="")
for n in [256, 512]:
    _,_,E2,_,_ = build(n, 6.0, 0.35, 0.05, m)
    print(f"n={n} gap={E2[1]-E2[0]:.8f}", end="  ")
g256 = build(256,6.0,0.35,0.05,m)[2]; g512 = build(512,6.0,0.35,0.05,m)[2]
print("rel change =", abs((g512[1]-g512[0])-(g256[1]-g256[0]))/(g256[1]-g256[0]))

print()
print("=== deep well candidates at m=2 ===")
for c2 in [0.5, 0.6, 0.7]:
    x, h, E, U, _ = build(256, 6.0, c2, 0.05, 2.0)
    gap = E[1]-E[0]
    print(f"c2={c2}: barrier={c2**2/0.2:.2f} E0={E[0]:.5f} E1={E[1]:.5f} gap={gap:.3e} T_tun={2*np.pi/gap:.0f}")

# thermalisation probe: truncate to rank 16, integrate Lindblad, watch offdiag decay.
def lindblad_thermal(c2, c4, m, gamma, kT, rank=16, t_end=80.0, dt=0.004, n=256, xmax=6.0):
    x = np.linspace(-xmax, xmax, n)
    h = x[1]-x[0]
    T = np.zeros((n,n))
    for i in range(n):
        T[i,i] = 1.0/h**2
        if i>0: T[i,i-1] = -0.5/h**2
        if i<n-1: T[i,i+1] = -0.5/h**2
    T /= m
    V = np.diag(c4*x**4 - c2*x**2)
    H0 = T + V
    E, U = np.linalg.eigh(H0)
    D = np.zeros((n,n))
    for i in range(n):
        if i+1<n: D[i,i+1] = 1/(2*h)
        if i-1>=0: D[i,i-1] = -1/(2*h)
    P = -1j*D
    X = np.diag(x)
    Heff = H0 + 0.5*gamma*(X@P + P@X)
    L = np.sqrt(4*gamma*m*kT)*X + 1j*np.sqrt(gamma/(4*m*kT))*P
    Ur = U[:, :rank]
    Ht = Ur.conj().T @ Heff @ Ur
    Lt = Ur.conj().T @ L @ Ur
    print("  Heff herm residue (trunc):", np.abs(Ht - Ht.conj().T).max())
    # initial: symmetric combo of 0,1
    psi = np.zeros(rank, complex); psi[0] = 1/np.sqrt(2); psi[1] = 1/np.sqrt(2)
    rho = np.outer(psi, psi.conj())
    LdL = Lt.conj().T @ Lt
    def rhs(r):
        c = Ht@r - r@Ht
        d = Lt@r@Lt.conj().T - 0.5*(LdL@r + r@LdL)
        return -1j*c + d
    steps = int(t_end/dt)
    stride = max(1, steps//200)
    ts, offd, pur, mineig = [], [], [], []
    for s in range(steps+1):
        if s % stride == 0:
            od = np.abs(rho - np.diag(np.diag(rho))).sum()
            ts.append(s*dt); offd.append(od); pur.append(np.real(np.trace(rho@rho)))
            mineig.append(np.linalg.eigvalsh((rho+rho.conj().T)/2).min())
        k1 = rhs(rho); k2 = rhs(rho+dt/2*k1); k3 = rhs(rho+dt/2*k2); k4 = rhs(rho+dt*k3)
        rho = rho + dt/6*(k1+2*k2+2*k3+k4)
        rho = (rho + rho.conj().T)/2
        tr = np.real(np.trace(rho))
        if abs(tr-1) > 1e-12: rho /= tr
    return np.array(ts), np.array(offd), np.array(pur), np.array(mineig), E[:rank]

print()
print("=== thermalisation scan (m=2, Fig.1 well, symmetric combo init) ===")
for gamma, kT in [(0.02, 0.3), (0.05, 0.3), (0.05, 0.6), (0.1, 0.5)]:
    ts, od, pur, me, E = lindblad_thermal(0.35, 0.05, 2.0, gamma, kT)
    print(f"gamma={gamma} kT={kT}: offdiag  t0={od[0]:.3f} mid={od[len(od)//2]:.3f} end={od[-1]:.3f}; purity end={pur[-1]:.3f}; min_eig overall={me.min():.2e}")
