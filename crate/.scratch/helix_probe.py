import numpy as np
from itertools import product

I2 = np.eye(2, dtype=complex)
sx = np.array([[0,1],[1,0]], dtype=complex)
sy = np.array([[0,-1j],[1j,0]], dtype=complex)
sz = np.array([[1,0],[0,-1]], dtype=complex)
sp = np.array([[0,1],[0,0]], dtype=complex)   # sigma+ : |up><down|, basis (up,down)
sm = np.array([[0,0],[1,0]], dtype=complex)   # sigma-

def site_op(op, j, N):
    out = np.array([[1.0+0j]])
    for k in range(1, N+1):
        out = np.kron(out, op if k == j else I2)
    return out

def xxz_h(N, J, delta):
    d = 2**N
    H = np.zeros((d,d), complex)
    I = np.eye(d)
    for j in range(1, N):
        H += site_op(sx,j,N)@site_op(sx,j+1,N) + site_op(sy,j,N)@site_op(sy,j+1,N) \
             + delta*(site_op(sz,j,N)@site_op(sz,j+1,N) - I)
    return J*H

# check N=2, J=1, delta=1 spectrum {-4,0,0,0}
E = np.linalg.eigvalsh(xxz_h(2,1.0,1.0))
print("N=2 spectrum:", np.round(E,10))

def boundary_L(N, aL, bL, aR, bR, r, phi):
    d = 2**N
    I = np.eye(d)
    z1 = site_op(sz,1,N); m1 = site_op(sm,1,N); p1 = site_op(sp,1,N)
    zN = site_op(sz,N,N); mN = site_op(sm,N,N); pN = site_op(sp,N,N)
    LL = aL*(r*(m1@p1)) - bL*((z1 - I)/2 - r*m1)
    LR = aR*(r*np.exp(-1j*phi)*(mN@pN)) - bR*((zN - I)/2 - r*np.exp(1j*phi)*mN)
    return LL, LR

def steady_state(N, J, delta, Ls, t_end=400.0, dt=0.01):
    d = 2**N
    rho = np.eye(d, dtype=complex)/d
    H = xxz_h(N, J, delta)
    LdL = [L.conj().T @ L for L in Ls]
    def rhs(r):
        out = -1j*(H@r - r@H)
        for L, M in zip(Ls, LdL):
            out += L@r@L.conj().T - 0.5*(M@r + r@M)
        return out
    steps = int(t_end/dt)
    for s in range(steps):
        k1 = rhs(rho); k2 = rhs(rho+dt/2*k1); k3 = rhs(rho+dt/2*k2); k4 = rhs(rho+dt*k3)
        rho = rho + dt/6*(k1+2*k2+2*k3+k4)
        rho = (rho+rho.conj().T)/2
        rho /= np.real(np.trace(rho))
    return rho

def helix_diag(rho, N):
    pur = np.real(np.trace(rho@rho))
    phases, mags = [], []
    for j in range(1, N+1):
        m = np.trace(rho @ site_op(sp,j,N))
        phases.append(np.angle(m)); mags.append(np.abs(m))
    inc = np.diff(np.unwrap(phases))
    return pur, np.array(mags), np.array(phases), inc

# Scan: N=4, J=1; dark-state logic: site1 phase pi, siteN phase pi+phi
# bulk step eta = phi/(N-1), delta = cos(eta), r=1 (transverse helix), alpha=0
N = 4
print("\n=== scan: alpha=0, r=1, delta=cos(phi/3) ===")
best = None
for phi_frac in [0.6, 0.8, 1.0, 1.2]:
    eta = phi_frac
    phi = (N-1)*eta
    delta = np.cos(eta)
    for G in [0.5, 1.0, 2.0, 5.0]:
        LL, LR = boundary_L(N, 0.0, G, 0.0, G, 1.0, phi)
        rho = steady_state(N, 1.0, delta, [LL, LR], t_end=300.0, dt=0.01)
        pur, mags, ph, inc = helix_diag(rho, N)
        print(f"eta={eta:.2f} phi={phi:.3f} delta={delta:.4f} Gamma={G}: purity={pur:.4f} "
              f"mags={np.round(mags,3)} phase_incs={np.round(inc,3)}")
        if best is None or pur > best[0]:
            best = (pur, eta, G)
print("best:", best)
