import numpy as np

I2 = np.eye(2, dtype=complex)
sx = np.array([[0,1],[1,0]], dtype=complex)
sy = np.array([[0,-1j],[1j,0]], dtype=complex)
sz = np.array([[1,0],[0,-1]], dtype=complex)
sp = np.array([[0,1],[0,0]], dtype=complex)
sm = np.array([[0,0],[1,0]], dtype=complex)

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

def boundary_L(N, aL, bL, aR, bR, r, phi):
    d = 2**N; I = np.eye(d)
    z1 = site_op(sz,1,N); m1 = site_op(sm,1,N); p1 = site_op(sp,1,N)
    zN = site_op(sz,N,N); mN = site_op(sm,N,N); pN = site_op(sp,N,N)
    LL = aL*(r*(m1@p1)) - bL*((z1 - I)/2 - r*m1)
    LR = aR*(r*np.exp(-1j*phi)*(mN@pN)) - bR*((zN - I)/2 - r*np.exp(1j*phi)*mN)
    return LL, LR

N=4; eta=0.6; phi=3*eta; delta=np.cos(eta); G=5.0
H = xxz_h(N,1.0,delta)
LL, LR = boundary_L(N,0,G,0,G,1.0,phi)
Ls=[LL,LR]; LdL=[L.conj().T@L for L in Ls]
def rhs(r):
    out = -1j*(H@r - r@H)
    for L,M in zip(Ls,LdL):
        out += L@r@L.conj().T - 0.5*(M@r+r@M)
    return out
d=16; rho=np.eye(d,dtype=complex)/d
dt=0.01; t_end=300.0; steps=int(t_end/dt)
ts=[]; purs=[]
for s in range(steps+1):
    if s % 500 == 0:
        ts.append(s*dt); purs.append(np.real(np.trace(rho@rho)))
    k1=rhs(rho);k2=rhs(rho+dt/2*k1);k3=rhs(rho+dt/2*k2);k4=rhs(rho+dt*k3)
    rho=rho+dt/6*(k1+2*k2+2*k3+k4)
    rho=(rho+rho.conj().T)/2; rho/=np.real(np.trace(rho))
purs=np.array(purs)
print("purity(t) every 5 units:", np.round(purs,4))
print("monotone after smoothing?", np.all(np.diff(purs)> -1e-4))
print("purity at t=150:", purs[30], " at 300:", purs[-1])
# settle time to 0.9
idx=np.argmax(purs>=0.9); print("reaches 0.9 at t ~", ts[idx])

print()
print("=== SSE qubit probe: Euler-Maruyama, H=0, L=sqrt(g) sm, ensemble avg vs exp(-g t) ===")
rng = np.random.default_rng(12345)
g=1.0; L=np.sqrt(g)*sm; LdL_=L.conj().T@L
dt=0.001; t_end=1.0; steps=int(t_end/dt); M=2000
up_final=[]
for traj in range(M):
    psi=np.array([1.0+0j,0.0])
    for s in range(steps):
        Lpsi=L@psi
        expL=np.vdot(psi,Lpsi)            # <L>
        drift=(-0.5*(LdL_@psi) + np.conj(expL)*Lpsi - 0.5*np.abs(expL)**2*psi)
        dW=rng.normal(0.0,np.sqrt(dt))
        psi=psi+drift*dt+(Lpsi-expL*psi)*dW
        psi/=np.linalg.norm(psi)
    up_final.append(np.abs(psi[0])**2)
up_final=np.array(up_final)
mean=up_final.mean(); se=up_final.std(ddof=1)/np.sqrt(M)
print(f"M={M}: mean rho_uu(t=1) = {mean:.5f} +- {se:.5f}, analytic = {np.exp(-1):.5f}, dev/se = {(mean-np.exp(-1))/se:.2f}")
