import numpy as np

I2 = np.eye(2, dtype=complex)
sx = np.array([[0,1],[1,0]], dtype=complex)
sy = np.array([[0,-1j],[1j,0]], dtype=complex)
sz = np.array([[1,0],[0,-1]], dtype=complex)

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

E = np.linalg.eigvalsh(xxz_h(4, 1.0, np.cos(0.6)))
print("XXZ N=4 J=1 delta=cos(0.6) spectrum:", np.round(E, 6))
print("E0 degenerate with E1?", abs(E[1]-E[0]) < 1e-12, " E1-E0 =", E[1]-E[0])
print("shift policy: E0<=0 -> s=-E0+(E1-E0): E'0 =", E[1]-E[0])
fr = (E - E[0] + (E[1]-E[0]))/(E[1]-E[0])*220
print("mapped freqs:", np.round(fr,1))
print("aliasing guard: fmax =", fr.max(), " <= 22050-1000 =", 22050-1000, "?", fr.max() <= 21050)
