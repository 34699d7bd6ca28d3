use nalgebra::DMatrix;
use num_complex::Complex64;
use std::time::Instant;

fn main() {
    for n in [256usize, 512] {
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        let mut a = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n { for j in 0..n { a[(i, j)] = Complex64::new(next(), next()); } }
        let h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        let t = Instant::now();
        let eig = h.clone().symmetric_eigen();
        println!("symmetric_eigen n={n}: {:?}", t.elapsed());
        let t = Instant::now();
        let _p = &eig.eigenvectors * &h;
        println!("matmul {n}x{n}: {:?}", t.elapsed());
        let m = DMatrix::<Complex64>::zeros(16,16);
        let t = Instant::now();
        for _ in 0..10000 { let _ = &m * &m; }
        println!("10k matmul 16x16: {:?}", t.elapsed());
    }
}
