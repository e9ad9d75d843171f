//! Test-only dense simulators used as independent oracles.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::mps::{Circuit, Gate};

/// Statevector oracle: applies gates by explicit index arithmetic.
pub struct Dense {
    pub n: usize,
    pub amp: Vec<Complex64>,
}

impl Dense {
    pub fn basis(bits: &str) -> Self {
        Self {
            n: bits.len(),
            amp: crate::pauli::dense::basis_state(bits).unwrap(),
        }
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    pub fn apply(&mut self, g: &Gate) {
        match g {
            Gate::One { site, matrix, .. } => {
                let b = self.bit(*site);
                for idx in 0..self.amp.len() {
                    if idx & b == 0 {
                        let (a0, a1) = (self.amp[idx], self.amp[idx | b]);
                        self.amp[idx] = matrix[0] * a0 + matrix[1] * a1;
                        self.amp[idx | b] = matrix[2] * a0 + matrix[3] * a1;
                    }
                }
            }
            Gate::Two { site, matrix, .. } => {
                let (b0, b1) = (self.bit(*site), self.bit(site + 1));
                for idx in 0..self.amp.len() {
                    if idx & (b0 | b1) == 0 {
                        let ids = [idx, idx | b1, idx | b0, idx | b0 | b1];
                        let old: Vec<_> = ids.iter().map(|&k| self.amp[k]).collect();
                        for r in 0..4 {
                            self.amp[ids[r]] = (0..4).map(|k| matrix[r * 4 + k] * old[k]).sum();
                        }
                    }
                }
            }
        }
    }

    pub fn from_amplitudes(amp: Vec<Complex64>) -> Self {
        let n = amp.len().trailing_zeros() as usize;
        Self { n, amp }
    }

    pub fn run(&mut self, circuit: &Circuit) {
        circuit.gates().iter().for_each(|g| self.apply(g));
    }
}

/// Column `k` is the circuit applied to basis state `k`.
pub fn circuit_unitary(circuit: &Circuit) -> crate::linalg::DenseMatrix {
    let dim = 1usize << circuit.n_qubits();
    let mut data = Vec::with_capacity(dim * dim);
    for k in 0..dim {
        let mut amp = alloc::vec![Complex64::new(0.0, 0.0); dim];
        amp[k] = Complex64::new(1.0, 0.0);
        let mut d = Dense::from_amplitudes(amp);
        d.run(circuit);
        data.extend(d.amp);
    }
    crate::linalg::DenseMatrix::from_col_major(dim, dim, data).unwrap()
}

/// `exp(A)` by scaling and squaring of a Taylor series.
pub fn expm(a: &crate::linalg::DenseMatrix) -> crate::linalg::DenseMatrix {
    use crate::linalg::{gemm, DenseMatrix, Op};
    let norm = a.frobenius_norm();
    let mut squarings = 0;
    while norm / f64::from(1u32 << squarings) > 0.25 {
        squarings += 1;
    }
    let mut x = a.clone();
    x.scale(Complex64::new(1.0 / f64::from(1u32 << squarings), 0.0));
    let n = a.rows();
    let mut sum = DenseMatrix::identity(n);
    let mut term = DenseMatrix::identity(n);
    for k in 1..30 {
        term = gemm(&term, &x, Op::N, Op::N).unwrap();
        term.scale(Complex64::new(1.0 / k as f64, 0.0));
        for (s, t) in sum.data_mut().iter_mut().zip(term.data()) {
            *s += t;
        }
    }
    for _ in 0..squarings {
        sum = gemm(&sum, &sum, Op::N, Op::N).unwrap();
    }
    sum
}

/// Integrals with random values and the full 8-fold symmetry.
pub fn random_integrals(n: usize, seed: u64) -> crate::pauli::Integrals {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut h = alloc::vec![0.0; n * n];
    for p in 0..n {
        for q in 0..=p {
            let v = rng.gen_range(-1.0..1.0);
            h[p * n + q] = v;
            h[q * n + p] = v;
        }
    }
    // Every visit rewrites the whole symmetry orbit, so the final table
    // is symmetric whatever the visiting order.
    let mut g = alloc::vec![0.0; n * n * n * n];
    let idx = |p: usize, q: usize, r: usize, s: usize| ((p * n + q) * n + r) * n + s;
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = rng.gen_range(-0.2..0.2);
                    for (a, b, c, d) in [
                        (p, q, r, s),
                        (q, p, r, s),
                        (p, q, s, r),
                        (q, p, s, r),
                        (r, s, p, q),
                        (s, r, p, q),
                        (r, s, q, p),
                        (s, r, q, p),
                    ] {
                        g[idx(a, b, c, d)] = v;
                    }
                }
            }
        }
    }
    crate::pauli::Integrals::new(n, h, g, rng.gen_range(-1.0..1.0)).unwrap()
}

/// Applies one ladder operator to a statevector by occupation-bit
/// arithmetic, qubit 0 as the most significant bit.
pub fn apply_ladder(amp: &[Complex64], mode: usize, dagger: bool) -> Vec<Complex64> {
    let n = amp.len().trailing_zeros() as usize;
    let bit = 1usize << (n - 1 - mode);
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); amp.len()];
    for (idx, &a) in amp.iter().enumerate() {
        if (idx & bit != 0) == dagger {
            continue;
        }
        let below = if mode == 0 { 0 } else { idx >> (n - mode) };
        let sign = if below.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        out[idx ^ bit] += a * sign;
    }
    out
}

/// `⟨ψ| a†_p a_q |ψ⟩` for all `p, q`, row-major.
pub fn dense_rdm1(amp: &[Complex64]) -> Vec<Complex64> {
    let n = amp.len().trailing_zeros() as usize;
    let mut out = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            let v = apply_ladder(&apply_ladder(amp, q, false), p, true);
            out.push(crate::pauli::dense::inner(amp, &v));
        }
    }
    out
}

/// `⟨ψ| a†_p a†_q a_r a_s |ψ⟩` for all `p, q, r, s`, row-major.
pub fn dense_rdm2(amp: &[Complex64]) -> Vec<Complex64> {
    let n = amp.len().trailing_zeros() as usize;
    let mut out = Vec::with_capacity(n.pow(4));
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = apply_ladder(&apply_ladder(amp, s, false), r, false);
                    let v = apply_ladder(&apply_ladder(&v, q, true), p, true);
                    out.push(crate::pauli::dense::inner(amp, &v));
                }
            }
        }
    }
    out
}
