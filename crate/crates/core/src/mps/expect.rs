use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::state::{MpsState, SiteTensor};
use crate::linalg::{gemm_ref, DenseMatrix, MatRef, Op};
use crate::pauli::{Pauli, PauliString, QubitOperator};
use crate::{Error, Result};

/// Imaginary parts above this in a Pauli expectation are reported as errors.
pub const IMAGINARY_TOLERANCE: f64 = 1e-8;

/// Nonzero entries `O_{ii'}` of a single-site Pauli as (bra indices, ket
/// indices, weights).
fn site_terms(op: Option<Pauli>) -> ([usize; 2], [usize; 2], [Complex64; 2]) {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match op {
        None => ([0, 1], [0, 1], [one, one]),
        Some(Pauli::X) => ([0, 1], [1, 0], [one, one]),
        Some(Pauli::Y) => ([0, 1], [1, 0], [-i, i]),
        Some(Pauli::Z) => ([0, 1], [0, 1], [one, -one]),
    }
}

#[derive(Debug, Clone, Copy)]
enum Side {
    Left,
    Right,
}

/// What to do with the environment at the end of a trie path.
#[derive(Debug, Clone, Copy)]
enum Request {
    /// Left path ending at the last site: close with the identity.
    Close(usize),
    /// Right path ending at the first site: close with `diag(λ²)`.
    Cap(usize, usize),
    /// Right half of a split string: keep the environment.
    Store(usize),
    /// Left half of a split string: join with a stored right half.
    Join(usize, usize),
}

enum Output {
    Value(usize, f64),
    Stored(usize, DenseMatrix),
}

/// `E' = Σ_{ii'} O_{ii'} B^{i†} E B^{i'}`, with `E` indexed (bra, ket).
fn transfer(env: &DenseMatrix, t: &SiteTensor, op: Option<Pauli>) -> Result<DenseMatrix> {
    let f = gemm_ref(env.as_ref(), t.wide(), Op::N, Op::N)?;
    let blk = t.dl() * t.dr();
    let fb = |i: usize| MatRef {
        rows: t.dl(),
        cols: t.dr(),
        data: &f.data()[i * blk..(i + 1) * blk],
    };
    let (bra, ket, w) = site_terms(op);
    let mut out = gemm_ref(t.block(bra[0]), fb(ket[0]), Op::C, Op::N)?;
    let second = gemm_ref(t.block(bra[1]), fb(ket[1]), Op::C, Op::N)?;
    for (a, b) in out.data_mut().iter_mut().zip(second.data()) {
        *a = w[0] * *a + w[1] * b;
    }
    Ok(out)
}

/// `R' = Σ_{ii'} O_{ii'} B^{i'} R B^{i†}`, with `R` indexed (ket, bra).
fn transfer_right(env: &DenseMatrix, t: &SiteTensor, op: Option<Pauli>) -> Result<DenseMatrix> {
    let (ia, ib, w) = site_terms(op);
    let half = |k: usize| -> Result<DenseMatrix> {
        let g = gemm_ref(env.as_ref(), t.block(ia[k]), Op::N, Op::C)?;
        gemm_ref(t.block(ib[k]), g.as_ref(), Op::N, Op::N)
    };
    let mut out = half(0)?;
    let second = half(1)?;
    for (a, b) in out.data_mut().iter_mut().zip(second.data()) {
        *a = w[0] * *a + w[1] * b;
    }
    Ok(out)
}

/// `tr(A·B)`.
fn trace_product(a: &DenseMatrix, b: &DenseMatrix) -> Complex64 {
    let n = a.rows();
    let mut z = Complex64::new(0.0, 0.0);
    for c in 0..a.cols() {
        for (r, x) in a.col(c).iter().enumerate() {
            z += x * b.data()[r * n + c];
        }
    }
    z
}

fn trace(m: &DenseMatrix) -> Complex64 {
    (0..m.rows()).map(|k| m[(k, k)]).sum()
}

/// Dense operator sequence of a string from its first to last support site.
fn dense_ops(p: &PauliString) -> Vec<Option<Pauli>> {
    let Some(first) = p.first_site() else {
        return Vec::new();
    };
    let last = p.last_site().unwrap();
    (first..=last).map(|s| p.get(s)).collect()
}

impl MpsState {
    fn check_string(&self, p: &PauliString) -> Result<()> {
        if p.min_qubits() > self.n_qubits() {
            return Err(Error::QubitOutOfRange {
                qubit: p.last_site().unwrap(),
                n_qubits: self.n_qubits(),
            });
        }
        Ok(())
    }

    fn left_cap(&self, site: usize) -> DenseMatrix {
        let sq: Vec<f64> = self.lambda(site).iter().map(|l| l * l).collect();
        DenseMatrix::diag_real(&sq)
    }

    /// `⟨ψ|P|ψ⟩` by transfer matrices from the first to the last support
    /// site, starting from `diag(λ²)` at the bond left of the first site.
    pub fn expect_pauli(&self, p: &PauliString) -> Result<f64> {
        self.check_string(p)?;
        let Some(first) = p.first_site() else {
            return Ok(1.0);
        };
        let mut env = self.left_cap(first);
        for (k, op) in dense_ops(p).into_iter().enumerate() {
            env = transfer(&env, self.site(first + k), op)?;
        }
        real_part(trace(&env))
    }

    /// Expectations of many strings, in input order.
    ///
    /// Strings are split at a central bond `c`. Right environments of the
    /// distinct right halves are built first by tries anchored at each last
    /// support site; left environments are then built by tries anchored at
    /// each first support site and closed against the stored right halves
    /// with `tr(E·R)`. Strings on one side of `c` close against the identity
    /// (left side) or the canonical `diag(λ²)` cap (right side). Each value
    /// depends only on its own contraction path, so the result does not
    /// depend on the evaluation schedule.
    pub fn expect_many(&self, strings: &[PauliString]) -> Result<Vec<f64>> {
        for p in strings {
            self.check_string(p)?;
        }
        let n = self.n_qubits();
        let cut = n / 2;
        let mut values = vec![0.0; strings.len()];

        // (anchor, ops from the anchor outward, request)
        let mut right_reqs: Vec<(usize, Vec<Option<Pauli>>, Request)> = Vec::new();
        let mut left_reqs: Vec<(usize, Vec<Option<Pauli>>, Request)> = Vec::new();
        let mut right_keys: BTreeMap<(usize, Vec<Option<Pauli>>), usize> = BTreeMap::new();
        for (idx, p) in strings.iter().enumerate() {
            let (Some(first), Some(last)) = (p.first_site(), p.last_site()) else {
                values[idx] = 1.0;
                continue;
            };
            let ops = dense_ops(p);
            if last < cut {
                left_reqs.push((first, ops, Request::Close(idx)));
            } else if first >= cut {
                let rev: Vec<_> = ops.into_iter().rev().collect();
                right_reqs.push((last, rev, Request::Cap(idx, first)));
            } else {
                let split = cut - first;
                let rev: Vec<_> = ops[split..].iter().rev().copied().collect();
                let next = right_keys.len();
                let rid = *right_keys.entry((last, rev.clone())).or_insert_with(|| {
                    right_reqs.push((last, rev, Request::Store(next)));
                    next
                });
                left_reqs.push((first, ops[..split].to_vec(), Request::Join(idx, rid)));
            }
        }

        let right_out = self.run_tries(right_reqs, Side::Right, &[])?;
        let mut stored: Vec<Option<DenseMatrix>> = vec![None; right_keys.len()];
        for out in right_out {
            match out {
                Output::Value(idx, v) => values[idx] = v,
                Output::Stored(rid, m) => stored[rid] = Some(m),
            }
        }
        let stored: Vec<DenseMatrix> = stored.into_iter().map(Option::unwrap).collect();
        for out in self.run_tries(left_reqs, Side::Left, &stored)? {
            if let Output::Value(idx, v) = out {
                values[idx] = v;
            }
        }
        Ok(values)
    }

    /// Groups requests by anchor and walks each group as a trie.
    fn run_tries(
        &self,
        mut reqs: Vec<(usize, Vec<Option<Pauli>>, Request)>,
        side: Side,
        stored: &[DenseMatrix],
    ) -> Result<Vec<Output>> {
        reqs.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        let mut groups: Vec<&[(usize, Vec<Option<Pauli>>, Request)]> = Vec::new();
        let mut start = 0;
        for k in 1..=reqs.len() {
            if k == reqs.len() || reqs[k].0 != reqs[start].0 {
                groups.push(&reqs[start..k]);
                start = k;
            }
        }
        let walk = |group: &[(usize, Vec<Option<Pauli>>, Request)]| self.walk(group, side, stored);

        #[cfg(feature = "std")]
        let parts: Vec<Result<Vec<Output>>> = {
            use rayon::prelude::*;
            groups.par_iter().map(|g| walk(g)).collect()
        };
        #[cfg(not(feature = "std"))]
        let parts: Vec<Result<Vec<Output>>> = groups.iter().map(|g| walk(g)).collect();

        let mut out = Vec::new();
        for part in parts {
            out.extend(part?);
        }
        Ok(out)
    }

    fn walk(
        &self,
        group: &[(usize, Vec<Option<Pauli>>, Request)],
        side: Side,
        stored: &[DenseMatrix],
    ) -> Result<Vec<Output>> {
        let anchor = group[0].0;
        let base = match side {
            Side::Left => self.left_cap(anchor),
            Side::Right => DenseMatrix::identity(self.site(anchor).dr()),
        };
        let mut stack: Vec<DenseMatrix> = Vec::new();
        let mut prev: &[Option<Pauli>] = &[];
        let mut out = Vec::with_capacity(group.len());
        for (_, ops, req) in group {
            let common = prev.iter().zip(ops).take_while(|(a, b)| a == b).count();
            stack.truncate(common);
            for (d, op) in ops.iter().enumerate().skip(common) {
                let env = stack.last().unwrap_or(&base);
                let next = match side {
                    Side::Left => transfer(env, self.site(anchor + d), *op)?,
                    Side::Right => transfer_right(env, self.site(anchor - d), *op)?,
                };
                stack.push(next);
            }
            prev = ops;
            let env = stack.last().unwrap_or(&base);
            out.push(match *req {
                Request::Close(idx) => Output::Value(idx, real_part(trace(env))?),
                Request::Cap(idx, first) => {
                    let lam = self.lambda(first);
                    let z: Complex64 = lam.iter().enumerate().map(|(a, l)| env[(a, a)] * (l * l)).sum();
                    Output::Value(idx, real_part(z)?)
                }
                Request::Store(rid) => Output::Stored(rid, env.clone()),
                Request::Join(idx, rid) => Output::Value(idx, real_part(trace_product(env, &stored[rid]))?),
            });
        }
        Ok(out)
    }

    /// `⟨ψ|O|ψ⟩`, summed in the operator's canonical term order.
    pub fn expect_operator(&self, op: &QubitOperator) -> Result<f64> {
        let strings: Vec<PauliString> = op.iter().map(|(p, _)| p.clone()).collect();
        let values = self.expect_many(&strings)?;
        let total: Complex64 = op.iter().zip(&values).map(|((_, c), v)| c * v).sum();
        real_part(total)
    }
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAGINARY_TOLERANCE || !z.re.is_finite() {
        return Err(Error::ImaginaryExpectation(z.im));
    }
    Ok(z.re)
}
