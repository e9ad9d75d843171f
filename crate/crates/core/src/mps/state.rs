use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::gate::{Circuit, Gate, Mat2, Mat4};
use crate::linalg::{gemm_ref, truncated_svd, DenseMatrix, MatRef, Op, SvdBackend, DEFAULT_EPS, DEFAULT_MAX_SWEEPS};
use crate::{Error, Result};

/// Truncation and backend settings of an [`MpsState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpsConfig {
    /// Bond-dimension cap `D`.
    pub max_bond: usize,
    /// Singular values below `threshold · σ_max` are dropped.
    pub threshold: f64,
    pub backend: SvdBackend,
}

impl Default for MpsConfig {
    fn default() -> Self {
        Self {
            max_bond: 128,
            threshold: 1e-12,
            backend: SvdBackend::PivotedJacobi {
                eps: DEFAULT_EPS,
                max_sweeps: DEFAULT_MAX_SWEEPS,
            },
        }
    }
}

impl MpsConfig {
    pub fn with_max_bond(max_bond: usize) -> Self {
        Self {
            max_bond,
            ..Self::default()
        }
    }
}

/// One site tensor `B^i[α, β]`, `i ∈ {0, 1}`.
///
/// Stored as two column-major `dl × dr` blocks, block `i` at offset
/// `i·dl·dr`. The whole buffer is therefore also the column-major
/// `dl × 2dr` matrix with columns `(i, β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteTensor {
    dl: usize,
    dr: usize,
    data: Vec<Complex64>,
}

impl SiteTensor {
    pub fn new(dl: usize, dr: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != 2 * dl * dr || dl == 0 || dr == 0 {
            return Err(Error::Dimension(alloc::format!(
                "site tensor {dl}x2x{dr} from {} elements",
                data.len()
            )));
        }
        Ok(Self { dl, dr, data })
    }

    pub fn dl(&self) -> usize {
        self.dl
    }

    pub fn dr(&self) -> usize {
        self.dr
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, a: usize, b: usize) -> Complex64 {
        self.data[i * self.dl * self.dr + b * self.dl + a]
    }

    /// `B^i` as a `dl × dr` view.
    pub fn block(&self, i: usize) -> MatRef<'_> {
        let len = self.dl * self.dr;
        MatRef {
            rows: self.dl,
            cols: self.dr,
            data: &self.data[i * len..(i + 1) * len],
        }
    }

    /// The `dl × 2dr` view with columns `(i, β)`.
    pub fn wide(&self) -> MatRef<'_> {
        MatRef {
            rows: self.dl,
            cols: 2 * self.dr,
            data: &self.data,
        }
    }

    /// `max |Σ_{i,β} B^i[α,β] conj(B^i[α',β]) − δ_{αα'}|`.
    pub fn right_canonical_residual(&self) -> f64 {
        let w = self.wide();
        let mut worst = 0.0f64;
        for a in 0..self.dl {
            for b in a..self.dl {
                let s: Complex64 = (0..w.cols).map(|c| w.get(a, c) * w.get(b, c).conj()).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }
}

/// Right-canonical matrix product state with per-bond Schmidt values.
///
/// Qubit 0 is the leftmost site and the most significant bit of the
/// statevector index; `|1⟩` is the `Z = −1` eigenstate. `lambdas[k]` holds
/// the Schmidt values across the bond left of site `k`, so `lambdas[0]` and
/// `lambdas[n]` are the trivial boundaries `(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MpsState {
    sites: Vec<SiteTensor>,
    lambdas: Vec<Vec<f64>>,
    config: MpsConfig,
    discarded: f64,
}

impl MpsState {
    /// Product state from a `0`/`1` string, qubit 0 first.
    pub fn basis_state(bits: &str, config: MpsConfig) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Invalid("empty bitstring".into()));
        }
        if config.max_bond == 0 {
            return Err(Error::Invalid("max_bond must be at least 1".into()));
        }
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let sites = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(SiteTensor::new(1, 1, vec![one, zero]).unwrap()),
                '1' => Ok(SiteTensor::new(1, 1, vec![zero, one]).unwrap()),
                other => Err(Error::Invalid(alloc::format!("bit {other:?} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let n = sites.len();
        Ok(Self {
            sites,
            lambdas: vec![vec![1.0]; n + 1],
            config,
            discarded: 0.0,
        })
    }

    /// Builds a state from explicit tensors, checking shapes and λ.
    pub fn from_parts(sites: Vec<SiteTensor>, lambdas: Vec<Vec<f64>>, config: MpsConfig) -> Result<Self> {
        let n = sites.len();
        if n == 0 || lambdas.len() != n + 1 {
            return Err(Error::Dimension(alloc::format!("{n} sites with {} bonds", lambdas.len())));
        }
        for (k, lam) in lambdas.iter().enumerate() {
            let left = if k == 0 { 1 } else { sites[k - 1].dr };
            let right = if k == n { 1 } else { sites[k].dl };
            if lam.len() != left || lam.len() != right {
                return Err(Error::Dimension(alloc::format!(
                    "bond {k}: {} Schmidt values between dims {left} and {right}",
                    lam.len()
                )));
            }
            if lam.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::NonFinite(alloc::format!("Schmidt values at bond {k}")));
            }
        }
        Ok(Self {
            sites,
            lambdas,
            config,
            discarded: 0.0,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.sites.len()
    }

    pub fn config(&self) -> &MpsConfig {
        &self.config
    }

    pub fn set_config(&mut self, config: MpsConfig) {
        self.config = config;
    }

    pub fn sites(&self) -> &[SiteTensor] {
        &self.sites
    }

    pub fn site(&self, k: usize) -> &SiteTensor {
        &self.sites[k]
    }

    /// Schmidt values across the bond left of site `k` (`0 ≤ k ≤ n`).
    pub fn lambda(&self, k: usize) -> &[f64] {
        &self.lambdas[k]
    }

    pub fn lambdas(&self) -> &[Vec<f64>] {
        &self.lambdas
    }

    /// Dimensions of the `n − 1` internal bonds.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites[..self.sites.len() - 1].iter().map(|s| s.dr).collect()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.sites.iter().map(|s| s.dr).max().unwrap_or(1)
    }

    /// Sum of per-gate discarded weights since construction.
    pub fn discarded_weight(&self) -> f64 {
        self.discarded
    }

    /// Overrides the accumulated discarded weight, e.g. when restoring a
    /// checkpoint.
    pub fn set_discarded_weight(&mut self, w: f64) {
        self.discarded = w;
    }

    pub(crate) fn add_discarded(&mut self, w: f64) {
        self.discarded += w;
    }

    /// Largest right-canonical residual over all sites.
    pub fn max_canonical_residual(&self) -> f64 {
        self.sites.iter().map(SiteTensor::right_canonical_residual).fold(0.0, f64::max)
    }

    /// Largest `|Σλ² − 1|` over all bonds.
    pub fn max_lambda_norm_residual(&self) -> f64 {
        self.lambdas
            .iter()
            .map(|l| (l.iter().map(|v| v * v).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_qubits() {
            return Err(Error::QubitOutOfRange {
                qubit: site,
                n_qubits: self.n_qubits(),
            });
        }
        Ok(())
    }

    /// `B^i ← Σ_j Q_ij B^j` on one site. Exact; no truncation.
    pub fn apply_1q(&mut self, site: usize, q: &Mat2) -> Result<()> {
        self.check_site(site)?;
        let t = &mut self.sites[site];
        let len = t.dl * t.dr;
        let (b0, b1) = t.data.split_at_mut(len);
        for (x0, x1) in b0.iter_mut().zip(b1.iter_mut()) {
            let (v0, v1) = (*x0, *x1);
            *x0 = q[0] * v0 + q[1] * v1;
            *x1 = q[2] * v0 + q[3] * v1;
        }
        Ok(())
    }

    /// Applies `q` to sites `site`, `site + 1` and restores right-canonical
    /// form with a truncated SVD. Returns the discarded weight.
    ///
    /// When the cut discards weight, the left tensor is right-canonical
    /// only up to that weight.
    pub fn apply_2q(&mut self, site: usize, q: &Mat4) -> Result<f64> {
        if site + 1 >= self.n_qubits() {
            return Err(Error::NonAdjacent(site, site + 1));
        }
        let (left, right) = (&self.sites[site], &self.sites[site + 1]);
        let (dl, dr) = (left.dl, right.dr);

        // Θ_i[α, (j,γ)] = Σ_β B^i_site[α,β] B^j_{site+1}[β,γ]
        let theta = [
            gemm_ref(left.block(0), right.wide(), Op::N, Op::N)?,
            gemm_ref(left.block(1), right.wide(), Op::N, Op::N)?,
        ];

        // C_{i'}[α, (j',γ)] = Σ_{ij} Q[(i'j'),(ij)] Θ_i[α,(j,γ)]
        let blk = dl * dr;
        let zero = Complex64::new(0.0, 0.0);
        let mut c = [vec![zero; 2 * blk], vec![zero; 2 * blk]];
        for ip in 0..2 {
            for jp in 0..2 {
                let dst = &mut c[ip][jp * blk..(jp + 1) * blk];
                for i in 0..2 {
                    for j in 0..2 {
                        let w = q[(2 * ip + jp) * 4 + 2 * i + j];
                        if w == zero {
                            continue;
                        }
                        let src = &theta[i].data()[j * blk..(j + 1) * blk];
                        for (d, s) in dst.iter_mut().zip(src) {
                            *d += w * s;
                        }
                    }
                }
            }
        }

        // C̃[(i',α), (j',γ)] = λ[α] C_{i'}[α, (j',γ)]
        let lam = &self.lambdas[site];
        let rows = 2 * dl;
        let mut m = vec![zero; rows * 2 * dr];
        for col in 0..2 * dr {
            for ip in 0..2 {
                let src = &c[ip][col * dl..(col + 1) * dl];
                let dst = &mut m[col * rows + ip * dl..col * rows + (ip + 1) * dl];
                for ((d, s), l) in dst.iter_mut().zip(src).zip(lam) {
                    *d = s * *l;
                }
            }
        }
        let m = DenseMatrix::from_col_major(rows, 2 * dr, m)?;
        let (svd, discarded) = truncated_svd(&m, self.config.max_bond, self.config.threshold, self.config.backend)?;
        let chi = svd.s.len();
        let norm = svd.s.iter().map(|s| s * s).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::NonFinite("two-qubit gate produced a zero state".into()));
        }
        let inv = 1.0 / norm;

        // B̃_{site+1} = V†, B̃_site^{i'} = C_{i'} V / ‖s‖.
        let v = &svd.v;
        let mut new_right = vec![zero; chi * 2 * dr];
        for b in 0..chi {
            for r in 0..2 * dr {
                new_right[r * chi + b] = v[(r, b)].conj();
            }
        }
        let mut new_left = Vec::with_capacity(2 * dl * chi);
        for blk_c in &c {
            let cm = MatRef::new(dl, 2 * dr, blk_c)?;
            let part = gemm_ref(cm, v.as_ref(), Op::N, Op::N)?;
            new_left.extend(part.data().iter().map(|z| z * inv));
        }
        self.sites[site] = SiteTensor::new(dl, chi, new_left)?;
        self.sites[site + 1] = SiteTensor::new(chi, dr, new_right)?;
        self.lambdas[site + 1] = svd.s.iter().map(|s| s * inv).collect();
        self.discarded += discarded;
        Ok(discarded)
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<f64> {
        match gate {
            Gate::One { site, matrix, .. } => self.apply_1q(*site, matrix).map(|_| 0.0),
            Gate::Two { site, matrix, .. } => self.apply_2q(*site, matrix),
        }
    }

    /// Applies every gate in order; returns the summed discarded weight.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<f64> {
        if circuit.n_qubits() != self.n_qubits() {
            return Err(Error::Dimension(alloc::format!(
                "{}-qubit circuit on {}-qubit state",
                circuit.n_qubits(),
                self.n_qubits()
            )));
        }
        let mut total = 0.0;
        for g in circuit.gates() {
            total += self.apply_gate(g)?;
        }
        Ok(total)
    }
}
