//! Binary MPS checkpoints.
//!
//! Little-endian throughout:
//!
//! ```text
//! magic       8 bytes  "MPSVQECK"
//! version     u32      1
//! n_sites     u64
//! max_bond    u64
//! threshold   f64
//! backend     u8 name length, name bytes, eps f64, max_sweeps u64
//! discarded   f64
//! per site    dl u64, dr u64, 2·dl·dr × (re f64, im f64), row-major [i][α][β]
//! per bond    len u64, len × f64          (n_sites + 1 bonds)
//! ```
//!
//! `eps` and `max_sweeps` are zero for backends without them.

use std::path::Path;

use mpsvqe_core::linalg::SvdBackend;
use mpsvqe_core::mps::{MpsConfig, MpsState, SiteTensor};
use mpsvqe_core::Complex64;

use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"MPSVQECK";
pub const VERSION: u32 = 1;

pub fn encode(state: &MpsState) -> Vec<u8> {
    let mut out = Vec::new();
    let cfg = state.config();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(state.n_qubits() as u64).to_le_bytes());
    out.extend_from_slice(&(cfg.max_bond as u64).to_le_bytes());
    out.extend_from_slice(&cfg.threshold.to_le_bytes());
    let name = cfg.backend.name();
    out.push(name.len() as u8);
    out.extend_from_slice(name.as_bytes());
    let (eps, sweeps) = match cfg.backend {
        SvdBackend::Jacobi { eps, max_sweeps } | SvdBackend::PivotedJacobi { eps, max_sweeps } => (eps, max_sweeps),
        SvdBackend::Reference | SvdBackend::CrossProduct => (0.0, 0),
    };
    out.extend_from_slice(&eps.to_le_bytes());
    out.extend_from_slice(&(sweeps as u64).to_le_bytes());
    out.extend_from_slice(&state.discarded_weight().to_le_bytes());
    for site in state.sites() {
        out.extend_from_slice(&(site.dl() as u64).to_le_bytes());
        out.extend_from_slice(&(site.dr() as u64).to_le_bytes());
        for i in 0..2 {
            for a in 0..site.dl() {
                for b in 0..site.dr() {
                    let v = site.get(i, a, b);
                    out.extend_from_slice(&v.re.to_le_bytes());
                    out.extend_from_slice(&v.im.to_le_bytes());
                }
            }
        }
    }
    for lam in state.lambdas() {
        out.extend_from_slice(&(lam.len() as u64).to_le_bytes());
        for v in lam {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.at.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Format(format!("checkpoint truncated at byte {}", self.at)))?;
        let s = &self.bytes[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    /// A length that must fit in the remaining bytes at `unit` bytes each.
    fn len(&mut self, unit: usize) -> Result<usize> {
        let n = self.u64()?;
        let left = (self.bytes.len() - self.at) as u64;
        if n.checked_mul(unit as u64).map_or(true, |b| b > left) {
            return Err(Error::Format(format!("checkpoint length {n} exceeds the file")));
        }
        Ok(n as usize)
    }
}

pub fn decode(bytes: &[u8]) -> Result<MpsState> {
    let mut r = Reader { bytes, at: 0 };
    if r.take(8)? != MAGIC {
        return Err(Error::Format("not an MPS checkpoint".into()));
    }
    let version = u32::from_le_bytes(r.take(4)?.try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(Error::Format(format!("checkpoint version {version}, this build reads {VERSION}")));
    }
    let n = r.len(16)?;
    let max_bond = r.u64()? as usize;
    let threshold = r.f64()?;
    let name_len = r.take(1)?[0] as usize;
    let name = std::str::from_utf8(r.take(name_len)?).map_err(|_| Error::Format("backend name is not UTF-8".into()))?;
    let eps = r.f64()?;
    let max_sweeps = r.u64()? as usize;
    let backend = match SvdBackend::from_name(name) {
        Some(SvdBackend::Jacobi { .. }) => SvdBackend::Jacobi { eps, max_sweeps },
        Some(SvdBackend::PivotedJacobi { .. }) => SvdBackend::PivotedJacobi { eps, max_sweeps },
        Some(other) => other,
        None => return Err(Error::Format(format!("unknown SVD backend {name:?}"))),
    };
    let discarded = r.f64()?;
    let mut sites = Vec::with_capacity(n);
    for _ in 0..n {
        let dl = r.u64()? as usize;
        let dr = r.u64()? as usize;
        let count = dl
            .checked_mul(dr)
            .and_then(|x| x.checked_mul(2))
            .filter(|&c| c.saturating_mul(16) <= bytes.len() - r.at)
            .ok_or_else(|| Error::Format(format!("site {dl}x2x{dr} exceeds the file")))?;
        let mut data = vec![Complex64::new(0.0, 0.0); count];
        for i in 0..2 {
            for a in 0..dl {
                for b in 0..dr {
                    let re = r.f64()?;
                    let im = r.f64()?;
                    data[i * dl * dr + b * dl + a] = Complex64::new(re, im);
                }
            }
        }
        sites.push(SiteTensor::new(dl, dr, data)?);
    }
    let mut lambdas = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        let len = r.len(8)?;
        lambdas.push((0..len).map(|_| r.f64()).collect::<Result<Vec<_>>>()?);
    }
    if r.at != bytes.len() {
        return Err(Error::Format(format!("{} trailing bytes in checkpoint", bytes.len() - r.at)));
    }
    let mut state = MpsState::from_parts(sites, lambdas, MpsConfig { max_bond, threshold, backend })?;
    state.set_discarded_weight(discarded);
    Ok(state)
}

pub fn write(path: impl AsRef<Path>, state: &MpsState) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode(state)).map_err(|e| Error::io(path, e))
}

pub fn read(path: impl AsRef<Path>) -> Result<MpsState> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mpsvqe_core::mps::{matrices, Circuit, GateLabel};
    use proptest::prelude::*;

    fn entangled(n: usize, seed: u64, backend: SvdBackend) -> MpsState {
        let mut c = Circuit::new(n);
        let mut x = seed;
        for layer in 0..3 {
            for q in 0..n {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let angle = (x >> 11) as f64 / (1u64 << 53) as f64 * 6.0;
                c.push_1q(q, matrices::ry(angle), GateLabel::Ry(angle)).unwrap();
            }
            for q in (layer % 2..n.saturating_sub(1)).step_by(2) {
                c.push_cnot(q, q + 1).unwrap();
            }
        }
        let mut s = MpsState::basis_state(&"0".repeat(n), MpsConfig { max_bond: 3, backend, ..MpsConfig::default() })
            .unwrap();
        s.apply_circuit(&c).unwrap();
        s
    }

    #[test]
    fn header_layout() {
        let s = MpsState::basis_state("10", MpsConfig::default()).unwrap();
        let bytes = encode(&s);
        assert_eq!(&bytes[..8], MAGIC);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), VERSION);
        assert_eq!(u64::from_le_bytes(bytes[12..20].try_into().unwrap()), 2);
    }

    #[test]
    fn corrupt_input_is_rejected() {
        let s = entangled(4, 1, SvdBackend::default());
        let bytes = encode(&s);
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode(&extra).is_err());
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(decode(&magic).is_err());
        let mut version = bytes.clone();
        version[8] = 9;
        assert!(decode(&version).is_err());
        let mut huge = bytes;
        huge[12..20].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(decode(&huge).is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.mps");
        let s = entangled(5, 9, SvdBackend::Reference);
        write(&path, &s).unwrap();
        assert_eq!(read(&path).unwrap(), s);
        assert!(read(dir.path().join("missing.mps")).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn round_trip_is_exact(n in 1usize..8, seed in any::<u64>(), b in 0usize..4) {
            let backend = SvdBackend::from_name(["jacobi", "jacobi-qr", "reference", "crossproduct"][b]).unwrap();
            let s = entangled(n, seed, backend);
            let bytes = encode(&s);
            let back = decode(&bytes).unwrap();
            prop_assert_eq!(&back, &s);
            prop_assert_eq!(encode(&back), bytes);
        }
    }
}
